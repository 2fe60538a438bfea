"""Record types shared by the pipeline stages and their CSV round-trip.

Every stage keeps the verbatim source text of each logical field in ``raw``.
Typed views (``value``, ``entry_year``, the parsed dates) are derived from it,
so literal markers such as ``"nan"`` survive to the last iteration.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, fields, replace
from datetime import date
from pathlib import Path
from typing import Iterable, Sequence

from .fields import CENSAL_FIELDS, LOGICAL_FIELDS, MISSING_MARKERS


def is_missing(text: str | None) -> bool:
    return text is None or text.strip() in MISSING_MARKERS


def parse_year(text: str | None) -> int | None:
    if is_missing(text):
        return None
    s = text.strip()
    if len(s) == 4 and s.isdigit():
        return int(s)
    return None


@dataclass(frozen=True)
class RawStudentRecord:
    """One person-appearance exactly as it came out of the extract."""

    row_number: int
    raw: dict[str, str]
    auxiliary_texts: tuple[str, ...] = ()
    birth_date: date | None = None
    intake_date: date | None = None

    def __post_init__(self):
        if is_missing(self.raw.get("person_id")):
            raise ValueError(f"row {self.row_number}: person_id is empty")

    def value(self, name: str) -> str | None:
        """Typed text value: ``None`` for missing markers, verbatim otherwise."""
        if name == "birth_date":
            return self.birth_date.isoformat() if self.birth_date else None
        if name == "intake_date":
            return self.intake_date.isoformat() if self.intake_date else None
        if name == "entry_year":
            y = self.entry_year
            return None if y is None else str(y)
        text = self.raw.get(name, "")
        return None if is_missing(text) else text

    def present(self, name: str) -> bool:
        return self.value(name) is not None

    @property
    def person_id_original(self) -> str:
        return self.raw["person_id"].strip()

    @property
    def national_doc(self) -> str | None:
        v = self.value("national_doc")
        return v.strip() if v else None

    @property
    def full_name(self) -> str | None:
        return self.value("full_name")

    @property
    def entry_year(self) -> int | None:
        return parse_year(self.raw.get("entry_year"))

    @property
    def birth_year(self) -> int | None:
        return self.birth_date.year if self.birth_date else None

    @property
    def school_name(self) -> str | None:
        return self.value("school_name")


def count_censal(record: RawStudentRecord) -> int:
    return sum(1 for f in CENSAL_FIELDS if record.present(f))


@dataclass(frozen=True)
class CensalRecord(RawStudentRecord):
    non_null_count: int = 0

    @property
    def source_row_index(self) -> int:
        return self.row_number


@dataclass(frozen=True)
class ResolvedRecord(CensalRecord):
    person_id_canonical: str = ""
    resolution_status: str = ""


# -- CSV round trip ---------------------------------------------------------

BASE_COLUMNS = (
    ["row_number"]
    + list(LOGICAL_FIELDS)
    + ["birth_date_iso", "intake_date_iso", "auxiliary_texts"]
)


def _base_row(rec: RawStudentRecord) -> dict[str, str]:
    row = {"row_number": str(rec.row_number)}
    for name in LOGICAL_FIELDS:
        row[name] = rec.raw.get(name, "")
    row["birth_date_iso"] = rec.birth_date.isoformat() if rec.birth_date else ""
    row["intake_date_iso"] = rec.intake_date.isoformat() if rec.intake_date else ""
    row["auxiliary_texts"] = json.dumps(list(rec.auxiliary_texts), ensure_ascii=False)
    return row


def _base_kwargs(row: dict[str, str]) -> dict:
    return {
        "row_number": int(row.get("row_number") or 0),
        "raw": {name: row.get(name, "") for name in LOGICAL_FIELDS},
        "auxiliary_texts": tuple(json.loads(row.get("auxiliary_texts") or "[]")),
        "birth_date": date.fromisoformat(row["birth_date_iso"]) if row.get("birth_date_iso") else None,
        "intake_date": date.fromisoformat(row["intake_date_iso"]) if row.get("intake_date_iso") else None,
    }


def _own_fields(cls) -> list[str]:
    base = {f.name for f in fields(RawStudentRecord)}
    return [f.name for f in fields(cls) if f.name not in base]


def _encode(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    return str(value)


def columns_for(cls) -> list[str]:
    return BASE_COLUMNS + _own_fields(cls)


def record_to_row(rec: RawStudentRecord) -> dict[str, str]:
    row = _base_row(rec)
    for name in _own_fields(type(rec)):
        row[name] = _encode(getattr(rec, name))
    return row


def row_to_record(cls, row: dict[str, str]):
    kwargs = _base_kwargs(row)
    types = {f.name: f.type for f in fields(cls)}
    for name in _own_fields(cls):
        text = row.get(name, "")
        kwargs[name] = _decode(types[name], text)
    return cls(**kwargs)


def _decode(type_hint: str, text: str):
    hint = str(type_hint)
    if text == "":
        if "None" in hint:
            return None
        if hint.startswith("int"):
            return 0
        return ""
    if hint.startswith("int"):
        return int(text)
    return text


def write_records(path: Path, records: Sequence[RawStudentRecord], cls=None, exclude=()) -> None:
    """Write records as CSV; ``exclude`` drops columns (e.g. the file row number)."""
    cls = cls or (type(records[0]) if records else RawStudentRecord)
    columns = [c for c in columns_for(cls) if c not in exclude]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
        writer.writeheader()
        for rec in records:
            writer.writerow(record_to_row(rec))


def read_records(path: Path, cls) -> list:
    with open(path, newline="", encoding="utf-8") as fh:
        return [row_to_record(cls, row) for row in csv.DictReader(fh)]


def write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_encode(v) for v in row])


def read_rows(path: Path) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def with_updates(rec, **changes):
    return replace(rec, **changes)
