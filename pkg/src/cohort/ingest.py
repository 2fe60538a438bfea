"""Read the raw register extract into typed records without altering any cell."""

from __future__ import annotations

import codecs
import csv
import io
import logging
from dataclasses import dataclass, field
from datetime import date, datetime
from pathlib import Path

from .errors import HeaderMismatch
from .fields import AUXILIARY, DATE_FIELDS, FieldMappingSet, LOGICAL_FIELDS
from .records import RawStudentRecord, is_missing, write_rows

log = logging.getLogger(__name__)

REJECT_COLUMNS = ("row_number", "reason", "raw_line")


@dataclass
class Reject:
    row_number: int
    reason: str
    raw_line: str


@dataclass
class IngestResult:
    records: list[RawStudentRecord]
    rejects: list[Reject] = field(default_factory=list)
    warnings: list[tuple[int, str, str]] = field(default_factory=list)

    @property
    def row_count(self) -> int:
        return len(self.records) + len(self.rejects)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


def parse_date(text: str | None, formats) -> date | None:
    if is_missing(text):
        return None
    s = text.strip()
    for fmt in formats:
        try:
            return datetime.strptime(s, fmt).date()
        except ValueError:
            continue
    return None


def _decode(data: bytes) -> tuple[str, bool]:
    try:
        return data.decode("utf-8"), False
    except UnicodeDecodeError:
        return data.decode("utf-8", errors="replace"), True


def ingest_raw(path: str | Path, mapping: FieldMappingSet) -> IngestResult:
    """Parse the delimited extract at ``path`` into one record per data row.

    Rows with the wrong number of fields, or an empty person id, go to
    ``rejects`` with a reason. Everything else becomes a record, in file
    order, with every mapped cell kept byte-for-byte.
    """
    text, had_errors = _decode(Path(path).read_bytes())
    if text.startswith(codecs.BOM_UTF8.decode("utf-8")):
        text = text[1:]
    reader = csv.reader(io.StringIO(text, newline=""), delimiter=mapping.delimiter)
    header = next(reader, None)
    if header is None:
        raise HeaderMismatch(f"{path} has no header row")

    index = {name: i for i, name in enumerate(header)}
    missing = sorted({m.source_column for m in mapping} - index.keys())
    if missing:
        raise HeaderMismatch(f"header lacks mapped columns: {', '.join(missing)}")

    singles = {m.logical_field: index[m.source_column] for m in mapping if m.logical_field != AUXILIARY}
    aux_idx = [index[c] for c in mapping.auxiliary_columns]
    required = [m for m in mapping if m.required]

    result = IngestResult(records=[])
    row_number = 0
    for row in reader:
        if not row:
            continue
        row_number += 1
        if len(row) != len(header):
            result.rejects.append(
                Reject(row_number, f"MalformedRow: expected {len(header)} fields, got {len(row)}",
                       mapping.delimiter.join(row))
            )
            continue
        empty = [m.logical_field for m in required if is_missing(row[index[m.source_column]])]
        if empty:
            result.rejects.append(
                Reject(row_number, f"MissingRequired: {', '.join(empty)}", mapping.delimiter.join(row))
            )
            continue

        raw = {name: row[singles[name]] if name in singles else "" for name in LOGICAL_FIELDS}
        dates = {}
        for name in DATE_FIELDS:
            dates[name] = parse_date(raw[name], mapping.date_formats)
            if dates[name] is None and not is_missing(raw[name]):
                msg = f"unparseable date {raw[name]!r}"
                log.debug("row %d %s: %s", row_number, name, msg)
                result.warnings.append((row_number, name, msg))
        if had_errors:
            for name, value in raw.items():
                if "�" in value:
                    log.debug("row %d %s: invalid UTF-8 replaced", row_number, name)
                    result.warnings.append((row_number, name, "invalid UTF-8 replaced"))

        result.records.append(
            RawStudentRecord(
                row_number=row_number,
                raw=raw,
                auxiliary_texts=tuple(row[i] for i in aux_idx),
                birth_date=dates["birth_date"],
                intake_date=dates["intake_date"],
            )
        )
    if result.warnings:
        log.warning("%d cell warnings (unparseable dates or replaced bytes) in %s", len(result.warnings), path)
    log.info("ingested %d rows (%d quarantined) from %s", row_number, len(result.rejects), path)
    return result


def write_rejects(path: Path, rejects: list[Reject]) -> None:
    write_rows(path, REJECT_COLUMNS, ((r.row_number, r.reason, r.raw_line) for r in rejects))
