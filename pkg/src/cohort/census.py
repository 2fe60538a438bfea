"""N1 census layer: one representative row per person and completeness profiles."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from datetime import date

from .fields import CENSAL_FIELDS, VARIABLE_GROUPS
from .records import CensalRecord, RawStudentRecord, count_censal
from .ids import sort_ids


@dataclass(frozen=True)
class CompletenessProfile:
    variable_group: str
    field: str
    present_count: int
    missing_count: int

    @property
    def missing_pct(self) -> float:
        total = self.present_count + self.missing_count
        return self.missing_count / total if total else 0.0


@dataclass(frozen=True)
class Contradiction:
    person_id_original: str
    kind: str
    detail: str


def _selection_key(rec: CensalRecord):
    # Absent intake date sorts as the earliest possible date.
    return (rec.non_null_count, rec.intake_date or date.min, rec.row_number)


def to_censal(rec: RawStudentRecord) -> CensalRecord:
    return CensalRecord(
        row_number=rec.row_number, raw=rec.raw, auxiliary_texts=rec.auxiliary_texts,
        birth_date=rec.birth_date, intake_date=rec.intake_date,
        non_null_count=count_censal(rec),
    )


def consolidate_persons(
    records: list[RawStudentRecord],
) -> tuple[list[CensalRecord], list[CensalRecord]]:
    """Pick one representative row per ``person_id_original``.

    The row with the most present censal fields wins; ties go to the latest
    intake date, then to the latest appearance in the file. Returns
    ``(selected, superseded)``, both sorted by person id; no row is lost.
    """
    groups: dict[str, list[CensalRecord]] = defaultdict(list)
    for rec in records:
        groups[rec.person_id_original].append(to_censal(rec))

    selected, superseded = [], []
    for pid in sort_ids(groups):
        rows = groups[pid]
        best = max(rows, key=_selection_key)
        selected.append(best)
        superseded.extend(r for r in sorted(rows, key=lambda r: r.row_number) if r is not best)
    return selected, superseded


def profile_completeness(records: list[CensalRecord]) -> list[CompletenessProfile]:
    profiles = []
    n = len(records)
    for group, names in VARIABLE_GROUPS.items():
        for name in names:
            present = sum(1 for r in records if r.present(name))
            profiles.append(CompletenessProfile(group, name, present, n - present))
    return profiles


def find_contradictions(records: list[CensalRecord]) -> list[Contradiction]:
    out = []
    for r in records:
        if r.present("province_birth") and not r.present("country_birth"):
            out.append(Contradiction(r.person_id_original, "ContradictionCandidate",
                                     "province_birth present but country_birth absent"))
    return out


def completeness_summary(records: list[CensalRecord], threshold: float = 0.8) -> tuple[int, int]:
    """Count persons with at least ``threshold`` of the censal fields present."""
    need = threshold * len(CENSAL_FIELDS)
    return sum(1 for r in records if r.non_null_count >= need), len(records)


def render_profile_markdown(records: list[CensalRecord], threshold: float = 0.8) -> str:
    profiles = profile_completeness(records)
    contradictions = find_contradictions(records)
    complete, total = completeness_summary(records, threshold)
    lines = ["# N1 census completeness profile", "", f"Persons: {total}", ""]
    lines.append(
        f"Persons with at least {threshold:.0%} of censal fields present: {complete}"
        + (f" ({complete / total:.1%})" if total else "")
    )
    lines.append("")
    for group in VARIABLE_GROUPS:
        rows = [p for p in profiles if p.variable_group == group]
        lines += [f"## {group}", ""]
        if not rows:
            lines += ["No mapped fields in this group.", ""]
            continue
        lines += ["| field | present | missing | missing % |", "|---|---:|---:|---:|"]
        for p in rows:
            lines.append(f"| {p.field} | {p.present_count} | {p.missing_count} | {p.missing_pct:.1%} |")
        lines.append("")
    lines += ["## Contradictions", "", f"ContradictionCandidate rows: {len(contradictions)}", ""]
    if contradictions:
        lines += ["| person_id_original | detail |", "|---|---|"]
        lines += [f"| {c.person_id_original} | {c.detail} |" for c in contradictions[:50]]
        if len(contradictions) > 50:
            lines.append(f"| ... | {len(contradictions) - 50} more |")
        lines.append("")
    return "\n".join(lines)
