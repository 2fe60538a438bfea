"""The three N1c iterations: merge, deterministic refinement, partition."""

from __future__ import annotations

from dataclasses import dataclass, replace

from ..records import RawStudentRecord, ResolvedRecord
from .reference import (COUNTRY, LOCALITY, PROVINCE, ReferenceTables, Synonyms,
                        label_for)
from .rules import DATA_MISSING, RuleSet, classify_school_type
from .text import clean_text, match_tokens

OK = "OK"
NEEDS_REVIEW = "NEEDS_REVIEW"
RAW_V2 = "RAW_V2"

GEO_ID_FIELDS = (
    ("country_birth", "country_birth_id"),
    ("province_birth", "province_birth_id"),
    ("locality_birth", "locality_birth_id"),
    ("province_residence", "province_residence_id"),
    ("locality_residence", "locality_residence_id"),
)

NAN_MARKERS = frozenset({"", "nan", "null"})


@dataclass(frozen=True)
class CleanStudentRecord(ResolvedRecord):
    country_birth_id: int | None = None
    province_birth_id: int | None = None
    locality_birth_id: int | None = None
    province_residence_id: int | None = None
    locality_residence_id: int | None = None
    school_id: int | None = None
    school_type_raw: str = ""
    school_name_final: str | None = None
    school_type_final: str | None = None
    school_info_source: str | None = None
    school_type_source: str | None = None
    geo_flag: str = NEEDS_REVIEW
    school_flag: str = NEEDS_REVIEW

    @property
    def fully_ok(self) -> bool:
        return self.geo_flag == OK and self.school_flag == OK


@dataclass(frozen=True)
class SchoolClue:
    person_id_original: str
    source_field: str
    text: str
    match_kind: str
    matched: str


def school_text_missing(rec: RawStudentRecord) -> bool:
    """Absent, empty or literal ``nan`` on the retained source bytes (case-insensitive)."""
    return rec.raw.get("school_name", "").strip().lower() in NAN_MARKERS


def _resolve_geo(rec: RawStudentRecord, refs: ReferenceTables, synonyms: Synonyms, corrected: bool) -> dict:
    ids: dict[str, int | None] = {}
    c = label_for(COUNTRY, rec.value("country_birth"), synonyms, corrected)
    entry = refs.country_by_label.get(c) if c else None
    ids["country_birth_id"] = entry.ref_id if entry else None
    for loc_field, prov_field in (("locality_birth", "province_birth"),
                                  ("locality_residence", "province_residence")):
        p = label_for(PROVINCE, rec.value(prov_field), synonyms, corrected)
        prov = refs.province_by_label.get(p) if p else None
        ids[prov_field + "_id"] = prov.ref_id if prov else None
        loc = None
        if prov is not None:
            label = label_for(LOCALITY, rec.value(loc_field), synonyms, corrected)
            loc = refs.locality_by_key.get((label, prov.ref_id)) if label else None
        ids[loc_field + "_id"] = loc.ref_id if loc else None
    return ids


def _geo_flag(rec: RawStudentRecord, ids: dict) -> str:
    for text_field, id_field in GEO_ID_FIELDS:
        if not rec.present(text_field) or ids[id_field] is None:
            return NEEDS_REVIEW
    return OK


def _school_type(rec: RawStudentRecord, rules) -> str:
    if school_text_missing(rec) or rec.school_name is None:
        return DATA_MISSING
    return classify_school_type(clean_text(rec.school_name), rules)


def _match_school_by_name(rec, refs: ReferenceTables):
    name = rec.school_name
    if school_text_missing(rec) or name is None:
        return None
    candidates = refs.schools_by_match_key.get(refs.match_key(clean_text(name)), [])
    return candidates[0] if len(candidates) == 1 else None


def _match_school_in_locality(rec, refs: ReferenceTables, locality_id):
    name = rec.school_name
    if school_text_missing(rec) or name is None or locality_id is None:
        return None
    key = refs.match_key(clean_text(name))
    candidates = [e for e in refs.schools_by_match_key.get(key, []) if e.parent_ref == locality_id]
    return candidates[0] if len(candidates) == 1 else None


def iteration1_merge(records: list[ResolvedRecord], refs: ReferenceTables,
                     synonyms: Synonyms, rules: RuleSet) -> list[CleanStudentRecord]:
    """Join reference ids, classify with the base rules and set quality flags.

    School names are matched on their stopword-stripped form across all
    localities; a name shared by several entries is left for review.
    """
    out = []
    for r in records:
        ids = _resolve_geo(r, refs, synonyms, corrected=False)
        school = _match_school_by_name(r, refs)
        out.append(CleanStudentRecord(
            **_resolved_kwargs(r), **ids,
            school_id=school.ref_id if school else None,
            school_type_raw=_school_type(r, rules.rules),
            geo_flag=_geo_flag(r, ids),
            school_flag=OK if school else NEEDS_REVIEW,
        ))
    return out


def iteration2_refine(v1: list[CleanStudentRecord], refs: ReferenceTables,
                      synonyms: Synonyms, rules: RuleSet) -> list[CleanStudentRecord]:
    """Apply supplementary rules and synonym corrections; re-resolve flagged rows.

    Flags and ids of rows already OK are kept, so the OK set can only grow.
    Schools are now matched on (name, residence locality, province), which
    separates multi-campus names.
    """
    out = []
    for r in v1:
        changes: dict = {"school_type_raw": _school_type(r, rules.all_rules)}
        if r.geo_flag != OK:
            ids = _resolve_geo(r, refs, synonyms, corrected=True)
            changes.update(ids)
            changes["geo_flag"] = _geo_flag(r, ids)
        if r.school_flag != OK:
            loc_id = changes.get("locality_residence_id", r.locality_residence_id)
            school = _match_school_in_locality(r, refs, loc_id)
            if school is not None:
                changes["school_id"] = school.ref_id
                changes["school_flag"] = OK
        out.append(replace(r, **changes))
    return out


def _clue_patterns(refs: ReferenceTables, rules: RuleSet) -> list[tuple[str, tuple[str, ...], str]]:
    pats = []
    for rule in rules.all_rules:
        for p in rule.patterns:
            pats.append(("type_pattern", p, " ".join(p)))
    seen = set()
    for e in refs.schools:
        key = tuple(match_tokens(refs.match_key(e.canonical_label)))
        if len(key) >= 2 and key not in seen:
            seen.add(key)
            pats.append(("school_reference", key, e.canonical_label))
    return pats


def excavate_school_clues(record: CleanStudentRecord, refs: ReferenceTables, rules: RuleSet,
                          patterns=None) -> SchoolClue | None:
    """Look for any school hint in the auxiliary texts and the alternate school column.

    Read-only: the record is never changed; callers collect the findings.
    """
    patterns = patterns if patterns is not None else _clue_patterns(refs, rules)
    sources = [("school_type_raw_hint", record.raw.get("school_type_raw_hint", ""))]
    sources += [(f"auxiliary_text[{i}]", t) for i, t in enumerate(record.auxiliary_texts)]
    for source_field, text in sources:
        if text is None or text.strip().lower() in NAN_MARKERS:
            continue
        tokens = match_tokens(clean_text(text))
        for kind, pat, label in patterns:
            k = len(pat)
            if any(tuple(tokens[i:i + k]) == pat for i in range(len(tokens) - k + 1)):
                return SchoolClue(record.person_id_original, source_field, text, kind, label)
    return None


def iteration3_partition(v2: list[CleanStudentRecord], refs: ReferenceTables, rules: RuleSet,
                         adopted: frozenset[str] = frozenset()
                         ) -> tuple[list[CleanStudentRecord], list[SchoolClue]]:
    """Split the population into RAW_V2 and DATA_MISSING.

    Rows without school text are excavated for clues; findings are returned
    for the report. A clue only changes the outcome when its person id is in
    ``adopted`` (a reviewed decision). Nothing is imputed.
    """
    patterns = _clue_patterns(refs, rules)
    out, clues = [], []
    for r in v2:
        if school_text_missing(r):
            clue = excavate_school_clues(r, refs, rules, patterns)
            if clue is not None:
                clues.append(clue)
            if clue is not None and r.person_id_original in adopted:
                name = clean_text(clue.text)
                out.append(replace(
                    r, school_name_final=name,
                    school_type_final=classify_school_type(name, rules.all_rules),
                    school_info_source=RAW_V2, school_type_source=RAW_V2,
                ))
                continue
            out.append(replace(
                r, school_name_final=None, school_type_final=DATA_MISSING,
                school_info_source=DATA_MISSING, school_type_source=DATA_MISSING,
            ))
        else:
            school = refs.school_by_id.get(r.school_id) if r.school_id is not None else None
            name = school.canonical_label if school else clean_text(r.school_name or r.raw["school_name"])
            out.append(replace(
                r, school_name_final=name, school_type_final=r.school_type_raw,
                school_info_source=RAW_V2, school_type_source=RAW_V2,
            ))
    return out, clues


def _resolved_kwargs(r: ResolvedRecord) -> dict:
    return dict(
        row_number=r.row_number, raw=r.raw, auxiliary_texts=r.auxiliary_texts,
        birth_date=r.birth_date, intake_date=r.intake_date, non_null_count=r.non_null_count,
        person_id_canonical=r.person_id_canonical, resolution_status=r.resolution_status,
    )


def render_excavation_report(v3: list[CleanStudentRecord], clues: list[SchoolClue],
                             adopted: frozenset[str] = frozenset()) -> str:
    missing = sum(1 for r in v3 if r.school_info_source == DATA_MISSING)
    candidates = missing + sum(1 for c in clues if c.person_id_original in adopted)
    lines = [
        "# N1c school-data excavation",
        "",
        f"Rows without school text examined: {candidates}",
        f"Rows with a school clue: {len(clues)}",
        f"Clues adopted: {sum(1 for c in clues if c.person_id_original in adopted)}",
        f"Rows left as DATA_MISSING: {missing}",
        "",
    ]
    if not clues:
        lines.append("No school information was found in auxiliary or alternate fields.")
    else:
        lines += ["| person_id_original | field | match | matched | text |", "|---|---|---|---|---|"]
        for c in clues:
            text = c.text.replace("|", "/")
            lines.append(f"| {c.person_id_original} | {c.source_field} | {c.match_kind} | {c.matched} | {text} |")
    lines.append("")
    return "\n".join(lines)
