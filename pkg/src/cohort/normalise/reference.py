"""Reference tables (countries, provinces, localities, schools) built from the register."""

from __future__ import annotations

import csv
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

from ..errors import InvalidConfig
from ..records import RawStudentRecord, write_rows
from .text import DEFAULT_STOPWORDS, clean_text, is_abbreviated, remove_stopwords

COUNTRY, PROVINCE, LOCALITY, SCHOOL = "COUNTRY", "PROVINCE", "LOCALITY", "SCHOOL"
KINDS = (COUNTRY, PROVINCE, LOCALITY, SCHOOL)
TABLE_FILES = {
    COUNTRY: "ref_countries_v1.csv",
    PROVINCE: "ref_provinces_v1.csv",
    LOCALITY: "ref_localities_v1.csv",
    SCHOOL: "ref_schools_v1.csv",
}
REF_COLUMNS = ("ref_id", "canonical_label", "parent_ref", "variants")


@dataclass(frozen=True)
class ReferenceEntry:
    ref_id: int
    canonical_label: str
    kind: str
    parent_ref: int | None = None
    variants: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Synonyms:
    """Label folds: ``reference`` applies from iteration 1, ``corrections`` from iteration 2."""

    reference: dict[str, dict[str, str]] = field(default_factory=dict)
    corrections: dict[str, dict[str, str]] = field(default_factory=dict)
    version: str = "0"

    def fold(self, kind: str, label: str, corrected: bool = False) -> str:
        label = self.reference.get(kind, {}).get(label, label)
        if corrected:
            label = self.corrections.get(kind, {}).get(label, label)
            label = self.reference.get(kind, {}).get(label, label)
        return label


def _clean_map(section, where: str) -> dict[str, dict[str, str]]:
    out: dict[str, dict[str, str]] = {}
    if section is None:
        return out
    if not isinstance(section, dict):
        raise InvalidConfig(f"{where} must be a mapping")
    for kind, mapping in section.items():
        key = str(kind).upper()
        if key not in (COUNTRY, PROVINCE, LOCALITY):
            raise InvalidConfig(f"{where}: unknown kind {kind!r}")
        out[key] = {clean_text(str(k)): clean_text(str(v)) for k, v in (mapping or {}).items()}
    return out


def parse_synonyms(doc: dict) -> Synonyms:
    return Synonyms(
        _clean_map(doc.get("reference"), "reference"),
        _clean_map(doc.get("corrections"), "corrections"),
        str(doc.get("version", "0")),
    )


def load_synonyms(path: str | Path | None = None) -> Synonyms:
    if path is None:
        text = resources.files("cohort.data").joinpath("default_synonyms.yaml").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    doc = yaml.safe_load(text) or {}
    if not isinstance(doc, dict):
        raise InvalidConfig("synonyms file must be a mapping")
    return parse_synonyms(doc)


def label_for(kind: str, raw: str | None, synonyms: Synonyms, corrected: bool = False) -> str | None:
    """Cleaned, synonym-folded label; ``None`` when empty or still abbreviated."""
    if raw is None:
        return None
    label = synonyms.fold(kind, clean_text(raw), corrected)
    if not label or is_abbreviated(label):
        return None
    return label


@dataclass
class ReferenceTables:
    countries: list[ReferenceEntry] = field(default_factory=list)
    provinces: list[ReferenceEntry] = field(default_factory=list)
    localities: list[ReferenceEntry] = field(default_factory=list)
    schools: list[ReferenceEntry] = field(default_factory=list)
    stopwords: frozenset[str] = DEFAULT_STOPWORDS

    def __post_init__(self):
        self.reindex()

    def reindex(self) -> None:
        self.country_by_label = {e.canonical_label: e for e in self.countries}
        self.province_by_label = {e.canonical_label: e for e in self.provinces}
        self.locality_by_key = {(e.canonical_label, e.parent_ref): e for e in self.localities}
        self.school_by_key = {(e.canonical_label, e.parent_ref): e for e in self.schools}
        self.schools_by_match_key: dict[str, list[ReferenceEntry]] = defaultdict(list)
        for e in self.schools:
            self.schools_by_match_key[self.match_key(e.canonical_label)].append(e)
        self.ids = {
            COUNTRY: {e.ref_id for e in self.countries},
            PROVINCE: {e.ref_id for e in self.provinces},
            LOCALITY: {e.ref_id for e in self.localities},
            SCHOOL: {e.ref_id for e in self.schools},
        }
        self.locality_by_id = {e.ref_id: e for e in self.localities}
        self.school_by_id = {e.ref_id: e for e in self.schools}

    def match_key(self, cleaned_name: str) -> str:
        return remove_stopwords(cleaned_name, self.stopwords)

    def table(self, kind: str) -> list[ReferenceEntry]:
        return {COUNTRY: self.countries, PROVINCE: self.provinces,
                LOCALITY: self.localities, SCHOOL: self.schools}[kind]

    def __len__(self) -> int:
        return len(self.countries) + len(self.provinces) + len(self.localities) + len(self.schools)

    def entries(self) -> list[ReferenceEntry]:
        return self.countries + self.provinces + self.localities + self.schools


def build_reference_tables(
    records: list[RawStudentRecord],
    synonyms: Synonyms | None = None,
    stopwords: frozenset[str] = DEFAULT_STOPWORDS,
) -> ReferenceTables:
    """Derive the four reference tables from the records' free-text fields.

    Distinct cleaned labels become entries once folded through the reference
    synonyms. Abbreviated labels (any token with a period) are never promoted
    to canonical entries; they wait for a correction in iteration 2.
    Localities are keyed by (name, province), schools by (name, locality,
    province) using the residence locality, where spellings that agree once
    stopwords are removed count as one name. Ids follow the lexicographic order
    of the keys, so they are independent of row order.
    """
    synonyms = synonyms or Synonyms()
    countries: dict[str, set[str]] = defaultdict(set)
    provinces: dict[str, set[str]] = defaultdict(set)
    localities: dict[tuple[str, str], set[str]] = defaultdict(set)
    schools: dict[tuple[str, str, str], set[str]] = defaultdict(set)
    spellings: dict[tuple[str, str, str], Counter] = defaultdict(Counter)

    for r in records:
        c_raw = r.value("country_birth")
        c = label_for(COUNTRY, c_raw, synonyms)
        if c:
            countries[c].add(c_raw)
        for loc_field, prov_field in (("locality_birth", "province_birth"),
                                      ("locality_residence", "province_residence")):
            p_raw = r.value(prov_field)
            p = label_for(PROVINCE, p_raw, synonyms)
            if not p:
                continue
            provinces[p].add(p_raw)
            l_raw = r.value(loc_field)
            loc = label_for(LOCALITY, l_raw, synonyms)
            if not loc:
                continue
            localities[(loc, p)].add(l_raw)
            if loc_field == "locality_residence":
                s_raw = r.value("school_name")
                s = clean_text(s_raw) if s_raw else ""
                key = remove_stopwords(s, stopwords)
                if key:
                    schools[(key, loc, p)].add(s_raw)
                    spellings[(key, loc, p)][s] += 1

    country_entries = [ReferenceEntry(i, label, COUNTRY, None, frozenset(v))
                       for i, (label, v) in enumerate(sorted(countries.items()), start=1)]
    province_entries = [ReferenceEntry(i, label, PROVINCE, None, frozenset(v))
                        for i, (label, v) in enumerate(sorted(provinces.items()), start=1)]
    prov_id = {e.canonical_label: e.ref_id for e in province_entries}
    locality_entries = [ReferenceEntry(i, loc, LOCALITY, prov_id[p], frozenset(v))
                        for i, ((loc, p), v) in enumerate(sorted(localities.items()), start=1)]
    loc_id = {(e.canonical_label, e.parent_ref): e.ref_id for e in locality_entries}
    # Spellings that differ only by stopwords ("esc. normal", "escuela normal")
    # are one school; the most frequent spelling becomes the label.
    labelled = []
    for (key, loc, p), v in schools.items():
        label = min(spellings[(key, loc, p)].items(), key=lambda kv: (-kv[1], kv[0]))[0]
        labelled.append(((label, loc, p), v))
    school_entries = [ReferenceEntry(i, s, SCHOOL, loc_id[(loc, prov_id[p])], frozenset(v))
                      for i, ((s, loc, p), v) in enumerate(sorted(labelled), start=1)]
    return ReferenceTables(country_entries, province_entries, locality_entries, school_entries, stopwords)


def write_reference_tables(out_dir: Path, tables: ReferenceTables) -> list[Path]:
    paths = []
    for kind in KINDS:
        path = out_dir / TABLE_FILES[kind]
        write_rows(path, REF_COLUMNS, (
            (e.ref_id, e.canonical_label, e.parent_ref, "|".join(sorted(e.variants)))
            for e in tables.table(kind)
        ))
        paths.append(path)
    return paths


def read_reference_tables(in_dir: Path, stopwords: frozenset[str] = DEFAULT_STOPWORDS) -> ReferenceTables:
    loaded = {}
    for kind in KINDS:
        entries = []
        with open(in_dir / TABLE_FILES[kind], newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                entries.append(ReferenceEntry(
                    int(row["ref_id"]), row["canonical_label"], kind,
                    int(row["parent_ref"]) if row["parent_ref"] else None,
                    frozenset(row["variants"].split("|")) if row["variants"] else frozenset(),
                ))
        loaded[kind] = entries
    return ReferenceTables(loaded[COUNTRY], loaded[PROVINCE], loaded[LOCALITY], loaded[SCHOOL], stopwords)
