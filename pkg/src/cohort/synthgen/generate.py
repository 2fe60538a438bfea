"""Synthetic raw registers with planted duplicates and decade-graded missingness."""

from __future__ import annotations

import csv
import logging
from collections import defaultdict
from dataclasses import asdict, dataclass, replace
from datetime import date, datetime
from pathlib import Path

import numpy as np
import yaml

from ..fields import FieldMapping, FieldMappingSet, LOGICAL_FIELDS
from ..identity import NamePack, char_units, edit_distance, levenshtein_similarity
from ..ids import sort_ids
from ..normalise.rules import DATA_MISSING, PRIVATE_RELIGIOUS, PRIVATE_SECULAR, UNKNOWN
from ..normalise.text import clean_text
from ..records import RawStudentRecord, count_censal, write_rows
from .config import (FAMILIES, ID_COLLISION, NAME_TWIN, STRONG_DNI, GroundTruth,
                     PlantedCluster, SynthConfig)
from .lexicon import (CIVIL_STATUS, CLUE_NOTE_TEMPLATES, COUNTRY, COUNTRY_VARIANTS, GIVEN,
                      PLAIN_NOTES, PROVINCE_BY_NAME, SURNAMES, School, build_school_catalogue,
                      school_variants, spelling_variants, strip_accents)
from .rng import SplitMix64, to_ppm

log = logging.getLogger(__name__)

NAME_THRESHOLD = 0.80

SOURCE_COLUMNS = {
    "person_id": "nro_alumno",
    "national_doc": "dni",
    "full_name": "apellido_nombre",
    "birth_date": "fecha_nac",
    "sex": "sexo",
    "civil_status": "estado_civil",
    "country_birth": "pais_nac",
    "province_birth": "provincia_nac",
    "locality_birth": "localidad_nac",
    "province_residence": "provincia_res",
    "locality_residence": "localidad_res",
    "school_name": "colegio",
    "school_type_raw_hint": "tipo_colegio",
    "intake_date": "fecha_ingreso",
    "entry_year": "anio_ingreso",
    "degree": "carrera",
}
AUX_COLUMNS = ("observaciones", "notas_legajo")
RAW_COLUMNS = tuple(SOURCE_COLUMNS[f] for f in LOGICAL_FIELDS) + AUX_COLUMNS
DATE_FORMATS = ("%Y-%m-%d", "%d/%m/%Y")

GT_COLUMNS = ("person_id", "true_person", "cluster_id", "cluster_family", "true_school_type",
              "true_missing", "entry_decade", "province_birth", "degree")

_IDENTITY_FIELDS = ("national_doc", "full_name", "birth_date", "sex",
                    "country_birth", "province_birth", "locality_birth")


def field_mapping() -> FieldMappingSet:
    maps = [FieldMapping(f, SOURCE_COLUMNS[f], f == "person_id") for f in LOGICAL_FIELDS]
    maps += [FieldMapping("auxiliary_text", c) for c in AUX_COLUMNS]
    return FieldMappingSet(tuple(maps), ",", DATE_FORMATS)


@dataclass
class _Person:
    slot: int
    decade: int
    entry_year: int
    degree: str
    province: str
    locality: str
    res_province: str
    res_locality: str
    sex: str
    name: str
    birth: date | None
    bad_birth_text: str | None = None
    documented: bool = True
    dni: str | None = None
    pid: str = ""
    intake: date | None = None
    missing: bool = False
    school: School | None = None


def _weighted_key(rng: SplitMix64, mix: dict):
    keys = list(mix)
    return rng.weighted(keys, [to_ppm(mix[k]) for k in keys])


def _render_name(rng: SplitMix64, sex: str, legacy: bool) -> str:
    s1, s2 = rng.choice(SURNAMES), rng.choice(SURNAMES)
    given = [rng.choice(GIVEN[sex])]
    if rng.chance(600_000):
        second = rng.choice(GIVEN[sex])
        if second != given[0]:
            given.append(second)
    name = f"{s1} {s2}, {' '.join(given)}"
    return strip_accents(name).upper() if legacy else name


def _typo(rng: SplitMix64, name: str, edits: int) -> str:
    """Apply ``edits`` single-letter substitutions, deletions or insertions."""
    letters = "abcdefghijklmnopqrstuvwxyz"
    for _ in range(100):
        out = list(name)
        for _ in range(edits):
            positions = [k for k, c in enumerate(out) if c.isalpha()]
            k = rng.choice(positions)
            upper = out[k].isupper()
            new = rng.choice(letters)
            new = new.upper() if upper else new
            op = rng.below(3)
            if op == 0:
                out[k] = new
            elif op == 1 and len(positions) > 4:
                del out[k]
            else:
                out.insert(k, new)
        candidate = "".join(out)
        d = edit_distance(char_units(clean_text(candidate)), char_units(clean_text(name)))
        if 1 <= d <= edits:
            return candidate
    raise RuntimeError("could not produce a typo")  # pragma: no cover


class _NameIndex:
    """Cleaned census names by birth year, for keeping accidental look-alikes out."""

    def __init__(self):
        self.by_year: dict[int, dict[str, tuple[list[str], bool]]] = defaultdict(dict)
        self._packs: dict[int, tuple] = {}
        self.vocab: dict[str, int] = {}

    def put(self, pid: str, name: str, year: int | None, documented: bool) -> None:
        if year is None:
            return
        self.by_year[year][pid] = (char_units(clean_text(name)), documented)
        self._packs.pop(year, None)

    def drop(self, pid: str, year: int | None) -> None:
        if year is not None and self.by_year[year].pop(pid, None) is not None:
            self._packs.pop(year, None)

    def _pack(self, year: int):
        if year not in self._packs:
            entries = self.by_year[year]
            ids = list(entries)
            pack = NamePack([entries[i][0] for i in ids], self.vocab)
            documented = np.array([entries[i][1] for i in ids], dtype=bool)
            self._packs[year] = (pack, ids, documented)
        return self._packs[year]

    def clashes(self, name: str, year: int | None, exclude=(), undocumented_only: bool = False) -> bool:
        """True when some other name that year is more similar than the merge threshold."""
        if year is None or not self.by_year.get(year):
            return False
        units = char_units(clean_text(name))
        if not units:
            return False
        pack, ids, documented = self._pack(year)
        longest = np.maximum(np.maximum(pack.lengths, len(units)), 1)
        keep = 1.0 - pack.lower_bound(units) / longest > NAME_THRESHOLD
        if undocumented_only:
            keep &= ~documented
        rows = [r for r in np.nonzero(keep)[0].tolist() if ids[r] not in exclude]
        if not rows:
            return False
        dist = pack.distances(units, np.array(rows))
        return bool(np.any(1.0 - dist / longest[rows] > NAME_THRESHOLD))


def _pick_locality(rng: SplitMix64, province: str) -> str:
    locs = PROVINCE_BY_NAME[province].localities
    return rng.weighted([loc.name for loc in locs], [loc.weight for loc in locs])


def _geo_text(rng: SplitMix64, label: str, abbreviations, variant_ppm: int) -> str:
    if rng.chance(variant_ppm):
        return rng.choice(spelling_variants(label, abbreviations))
    return label


def _draw_people(cfg: SynthConfig, rng: SplitMix64) -> list[_Person]:
    people = []
    for slot in range(cfg.population_size):
        decade = _weighted_key(rng, cfg.decade_mix)
        entry_year = decade + rng.below(10)
        degree = _weighted_key(rng, cfg.degree_mix)
        province = _weighted_key(rng, cfg.province_mix)
        locality = _pick_locality(rng, province)
        if province != cfg.majority_province and rng.chance(to_ppm(cfg.moved_to_majority_rate)):
            res_province = cfg.majority_province
            res_locality = _pick_locality(rng, res_province)
        else:
            res_province, res_locality = province, locality
        sex = rng.choice(("F", "M", "M"))
        birth = date(entry_year - 17 - rng.weighted(range(7), [30, 25, 15, 10, 8, 7, 5]),
                     1 + rng.below(12), 1 + rng.below(28))
        p = _Person(slot, decade, entry_year, degree, province, locality, res_province, res_locality,
                    sex, _render_name(rng, sex, entry_year < 2000), birth)
        if rng.chance(to_ppm(cfg.bad_date_rate)):
            p.bad_birth_text = rng.choice(("00/00/0000", "31/02/" + str(birth.year), "s/d"))
        p.documented = not rng.chance(to_ppm(cfg.no_dni_rate))
        p.intake = date(entry_year, 2 + rng.below(2), 1 + rng.below(28))
        people.append(p)
    return people


def _assign_ids(people: list[_Person], rng: SplitMix64) -> None:
    next_id = 10_000
    for p in sorted(people, key=lambda p: (p.entry_year, p.intake, p.slot)):
        next_id += 1 + rng.below(3)
        p.pid = str(next_id)


def _assign_documents(people: list[_Person], rng: SplitMix64, used: set[str]) -> None:
    for p in people:
        if p.documented:
            p.dni = _fresh_dni(rng, p.birth.year if p.birth else 1970, used)


def _fresh_dni(rng: SplitMix64, birth_year: int, used: set[str]) -> str:
    while True:
        dni = str(5_000_000 + max(0, birth_year - 1950) * 600_000 + rng.below(600_000))
        if dni not in used:
            used.add(dni)
            return dni


def _legacy_score(cfg: SynthConfig):
    provinces = list(cfg.province_legacy_order)
    degrees = list(cfg.degree_legacy_order)

    # Additive score: province dominates, degree orders within a province.
    def score(p: _Person) -> int:
        return 10 * (len(provinces) - provinces.index(p.province)) + (len(degrees) - degrees.index(p.degree))
    return score


def _allocate_missing(people: list[_Person], cfg: SynthConfig, rng: SplitMix64) -> None:
    """Mark exactly round(rate * n) persons per decade, highest legacy score first."""
    score = _legacy_score(cfg)
    by_decade: dict[int, list[_Person]] = defaultdict(list)
    for p in people:
        by_decade[p.decade].append(p)
    for decade in sorted(by_decade):
        group = by_decade[decade]
        need = (to_ppm(cfg.missing_rate_by_decade[decade]) * len(group) + 500_000) // 1_000_000
        cells: dict[int, list[_Person]] = defaultdict(list)
        for p in group:
            cells[score(p)].append(p)
        for s in sorted(cells, reverse=True):
            if need <= 0:
                break
            members = sorted(cells[s], key=lambda p: int(p.pid))
            chosen = members if len(members) <= need else rng.sample(members, need)
            for p in chosen:
                p.missing = True
            need -= len(chosen)


def _choose_school(p: _Person, cfg: SynthConfig, rng: SplitMix64, catalogue) -> School:
    schools = catalogue[(p.res_province, p.res_locality)]
    generic = [s for s in schools if s.generic]
    unknown = [s for s in schools if s.true_type == UNKNOWN and not s.generic]
    regular = [s for s in schools if not s.generic and s.true_type != UNKNOWN]
    if generic and rng.chance(to_ppm(cfg.multi_campus_rate)):
        return rng.choice(generic)
    if unknown and rng.chance(to_ppm(cfg.unknown_school_rate)):
        return rng.choice(unknown)
    return rng.choice(regular)


def _hint(school: School | None) -> str:
    if school is None:
        return "nan"
    if school.true_type in (PRIVATE_RELIGIOUS, PRIVATE_SECULAR):
        return "PRIV"
    if school.true_type == UNKNOWN:
        return ""
    return "EST"


def _row(p: _Person, cfg: SynthConfig, rng: SplitMix64, catalogue) -> dict[str, str]:
    vppm = to_ppm(cfg.variant_rate)
    legacy = p.entry_year < 2000
    prov_b = PROVINCE_BY_NAME[p.province]
    prov_r = PROVINCE_BY_NAME[p.res_province]
    loc_b = next(loc for loc in prov_b.localities if loc.name == p.locality)
    loc_r = next(loc for loc in prov_r.localities if loc.name == p.res_locality)
    if p.bad_birth_text:
        birth = p.bad_birth_text
    elif p.birth is None:
        birth = ""
    else:
        birth = p.birth.strftime("%d/%m/%Y") if legacy else p.birth.isoformat()
    if p.missing:
        school = rng.weighted(("nan", "", "NULL"), (85, 10, 5))
        civil = "" if rng.chance(500_000) else rng.choice(CIVIL_STATUS)
    else:
        school = p.school.name
        if rng.chance(vppm):
            school = rng.choice(school_variants(school) or (school,))
        civil = rng.choice(CIVIL_STATUS)
    return {
        "person_id": p.pid,
        "national_doc": p.dni if p.dni else rng.choice(("", "nan")),
        "full_name": p.name,
        "birth_date": birth,
        "sex": p.sex,
        "civil_status": civil,
        "country_birth": rng.choice(COUNTRY_VARIANTS) if rng.chance(vppm) else COUNTRY,
        "province_birth": _geo_text(rng, prov_b.name, prov_b.abbreviations, vppm),
        "locality_birth": _geo_text(rng, loc_b.name, loc_b.abbreviations, vppm),
        "province_residence": _geo_text(rng, prov_r.name, prov_r.abbreviations, vppm),
        "locality_residence": _geo_text(rng, loc_r.name, loc_r.abbreviations, vppm),
        "school_name": school,
        "school_type_raw_hint": _hint(None if p.missing else p.school),
        "intake_date": p.intake.isoformat(),
        "entry_year": str(p.entry_year),
        "degree": p.degree,
    }


def _record(raw: dict[str, str], notes: tuple[str, ...], birth: date | None, intake: date | None) -> RawStudentRecord:
    return RawStudentRecord(row_number=0, raw={f: raw.get(f, "") for f in LOGICAL_FIELDS},
                            auxiliary_texts=notes, birth_date=birth, intake_date=intake)


def _parsed_birth(text: str) -> date | None:
    for fmt in DATE_FORMATS:
        try:
            return datetime.strptime(text.strip(), fmt).date()
        except ValueError:
            continue
    return None


def generate_population(config: SynthConfig) -> tuple[list[RawStudentRecord], GroundTruth]:
    """Draw persons, allocate structural missingness and render their raw rows.

    Each person id gets one primary row plus, sometimes, sparser repeat forms
    from later intakes. Output order is person id order (repeats follow).
    """
    root = SplitMix64(config.seed)
    people = _draw_people(config, root.split("people"))
    _assign_ids(people, root.split("ids"))
    used_dni: set[str] = set()
    _assign_documents(people, root.split("documents"), used_dni)
    _allocate_missing(people, config, root.split("missing"))

    catalogue = build_school_catalogue()
    schools_rng = root.split("schools")
    for p in people:
        if not p.missing:
            p.school = _choose_school(p, config, schools_rng, catalogue)

    # Undocumented people must not resemble anyone born the same year; redraw until they do not.
    names_rng = root.split("names")
    index = _NameIndex()
    for p in people:
        index.put(p.pid, p.name, p.birth.year if p.birth and not p.bad_birth_text else None, p.documented)
    for p in people:
        year = p.birth.year if p.birth and not p.bad_birth_text else None
        if p.documented or year is None:
            continue
        tries = 0
        while index.clashes(p.name, year, exclude={p.pid}):
            p.name = _render_name(names_rng, p.sex, p.entry_year < 2000)
            index.put(p.pid, p.name, year, False)
            tries += 1
            if tries > 200:  # pragma: no cover
                raise RuntimeError("name space too small to keep undocumented names apart")

    rows_rng = root.split("rows")
    notes_rng = root.split("notes")
    repeat_ppm = to_ppm(config.repeat_form_rate)
    clue_ppm = to_ppm(config.clue_plant_rate)
    records: list[RawStudentRecord] = []
    gt = GroundTruth()
    for p in sorted(people, key=lambda p: int(p.pid)):
        raw = _row(p, config, rows_rng, catalogue)
        notes = [notes_rng.choice(PLAIN_NOTES), notes_rng.choice(PLAIN_NOTES)]
        if p.missing and notes_rng.chance(clue_ppm):
            local = [s for s in catalogue[(p.res_province, p.res_locality)] if s.true_type != UNKNOWN]
            notes[0] = notes_rng.choice(CLUE_NOTE_TEMPLATES).format(school=notes_rng.choice(local).name)
            gt.planted_clues[p.pid] = notes[0]
        birth = _parsed_birth(raw["birth_date"])
        primary = _record(raw, tuple(notes), birth, p.intake)
        records.append(primary)
        if rows_rng.chance(repeat_ppm):
            records.append(_repeat_form(primary, rows_rng))
        gt.true_missing[p.pid] = int(p.missing)
        gt.true_school_type[p.pid] = DATA_MISSING if p.missing else p.school.true_type
        gt.true_person[p.pid] = p.pid
        gt.attributes[p.pid] = {"entry_decade": p.decade, "province_birth": p.province, "degree": p.degree,
                                "birth_year": birth.year if birth else None}
    gt.true_person_count = len(people)
    gt.used_documents = used_dni
    return records, gt


def _repeat_form(primary: RawStudentRecord, rng: SplitMix64) -> RawStudentRecord:
    """A later, sparser copy of the same person's form (never the most complete)."""
    droppable = [f for f in ("civil_status", "sex", "locality_residence", "province_residence",
                             "locality_birth", "school_type_raw_hint", "school_name")
                 if primary.present(f)]
    raw = dict(primary.raw)
    for f in rng.sample(droppable, 1 + rng.below(min(3, len(droppable)))):
        raw[f] = ""
    intake = primary.intake_date
    later = date(intake.year + 1 + rng.below(5), intake.month, intake.day)
    raw["intake_date"] = later.isoformat()
    return replace(primary, raw=raw, intake_date=later)


def _primary_rows(records: list[RawStudentRecord]) -> dict[str, int]:
    best: dict[str, int] = {}
    for k, r in enumerate(records):
        pid = r.person_id_original
        if pid not in best or count_censal(r) > count_censal(records[best[pid]]):
            best[pid] = k
    return best


def inject_duplicates(records: list[RawStudentRecord], ground_truth: GroundTruth,
                      config: SynthConfig) -> list[RawStudentRecord]:
    """Plant the three audit families (plus one-id collisions) and record them.

    About ``duplicate_rate`` x persons clusters are planted. Each takes an
    unused target id and rewrites its identity fields from an unused source id
    born in the same province, so the missingness allocation is untouched.
    """
    if config.duplicate_rate == 0 or not records:
        return records
    rng = SplitMix64(config.seed).split("duplicates")
    records = list(records)
    primary = _primary_rows(records)
    rows_of: dict[str, list[int]] = defaultdict(list)
    for k, r in enumerate(records):
        rows_of[r.person_id_original].append(k)
    pids = sort_ids(primary)
    by_province: dict[str, list[str]] = defaultdict(list)
    for pid in pids:
        by_province[ground_truth.attributes[pid]["province_birth"]].append(pid)

    index = _NameIndex()
    for pid in pids:
        r = records[primary[pid]]
        index.put(pid, r.raw["full_name"], r.birth_year, bool(r.national_doc))

    used: set[str] = set()
    family_keys = [f for f in FAMILIES if config.family_mix.get(f, 0) > 0]
    family_weights = [to_ppm(config.family_mix[f]) for f in family_keys]
    targets = [pid for pid in pids if rng.chance(to_ppm(config.duplicate_rate))]
    cluster_id = 0

    def rewrite(pid: str, **values) -> None:
        for k in rows_of[pid]:
            raw = dict(records[k].raw)
            raw.update(values)
            birth = _parsed_birth(raw["birth_date"]) if raw["birth_date"] else None
            records[k] = replace(records[k], raw=raw, birth_date=birth)

    for j in targets:
        if j in used:
            continue
        family = rng.weighted(family_keys, family_weights)
        rj = records[primary[j]]
        if family == ID_COLLISION:
            used.add(j)
            cluster_id += 1
            records.append(_collision_row(rj, rng, ground_truth))
            ground_truth.duplicate_clusters.append(PlantedCluster(cluster_id, family, (j,)))
            ground_truth.true_person_count += 1
            continue

        province = ground_truth.attributes[j]["province_birth"]
        candidates = [i for i in by_province[province] if i != j and i not in used]
        planted = False
        for _ in range(40):
            if not candidates:
                break
            i = rng.choice(candidates)
            ri = records[primary[i]]
            if not ri.national_doc or ri.birth_year is None or not rj.national_doc:
                continue
            identity = {f: ri.raw[f] for f in _IDENTITY_FIELDS}
            if family == STRONG_DNI:
                name = _typo(rng, ri.raw["full_name"], 1 + int(rng.chance(to_ppm(config.name_typo_rate))))
                if index.clashes(name, ri.birth_year, exclude={i, j}, undocumented_only=True):
                    continue
                identity["full_name"] = name
            elif family == NAME_TWIN:
                name = _typo(rng, ri.raw["full_name"], 1 + int(rng.chance(to_ppm(config.name_typo_rate))))
                if index.clashes(name, ri.birth_year, exclude={i, j}):
                    continue
                identity["full_name"] = name
                identity["national_doc"] = ""
            else:  # AMBIGUOUS_DNI: the document was mistyped onto someone else
                identity = {"national_doc": ri.raw["national_doc"]}
                if clean_text(rj.raw["full_name"]) == clean_text(ri.raw["full_name"]):
                    continue
                if levenshtein_similarity(clean_text(rj.raw["full_name"]),
                                          clean_text(ri.raw["full_name"])) > NAME_THRESHOLD - 0.1:
                    continue
            index.drop(j, rj.birth_year)
            rewrite(j, **identity)
            rj = records[primary[j]]
            index.put(j, rj.raw["full_name"], rj.birth_year, bool(rj.national_doc))
            used.update((i, j))
            cluster_id += 1
            ground_truth.duplicate_clusters.append(PlantedCluster(cluster_id, family, tuple(sort_ids((i, j)))))
            if family in (STRONG_DNI, NAME_TWIN):
                ground_truth.true_person[j] = ground_truth.true_person[i]
                ground_truth.true_person_count -= 1
            planted = True
            break
        if not planted:
            log.debug("no source found for planted %s on %s", family, j)
    return records


def _collision_row(rj: RawStudentRecord, rng: SplitMix64, gt: GroundTruth) -> RawStudentRecord:
    """A sparse form of a different person that was keyed under an existing id."""
    sex = rng.choice(("F", "M"))
    year = (rj.entry_year or 2000) - 18
    while True:
        name = _render_name(rng, sex, (rj.entry_year or 2000) < 2000)
        if clean_text(name) != clean_text(rj.raw["full_name"]):
            break
    birth = date(year, 1 + rng.below(12), 1 + rng.below(28))
    intake = date((rj.entry_year or 2000) + 2, 3, 1 + rng.below(28))
    raw = {f: "" for f in LOGICAL_FIELDS}
    raw.update(person_id=rj.person_id_original, national_doc=_fresh_dni(rng, year, gt.used_documents),
               full_name=name, birth_date=birth.isoformat(), sex=sex, intake_date=intake.isoformat())
    return _record(raw, ("", ""), birth, intake)


def synthesize(config: SynthConfig) -> tuple[list[RawStudentRecord], GroundTruth]:
    """Population, planted duplicates, then a seeded shuffle of the rows."""
    records, gt = generate_population(config)
    records = inject_duplicates(records, gt, config)
    SplitMix64(config.seed).split("order").shuffle(records)
    return [replace(r, row_number=k) for k, r in enumerate(records, start=1)], gt


def write_synthetic(out_dir: str | Path, records: list[RawStudentRecord], gt: GroundTruth,
                    config: SynthConfig) -> dict[str, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "raw": out_dir / "synthetic_raw.csv",
        "ground_truth": out_dir / "ground_truth.csv",
        "config": out_dir / "field_mapping.yaml",
        "synth_config": out_dir / "synth_config.yaml",
    }
    write_rows(paths["raw"], RAW_COLUMNS, (
        [r.raw[f] for f in LOGICAL_FIELDS] + list(r.auxiliary_texts) for r in records
    ))
    cluster_of = {}
    for c in gt.duplicate_clusters:
        for m in c.member_ids:
            cluster_of[m] = c
    write_rows(paths["ground_truth"], GT_COLUMNS, (
        (pid, gt.true_person[pid],
         cluster_of[pid].cluster_id if pid in cluster_of else "",
         cluster_of[pid].family if pid in cluster_of else "",
         gt.true_school_type[pid], gt.true_missing[pid],
         gt.attributes[pid]["entry_decade"], gt.attributes[pid]["province_birth"],
         gt.attributes[pid]["degree"])
        for pid in sort_ids(gt.true_person)
    ))
    paths["config"].write_text(field_mapping().to_yaml(), encoding="utf-8")
    paths["synth_config"].write_text(yaml.safe_dump(config_doc(config), sort_keys=False, allow_unicode=True),
                                     encoding="utf-8")
    return paths


def config_doc(config: SynthConfig) -> dict:
    doc = asdict(config)
    for key in ("province_legacy_order", "degree_legacy_order"):
        doc[key] = list(doc[key])
    return doc


def read_ground_truth(path: str | Path) -> GroundTruth:
    gt = GroundTruth()
    clusters: dict[int, list[str]] = defaultdict(list)
    families: dict[int, str] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            pid = row["person_id"]
            gt.true_person[pid] = row["true_person"]
            gt.true_school_type[pid] = row["true_school_type"]
            gt.true_missing[pid] = int(row["true_missing"])
            gt.attributes[pid] = {"entry_decade": int(row["entry_decade"]),
                                  "province_birth": row["province_birth"], "degree": row["degree"]}
            if row["cluster_id"]:
                clusters[int(row["cluster_id"])].append(pid)
                families[int(row["cluster_id"])] = row["cluster_family"]
    gt.duplicate_clusters = [PlantedCluster(c, families[c], tuple(sort_ids(m))) for c, m in sorted(clusters.items())]
    gt.true_person_count = len(set(gt.true_person.values())) + len(gt.clusters_of(ID_COLLISION))
    return gt


