import random
import unicodedata

import pytest

from cohort.errors import InvalidConfig
from cohort.normalise.iterations import (NEEDS_REVIEW, OK, RAW_V2, excavate_school_clues, iteration1_merge,
                                         iteration2_refine, iteration3_partition)
from cohort.normalise.reference import (COUNTRY, LOCALITY, PROVINCE, SCHOOL, build_reference_tables,
                                        load_synonyms, read_reference_tables, write_reference_tables)
from cohort.normalise.rules import (DATA_MISSING, PRIVATE_RELIGIOUS, PRIVATE_SECULAR, STATE_NATIONAL,
                                    STATE_PROVINCIAL, UNKNOWN, classify_school_type, load_rules, parse_rules)
from cohort.normalise.text import clean_text, match_tokens, remove_stopwords
from cohort.records import ResolvedRecord
from conftest import make_record

RULES = load_rules()
SYNONYMS = load_synonyms()

GOLDEN = [
    ("Colegio Nacional de Buenos Aires", STATE_NATIONAL),
    ("Instituto Nacional", STATE_NATIONAL),
    ("ESCUELA NACIONAL DE COMERCIO", STATE_NATIONAL),
    ("Colegio Nacional San Martín", STATE_NATIONAL),
    ("ENET N 1", STATE_NATIONAL),
    ("E.N.E.T. Nº 1", STATE_NATIONAL),
    ("CENS 45", STATE_NATIONAL),
    ("Escuela Normal Superior", STATE_NATIONAL),
    ("e.p.e.t.", STATE_PROVINCIAL),
    ("E.P.E.T. N° 3", STATE_PROVINCIAL),
    ("EPET 5", STATE_PROVINCIAL),
    ("Escuela Provincial 12", STATE_PROVINCIAL),
    ("Escuela Técnica 2", STATE_PROVINCIAL),
    ("Escuela Provincia de Salta", STATE_PROVINCIAL),
    ("Colegio San José", PRIVATE_RELIGIOUS),
    ("Santa Rosa de Lima", PRIVATE_RELIGIOUS),
    ("Colegio La Salle", PRIVATE_RELIGIOUS),
    ("Instituto Santo Tomás", PRIVATE_RELIGIOUS),
    ("Escuela Técnica San Cayetano", PRIVATE_RELIGIOUS),
    ("Sagrado Corazón", PRIVATE_RELIGIOUS),
    ("Escuela Parroquial", PRIVATE_RELIGIOUS),
    ("Nuestra Señora del Valle", PRIVATE_RELIGIOUS),
    ("CRISTO REY", PRIVATE_RELIGIOUS),
    ("María Auxiliadora", PRIVATE_RELIGIOUS),
    ("Instituto Belgrano", PRIVATE_SECULAR),
    ("Instituto", PRIVATE_SECULAR),
    ("Academia Pitman", PRIVATE_SECULAR),
    ("Colegio Bilingüe del Sol", PRIVATE_SECULAR),
    ("Escuela Privada Sarmiento", PRIVATE_SECULAR),
    ("Colegio del Sol", UNKNOWN),
    ("Escuela 25 de Mayo", UNKNOWN),
    ("Sanatorio", UNKNOWN),
    ("Nacionalidad", UNKNOWN),
    ("", UNKNOWN),
]


def resolved(pid, **fields):
    r = make_record(pid, **fields)
    return ResolvedRecord(row_number=r.row_number, raw=r.raw, auxiliary_texts=r.auxiliary_texts,
                          birth_date=r.birth_date, intake_date=r.intake_date, non_null_count=r.non_null_count,
                          person_id_canonical=str(pid), resolution_status="AUTO_UNIQUE")


def fuzz_corpus(n=10_000, seed=7):
    rng = random.Random(seed)
    alphabet = ("abcXYZ ñÑáÉüİẞǅﬁ.,;-°º\t\n  " + "́̈̃" + "ΣσςĲ")
    return [" " * rng.randint(0, 2) + "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 24)))
            for _ in range(n)]


def test_clean_text_examples():
    assert clean_text("  SAN   Miguel de Tucumán ") == "san miguel de tucuman"
    assert clean_text("Muñoz") == "munoz"
    assert clean_text(None) == ""


def test_clean_text_idempotent_on_fuzz_corpus():
    for s in fuzz_corpus():
        once = clean_text(s)
        assert clean_text(once) == once, repr(s)
        assert once == once.strip() and "  " not in once
        assert not any(unicodedata.combining(ch) for ch in once)


def test_remove_stopwords_idempotent_on_fuzz_corpus():
    stop = RULES.stopwords
    for s in fuzz_corpus(seed=8):
        once = remove_stopwords(clean_text(s), stop)
        assert remove_stopwords(once, stop) == once


def test_stopword_removal_ignores_punctuation():
    assert remove_stopwords("esc. normal colegio 3") == "normal 3"


def test_match_tokens_folds_dotted_abbreviations():
    assert match_tokens("e.p.e.t. n° 3") == ["epet", "n", "3"]


@pytest.mark.parametrize("name,expected", GOLDEN)
def test_golden_classification(name, expected):
    assert classify_school_type(clean_text(name), RULES.all_rules) == expected


def test_supplementary_rules_only_with_extra_set():
    assert classify_school_type("escuela normal mixta", RULES.rules) == UNKNOWN
    assert classify_school_type("escuela normal mixta", RULES.all_rules) == STATE_NATIONAL


def test_classification_invariant_under_rule_order():
    rng = random.Random(1)
    shuffled = list(RULES.all_rules)
    for _ in range(20):
        rng.shuffle(shuffled)
        for name, expected in GOLDEN:
            assert classify_school_type(clean_text(name), shuffled) == expected


def test_rule_file_validation():
    with pytest.raises(InvalidConfig):
        parse_rules({"rules": [{"rank": 1, "target": "STATE_NATIONAL", "patterns": ["a"]},
                               {"rank": 1, "target": "PRIVATE_SECULAR", "patterns": ["b"]}]})
    with pytest.raises(InvalidConfig):
        parse_rules({"rules": [{"rank": 1, "target": "DATA_MISSING", "patterns": ["a"]}]})
    with pytest.raises(InvalidConfig):
        parse_rules({"rules": [{"rank": 1, "target": "STATE_NATIONAL", "patterns": []}]})
    with pytest.raises(InvalidConfig):
        parse_rules({"rules": "nacional"})


def geo(**extra):
    base = dict(country_birth="Argentina", province_birth="Tucumán", locality_birth="San Miguel de Tucumán",
                province_residence="Tucumán", locality_residence="San Miguel de Tucumán")
    base.update(extra)
    return base


@pytest.fixture
def town_records():
    return [
        resolved(1, school_name="Escuela Normal", **geo()),
        resolved(2, school_name="Esc. Normal", **geo()),
        resolved(3, school_name="Colegio San José", **geo(province_birth="Tuc.",
                                                        locality_birth="S.M. de Tucuman")),
        resolved(4, school_name="nan", aux=("egresado del Colegio San José",), **geo()),
        resolved(5, school_name="NaN", **geo(country_birth="Rep. Argentina")),
        resolved(6, school_name="Instituto Belgrano", **geo(province_residence="Salta",
                                                          locality_residence="Salta")),
    ]


def test_reference_ids_dense_and_lexicographic(town_records):
    refs = build_reference_tables(town_records, SYNONYMS, RULES.stopwords)
    for kind in (COUNTRY, PROVINCE, LOCALITY, SCHOOL):
        table = refs.table(kind)
        assert [e.ref_id for e in table] == list(range(1, len(table) + 1))
    assert [e.canonical_label for e in refs.countries] == ["argentina"]
    assert [e.canonical_label for e in refs.provinces] == ["salta", "tucuman"]
    # Abbreviated labels are never promoted.
    assert all("." not in e.canonical_label for e in refs.entries() if e.kind != SCHOOL)
    keys = [(e.canonical_label, e.parent_ref) for e in refs.localities]
    prov = {e.ref_id: e.canonical_label for e in refs.provinces}
    assert keys == sorted(keys, key=lambda k: (k[0], prov[k[1]]))


def test_reference_tables_ignore_row_order(town_records):
    shuffled = town_records[::-1]
    a = build_reference_tables(town_records, SYNONYMS, RULES.stopwords)
    b = build_reference_tables(shuffled, SYNONYMS, RULES.stopwords)
    assert a.entries() == b.entries()


def test_reference_tables_round_trip(tmp_path, town_records):
    refs = build_reference_tables(town_records, SYNONYMS, RULES.stopwords)
    write_reference_tables(tmp_path, refs)
    assert read_reference_tables(tmp_path, RULES.stopwords).entries() == refs.entries()


def run_iterations(records, adopted=frozenset()):
    refs = build_reference_tables(records, SYNONYMS, RULES.stopwords)
    v1 = iteration1_merge(records, refs, SYNONYMS, RULES)
    v2 = iteration2_refine(v1, refs, SYNONYMS, RULES)
    v3, clues = iteration3_partition(v2, refs, RULES, adopted)
    return refs, v1, v2, v3, clues


def by_id(rows):
    return {r.person_id_original: r for r in rows}


def test_multi_campus_name_resolves_by_locality():
    records = [resolved(1, school_name="Escuela Normal", **geo()),
               resolved(2, school_name="Escuela Normal", **geo(locality_residence="Tafí Viejo"))]
    refs, v1, v2, _, _ = run_iterations(records)
    assert len(refs.schools) == 2
    assert [r.school_flag for r in v1] == [NEEDS_REVIEW, NEEDS_REVIEW]
    assert [r.school_flag for r in v2] == [OK, OK]
    assert v2[0].school_id != v2[1].school_id


def test_iterations_on_small_town(town_records):
    refs, v1, v2, v3, clues = run_iterations(town_records)
    one, two, three = by_id(v1), by_id(v2), by_id(v3)
    # Stopword-only spelling differences join one school per locality.
    assert one["1"].school_flag == OK and one["1"].school_id == one["2"].school_id
    # The abbreviated birth place waits for the iteration-2 correction.
    assert one["3"].geo_flag == NEEDS_REVIEW and two["3"].geo_flag == OK
    assert one["5"].geo_flag == OK  # reference synonym applies from the start
    # The OK set only grows.
    assert {p for p, r in one.items() if r.fully_ok} <= {p for p, r in two.items() if r.fully_ok}
    for pid in ("4", "5"):
        assert two[pid].school_type_raw == DATA_MISSING
        assert three[pid].school_type_final == DATA_MISSING
        assert three[pid].school_info_source == DATA_MISSING
    assert three["3"].school_type_final == PRIVATE_RELIGIOUS
    assert three["6"].school_info_source == RAW_V2
    assert [c.person_id_original for c in clues] == ["4"]


def test_clue_changes_nothing_until_adopted(town_records):
    *_, v3, _ = run_iterations(town_records)
    assert by_id(v3)["4"].school_type_final == DATA_MISSING
    *_, adopted_v3, _ = run_iterations(town_records, adopted=frozenset({"4"}))
    rec = by_id(adopted_v3)["4"]
    assert rec.school_info_source == RAW_V2
    assert rec.school_type_final == PRIVATE_RELIGIOUS


def test_excavation_is_read_only(town_records):
    refs, _, v2, _, _ = run_iterations(town_records)
    rec = by_id(v2)["4"]
    before = (rec.raw.copy(), rec.auxiliary_texts)
    clue = excavate_school_clues(rec, refs, RULES)
    assert clue.source_field == "auxiliary_text[0]"
    assert (rec.raw, rec.auxiliary_texts) == before


def test_referential_integrity(town_records):
    refs, _, _, v3, _ = run_iterations(town_records)
    for r in v3:
        for field, kind in (("country_birth_id", COUNTRY), ("province_birth_id", PROVINCE),
                            ("locality_birth_id", LOCALITY), ("province_residence_id", PROVINCE),
                            ("locality_residence_id", LOCALITY), ("school_id", SCHOOL)):
            value = getattr(r, field)
            assert value is None or value in refs.ids[kind]
    for loc in refs.localities:
        assert loc.parent_ref in refs.ids[PROVINCE]
    for school in refs.schools:
        assert school.parent_ref in refs.ids[LOCALITY]
