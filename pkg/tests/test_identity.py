import random
import unicodedata
from datetime import date

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohort.census import consolidate_persons
from cohort.errors import UnmappedId
from cohort.fields import load_config
from cohort.identity import (AUTO_MERGED, AUTO_UNIQUE, DNI_DUPLICATE, ID_COLLISION, NAME_BIRTH_MATCH,
                             NEEDS_REVIEW, NONE, NamePack, apply_aliases, audit_identities, char_units,
                             edit_distance, levenshtein_similarity, regroup_by_canonical, resolve_canonical)
from cohort.ingest import ingest_raw
from conftest import make_record, synth_to_dir

BORN = date(1975, 6, 1)


def test_named_similarity_examples(oracle):
    for a, b, sim in oracle["named_similarity"]:
        assert levenshtein_similarity(a, b) == pytest.approx(sim, abs=1e-12), (a, b)


def test_random_pairs_match_grapheme_oracle(oracle):
    for a, b, dist, sim in oracle["random_pairs"]:
        assert edit_distance(char_units(a), char_units(b)) == dist
        assert levenshtein_similarity(a, b) == pytest.approx(sim, abs=1e-12)


def test_combining_accent_is_one_character():
    decomposed = unicodedata.normalize("NFD", "muñoz")
    assert len(char_units(decomposed)) == 5
    assert levenshtein_similarity(decomposed, "munoz") == pytest.approx(0.8)


def test_bounded_distance_is_exact_up_to_bound():
    rng = random.Random(3)
    for _ in range(300):
        a = "".join(rng.choice("abc") for _ in range(rng.randint(0, 9)))
        b = "".join(rng.choice("abc") for _ in range(rng.randint(0, 9)))
        d = edit_distance(a, b)
        for bound in range(0, 6):
            assert edit_distance(a, b, bound) == (d if d <= bound else bound + 1)


words = st.text(alphabet="abcñé ", max_size=12)


@settings(max_examples=200, deadline=None)
@given(words, words, words)
def test_metric_properties(a, b, c):
    assert edit_distance(a, a) == 0
    assert edit_distance(a, b) == edit_distance(b, a)
    assert edit_distance(a, c) <= edit_distance(a, b) + edit_distance(b, c)
    assert 0.0 <= levenshtein_similarity(a, b) <= 1.0
    assert levenshtein_similarity(a, b) == levenshtein_similarity(b, a)


@settings(max_examples=100, deadline=None)
@given(st.lists(words.filter(bool), min_size=1, max_size=12), words)
def test_namepack_distances_are_exact(names, query):
    units = [char_units(n) for n in names]
    pack = NamePack(units)
    rows = list(range(len(names)))
    got = pack.distances(char_units(query), rows).tolist()
    assert got == [edit_distance(char_units(query), u) for u in units]
    assert all(pack.lower_bound(char_units(query)) <= got)


def test_same_document_typo_merges_to_earliest_id():
    recs = [make_record(120, national_doc="20111222", full_name="Gimenez Ana", birth=BORN),
            make_record(57, national_doc="20111222", full_name="Gimenez Anna", birth=BORN),
            make_record(300, national_doc="30999888", full_name="Lopez Raul", birth=BORN)]
    clusters = audit_identities(recs)
    assert [c.member_ids for c in clusters] == [("57", "120"), ("300",)]
    assert clusters[0].kind == DNI_DUPLICATE and clusters[1].kind == NONE
    aliases = resolve_canonical(clusters)
    table = {a.person_id_original: (a.person_id_canonical, a.resolution_status) for a in aliases}
    assert table == {"57": ("57", AUTO_MERGED), "120": ("57", AUTO_MERGED), "300": ("300", AUTO_UNIQUE)}


def test_shared_document_with_different_names_goes_to_review():
    recs = [make_record(1, national_doc="20111222", full_name="Gimenez Ana", birth=BORN),
            make_record(2, national_doc="20111222", full_name="Sosa Roberto", birth=BORN)]
    aliases = resolve_canonical(audit_identities(recs))
    assert {a.resolution_status for a in aliases} == {NEEDS_REVIEW}
    assert all(a.person_id_canonical == a.person_id_original for a in aliases)


def test_name_birth_match_needs_an_undocumented_side():
    twins = [make_record(1, full_name="Jimenez Maria", birth=BORN),
             make_record(2, national_doc="2555", full_name="Gimenez Maria", birth=BORN)]
    c = audit_identities(twins)
    assert c[0].kind == NAME_BIRTH_MATCH and c[0].member_ids == ("1", "2")
    documented = [make_record(1, national_doc="1444", full_name="Jimenez Maria", birth=BORN),
                  make_record(2, national_doc="2555", full_name="Gimenez Maria", birth=BORN)]
    assert [x.kind for x in audit_identities(documented)] == [NONE, NONE]
    other_year = [make_record(1, full_name="Jimenez Maria", birth=BORN),
                  make_record(2, full_name="Gimenez Maria", birth=date(1976, 6, 1))]
    assert [x.kind for x in audit_identities(other_year)] == [NONE, NONE]


def test_threshold_is_strict():
    # "abcde" vs "abcdx" has similarity exactly 0.8, which does not link.
    recs = [make_record(1, full_name="abcde", birth=BORN), make_record(2, full_name="abcdx", birth=BORN)]
    assert all(c.kind == NONE for c in audit_identities(recs))
    assert audit_identities(recs, threshold=0.79)[0].kind == NAME_BIRTH_MATCH


def test_one_id_with_two_documents_is_a_collision():
    rows = [make_record(5, row=1, national_doc="111", full_name="Perez Ana"),
            make_record(5, row=2, national_doc="222", full_name="Diaz Jose")]
    census, _ = consolidate_persons(rows)
    clusters = audit_identities(census, raw_rows=rows)
    assert clusters[0].kind == ID_COLLISION
    assert resolve_canonical(clusters)[0].resolution_status == NEEDS_REVIEW


def test_invalid_threshold():
    with pytest.raises(ValueError):
        audit_identities([], threshold=1.0)


def test_apply_aliases_and_unmapped_id():
    recs = [make_record(1, national_doc="9", full_name="Ana Paz", degree="CIVIL"),
            make_record(2, national_doc="9", full_name="Ana Paz", degree="CIVIL", sex="F")]
    aliases = resolve_canonical(audit_identities(recs))
    resolved = apply_aliases(recs, aliases)
    assert [r.person_id_canonical for r in resolved] == ["1", "1"]
    merged = regroup_by_canonical(resolved)
    assert len(merged) == 1 and merged[0].person_id_original == "1" and merged[0].value("sex") == "F"
    with pytest.raises(UnmappedId):
        apply_aliases([make_record(3)], aliases)


def test_resolution_is_idempotent():
    recs = [make_record(1, national_doc="9", full_name="Ana Paz", birth=BORN),
            make_record(2, national_doc="9", full_name="Ana Pas", birth=BORN),
            make_record(3, full_name="Ana Paz", birth=BORN)]
    first = regroup_by_canonical(apply_aliases(recs, resolve_canonical(audit_identities(recs))))
    queued = [c.member_ids for c in audit_identities(recs) if c.kind != NONE]
    second = audit_identities(first, suppress=queued)
    assert all(c.kind == NONE for c in second)


@pytest.fixture(scope="module")
def small_census(tmp_path_factory):
    out = tmp_path_factory.mktemp("small")
    _, _, _, paths = synth_to_dir(out, population_size=1500, seed=11)
    rows = ingest_raw(paths["raw"], load_config(paths["config"])).records
    census, _ = consolidate_persons(rows)
    return census, rows


def test_blocking_matches_exhaustive_comparison(small_census):
    census, rows = small_census
    blocked = audit_identities(census, raw_rows=rows, blocking=True)
    exhaustive = audit_identities(census, raw_rows=rows, blocking=False)
    assert blocked == exhaustive
    assert any(c.kind == NAME_BIRTH_MATCH for c in blocked)
    assert any(c.kind == DNI_DUPLICATE for c in blocked)


def test_audit_is_deterministic_under_input_order(small_census):
    census, rows = small_census
    shuffled = census[:]
    random.Random(5).shuffle(shuffled)
    assert audit_identities(shuffled, raw_rows=rows) == audit_identities(census, raw_rows=rows)
