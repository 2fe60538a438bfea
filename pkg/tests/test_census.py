from collections import Counter
from datetime import date

from hypothesis import given, settings
from hypothesis import strategies as st

from cohort.census import (completeness_summary, consolidate_persons, find_contradictions, profile_completeness,
                           render_profile_markdown)
from cohort.fields import CENSAL_FIELDS, VARIABLE_GROUPS
from conftest import make_record


def test_most_complete_row_wins_over_later_intake():
    a = make_record(7, row=1, intake=date(2001, 3, 1), full_name="A", sex="F", degree="CIVIL", entry_year="2001")
    b = make_record(7, row=2, intake=date(2005, 3, 1), full_name="A", sex="F")
    assert a.non_null_count == 5 and b.non_null_count == 3
    selected, superseded = consolidate_persons([b, a])
    assert selected == [a] and superseded == [b]


def test_tie_goes_to_latest_intake():
    old = make_record(9, row=1, intake=date(1999, 3, 1), full_name="A", sex="F", degree="CIVIL")
    new = make_record(9, row=2, intake=date(2003, 3, 1), full_name="B", sex="M", degree="QUIMICA")
    assert old.non_null_count == new.non_null_count == 4
    assert consolidate_persons([new, old])[0] == [new]


def test_remaining_tie_goes_to_latest_row():
    first = make_record(3, row=1, full_name="A")
    last = make_record(3, row=2, full_name="B")
    assert consolidate_persons([last, first])[0] == [last]


def test_absent_intake_sorts_earliest():
    dated = make_record(4, row=1, intake=date(1990, 1, 1), full_name="A")
    undated = make_record(4, row=2, full_name="B", sex="F")
    # Undated row has the same count (intake counts as a censal field on the dated one).
    assert dated.non_null_count == undated.non_null_count
    assert consolidate_persons([dated, undated])[0] == [dated]


def test_single_rows_pass_through_sorted():
    recs = [make_record(pid, row=k, full_name=f"N{pid}") for k, pid in enumerate([30, 4, 100])]
    selected, superseded = consolidate_persons(recs)
    assert [r.person_id_original for r in selected] == ["4", "30", "100"]
    assert superseded == []


records_strategy = st.lists(
    st.tuples(
        st.integers(1, 15),
        st.sets(st.sampled_from(["full_name", "sex", "degree", "school_name", "civil_status"])),
        st.one_of(st.none(), st.dates(date(1980, 1, 1), date(2020, 1, 1))),
    ),
    max_size=60,
)


def build(spec):
    return [make_record(pid, row=k, intake=intake, **{f: "x" for f in fields})
            for k, (pid, fields, intake) in enumerate(spec, start=1)]


@settings(max_examples=150, deadline=None)
@given(records_strategy)
def test_consolidation_properties(spec):
    recs = build(spec)
    selected, superseded = consolidate_persons(recs)
    ids = {r.person_id_original for r in recs}
    assert len(selected) == len(ids)
    assert len(selected) + len(superseded) == len(recs)
    best = {r.person_id_original: r.non_null_count for r in selected}
    for r in recs:
        assert best[r.person_id_original] >= r.non_null_count
    # Idempotent on its own output.
    assert consolidate_persons(selected)[0] == selected


@settings(max_examples=60, deadline=None)
@given(records_strategy)
def test_profile_counts_match_brute_force(spec):
    selected, _ = consolidate_persons(build(spec))
    profiles = profile_completeness(selected)
    assert len(profiles) == len(CENSAL_FIELDS)
    for p in profiles:
        assert p.present_count == sum(1 for r in selected if r.present(p.field))
        assert p.present_count + p.missing_count == len(selected)


def test_missing_pct_arithmetic():
    recs = [make_record(i, school_name="Escuela" if i < 4 else "nan") for i in range(10)]
    school = next(p for p in profile_completeness(recs) if p.field == "school_name")
    assert school.missing_pct == 0.6
    assert school.variable_group == "school"


def test_complete_records_have_no_missingness():
    fields = {f: "x" for f in CENSAL_FIELDS if f not in ("birth_date", "intake_date", "entry_year")}
    recs = [make_record(i, birth=date(1980, 1, 1), intake=date(1998, 3, 1), entry_year="1998", **fields)
            for i in range(5)]
    assert all(p.missing_pct == 0.0 for p in profile_completeness(recs))


def test_province_without_country_is_a_contradiction():
    recs = [make_record(1, province_birth="Salta"), make_record(2, province_birth="Salta", country_birth="AR"),
            make_record(3)]
    found = find_contradictions(recs)
    assert [c.person_id_original for c in found] == ["1"]
    assert found[0].kind == "ContradictionCandidate"


def test_profile_report_lists_every_group():
    recs = [make_record(i, full_name="x", school_name="y") for i in range(5)]
    text = render_profile_markdown(recs)
    for group in VARIABLE_GROUPS:
        assert f"## {group}" in text
    assert completeness_summary(recs, 0.1) == (5, 5)


def test_paper_shaped_school_missingness(paper_run):
    from cohort.records import CensalRecord, read_records

    census = read_records(paper_run.out / "n1" / "students_n1_census.csv", CensalRecord)
    school = next(p for p in profile_completeness(census) if p.field == "school_name")
    expected = sum(paper_run.gt.true_missing.values()) / len(paper_run.gt.true_missing)
    assert abs(school.missing_pct - expected) < 1e-12
    assert abs(school.missing_pct - 0.434) < 0.01
    assert Counter(r.person_id_original for r in census).most_common(1)[0][1] == 1
