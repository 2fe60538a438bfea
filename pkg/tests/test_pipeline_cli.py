import csv
import json

import pytest

from cohort.cli import EXIT_FROZEN, EXIT_OK, EXIT_STAGE, EXIT_VALIDATION, main
from cohort.errors import FrozenOutput, MissingInput, StageFailure, TamperedInput
from cohort.pipeline import (INGEST, MISSINGNESS, N1, N1B, N1C_1, PIPELINE, STAGE_DIRS, RunManifest, StageConfig,
                             manifest_name, run_all, run_stage)

V3 = "students_master_clean_v3.csv"


def synth(tmp_path, size=1000, seed=42):
    out = tmp_path / "synth"
    assert main(["synth", "--out", str(out), "--size", str(size), "--seed", str(seed)]) == EXIT_OK
    return out / "synthetic_raw.csv", out / "field_mapping.yaml"


def run_all_cli(raw, mapping, out, *extra):
    return main(["run-all", "--input", str(raw), "--config", str(mapping), "--out", str(out), *extra])


def manifests(out):
    return {s: RunManifest.load(out / STAGE_DIRS[s] / manifest_name(s)) for s in PIPELINE}


@pytest.fixture(scope="module")
def register(tmp_path_factory):
    return synth(tmp_path_factory.mktemp("reg"))


def test_run_all_writes_every_stage_and_summary(tmp_path, register):
    raw, mapping = register
    assert run_all_cli(raw, mapping, tmp_path / "out") == EXIT_OK
    ms = manifests(tmp_path / "out")
    for stage in PIPELINE[1:]:
        assert ms[stage].rows_in == ms[stage].rows_out
    assert ms[INGEST].rows_out == ms[N1].rows_out
    persons = ms[N1B].rows_out
    assert all(ms[s].rows_out == persons for s in PIPELINE[3:])
    for stage, m in ms.items():
        folder = tmp_path / "out" / STAGE_DIRS[stage]
        for name, digest in m.output_digests.items():
            assert (folder / name).exists(), name
    summary = (tmp_path / "out" / "run_summary.md").read_text(encoding="utf-8")
    assert "RAW_V2" in summary and "AUC" in summary
    for f in ("fig_missingness_by_decade.svg", "fig_roc.png", "fig_roc.csv", "missingness_report.md"):
        assert (tmp_path / "out" / "missingness" / f).exists()


def test_frozen_rerun_and_force_archive(tmp_path, register, capsys):
    raw, mapping = register
    out = tmp_path / "out"
    assert run_all_cli(raw, mapping, out) == EXIT_OK
    before = manifests(out)
    assert run_all_cli(raw, mapping, out) == EXIT_FROZEN
    assert "frozen" in capsys.readouterr().err
    assert run_all_cli(raw, mapping, out, "--force") == EXIT_OK
    archived = out / "ingest" / "_archive" / "ingest-1"
    assert (archived / manifest_name(INGEST)).exists()
    after = manifests(out)
    for stage in PIPELINE:
        assert after[stage].output_digests == before[stage].output_digests
    assert (out / "n1c" / "_archive" / "n1c_3-1" / V3).exists()


def test_stage_by_stage_matches_run_all(tmp_path, register):
    raw, mapping = register
    d = tmp_path / "steps"
    assert main(["ingest", "--input", str(raw), "--config", str(mapping), "--out", str(d / "ingest")]) == 0
    assert main(["n1", "--in", str(d / "ingest"), "--out", str(d / "n1")]) == 0
    assert main(["n1b", "--in", str(d / "n1"), "--out", str(d / "n1b")]) == 0
    assert main(["n1c", "--in", str(d / "n1b"), "--out", str(d / "n1c")]) == 0
    assert main(["missingness", "--in", str(d / "n1c"), "--out", str(d / "missingness")]) == 0
    assert run_all_cli(raw, mapping, tmp_path / "all") == EXIT_OK
    assert (d / "n1c" / V3).read_bytes() == (tmp_path / "all" / "n1c" / V3).read_bytes()


def test_stage_order_is_enforced(tmp_path, register, capsys):
    raw, mapping = register
    assert main(["ingest", "--input", str(raw), "--config", str(mapping), "--out", str(tmp_path / "i")]) == 0
    assert main(["n1b", "--in", str(tmp_path / "i"), "--out", str(tmp_path / "b")]) == EXIT_VALIDATION
    assert "MissingInput" in capsys.readouterr().err
    with pytest.raises(MissingInput):
        run_stage(MISSINGNESS, tmp_path / "i", tmp_path / "m")


def test_iteration_two_needs_iteration_one(tmp_path, register):
    raw, mapping = register
    run_all(raw, StageConfig(mapping_path=mapping), tmp_path / "out")
    fresh = tmp_path / "fresh"
    assert main(["n1c", "--iteration", "2", "--in", str(tmp_path / "out" / "n1b"), "--out", str(fresh)]) \
        == EXIT_VALIDATION


def test_tampered_input_is_refused(tmp_path, register, capsys):
    raw, mapping = register
    run_stage(INGEST, None, tmp_path / "i", StageConfig(raw_path=raw, mapping_path=mapping))
    run_stage(N1, tmp_path / "i", tmp_path / "n1")
    census = tmp_path / "n1" / "students_n1_census.csv"
    census.write_bytes(census.read_bytes().replace(b"CIVIL", b"CIVLL", 1))
    with pytest.raises(TamperedInput):
        run_stage(N1B, tmp_path / "n1", tmp_path / "b")
    assert main(["n1b", "--in", str(tmp_path / "n1"), "--out", str(tmp_path / "b")]) == EXIT_VALIDATION
    assert "TamperedInput" in capsys.readouterr().err


def test_frozen_output_raises_from_api(tmp_path, register):
    raw, mapping = register
    cfg = StageConfig(raw_path=raw, mapping_path=mapping)
    run_stage(INGEST, None, tmp_path / "i", cfg)
    with pytest.raises(FrozenOutput):
        run_stage(INGEST, None, tmp_path / "i", cfg)


def test_validation_errors_exit_two(tmp_path, register):
    raw, mapping = register
    assert run_all_cli(tmp_path / "absent.csv", mapping, tmp_path / "a") == EXIT_VALIDATION
    bad = tmp_path / "bad.yaml"
    bad.write_text("fields:\n  school_name: colegio\n", encoding="utf-8")
    assert run_all_cli(raw, bad, tmp_path / "b") == EXIT_VALIDATION
    rules = tmp_path / "rules.yaml"
    rules.write_text("rules: nacional\n", encoding="utf-8")
    assert run_all_cli(raw, mapping, tmp_path / "c", "--rules", str(rules)) == EXIT_VALIDATION
    assert main(["synth", "--out", str(tmp_path / "s"), "--size", "-3"]) == EXIT_VALIDATION


def test_unknown_predictor_is_rejected_before_running(tmp_path, register, capsys):
    raw, mapping = register
    assert run_all_cli(raw, mapping, tmp_path / "out", "--predictors", "decade,shoe_size") == EXIT_VALIDATION
    assert "shoe_size" in capsys.readouterr().err
    assert not (tmp_path / "out" / "ingest").exists()


def test_stage_failure_exits_three(tmp_path, register, monkeypatch, capsys):
    import cohort.pipeline as pipeline

    raw, mapping = register

    def broken(in_dir, out, cfg):
        raise OSError("disk full")

    monkeypatch.setitem(pipeline._RUNNERS, N1, broken)
    with pytest.raises(StageFailure):
        run_all(raw, StageConfig(mapping_path=mapping), tmp_path / "api")
    assert run_all_cli(raw, mapping, tmp_path / "cli") == EXIT_STAGE
    assert "N1: OSError: disk full" in capsys.readouterr().err
    # The failed stage leaves no manifest, so nothing downstream can consume it.
    assert not (tmp_path / "cli" / "n1" / manifest_name(N1)).exists()


def test_header_only_register_runs_with_notices(tmp_path, register):
    raw, mapping = register
    empty = tmp_path / "empty.csv"
    empty.write_text(raw.read_text(encoding="utf-8").splitlines()[0] + "\n", encoding="utf-8")
    assert run_all_cli(empty, mapping, tmp_path / "out") == EXIT_OK
    ms = manifests(tmp_path / "out")
    assert all(m.rows_out == 0 for m in ms.values())
    summary = (tmp_path / "out" / "run_summary.md").read_text(encoding="utf-8")
    assert "empty population" in summary


@pytest.mark.parametrize("size", [0, 1, 1000])
def test_population_sizes(tmp_path, size):
    raw, mapping = synth(tmp_path, size=size)
    assert run_all_cli(raw, mapping, tmp_path / "out") == EXIT_OK
    with open(tmp_path / "out" / "n1c" / V3, encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    gt = list(csv.DictReader(open(tmp_path / "synth" / "ground_truth.csv", encoding="utf-8")))
    assert len(rows) <= len(gt) == size
    assert manifests(tmp_path / "out")[N1C_1].rows_out == len(rows)


def test_same_input_gives_same_outputs(tmp_path, register):
    raw, mapping = register
    a = run_all(raw, StageConfig(mapping_path=mapping), tmp_path / "a")
    b = run_all(raw, StageConfig(mapping_path=mapping), tmp_path / "b")
    for ma, mb in zip(a, b):
        assert ma.output_digests == mb.output_digests
        assert ma.input_digests == mb.input_digests and ma.config_digests == mb.config_digests
    assert (tmp_path / "a" / "run_summary.md").read_bytes() == (tmp_path / "b" / "run_summary.md").read_bytes()


def test_manifest_round_trip(tmp_path, register):
    raw, mapping = register
    m = run_stage(INGEST, None, tmp_path, StageConfig(raw_path=raw, mapping_path=mapping))
    doc = json.loads((tmp_path / manifest_name(INGEST)).read_text(encoding="utf-8"))
    assert set(doc) >= {"stage", "input_digests", "config_digests", "output_digests", "rows_in", "rows_out",
                        "timestamp", "tool_version"}
    assert RunManifest.from_json(m.to_json()) == m


def test_default_out_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("COHORT_DATA_DIR", str(tmp_path / "data"))
    assert main(["synth", "--size", "20"]) == EXIT_OK
    assert (tmp_path / "data" / "synthetic_raw.csv").exists()
    assert main(["synth", "--size", "20"]) == EXIT_FROZEN
    assert main(["synth", "--size", "20", "--force", "--log-level", "ERROR"]) == EXIT_OK


def test_help_and_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "cohort" in capsys.readouterr().out
    with pytest.raises(SystemExit):
        main([])
