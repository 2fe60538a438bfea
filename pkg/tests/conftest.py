import json
import time
from pathlib import Path

import pytest

from cohort.fields import LOGICAL_FIELDS
from cohort.pipeline import StageConfig, run_all
from cohort.records import CensalRecord, count_censal
from cohort.synthgen import load_preset, synthesize, write_synthetic

ORACLES = Path(__file__).parent / "oracles" / "frozen_values.json"


@pytest.fixture(scope="session")
def oracle():
    return json.loads(ORACLES.read_text(encoding="utf-8"))


def make_record(pid, row=1, birth=None, intake=None, aux=(), **fields):
    """A census-layer record from keyword text fields; dates given as ``date`` objects."""
    raw = {f: "" for f in LOGICAL_FIELDS}
    raw["person_id"] = str(pid)
    raw.update({k: str(v) for k, v in fields.items()})
    if birth is not None:
        raw["birth_date"] = birth.isoformat()
    if intake is not None:
        raw["intake_date"] = intake.isoformat()
    rec = CensalRecord(row_number=row, raw=raw, auxiliary_texts=tuple(aux), birth_date=birth, intake_date=intake)
    return CensalRecord(row_number=row, raw=raw, auxiliary_texts=tuple(aux), birth_date=birth,
                        intake_date=intake, non_null_count=count_censal(rec))


@pytest.fixture
def record():
    return make_record


def synth_to_dir(out: Path, **overrides):
    cfg = load_preset("paper_shape", **overrides)
    records, gt = synthesize(cfg)
    paths = write_synthetic(out, records, gt, cfg)
    return cfg, records, gt, paths


class PaperRun:
    """One synthetic paper-shaped register pushed through every stage."""

    def __init__(self, root: Path):
        self.root = root
        self.cfg, self.records, self.gt, self.paths = synth_to_dir(root / "synth")
        start = time.perf_counter()
        self.manifests = run_all(self.paths["raw"], StageConfig(mapping_path=self.paths["config"]), root / "out")
        self.seconds = time.perf_counter() - start
        self.out = root / "out"


@pytest.fixture(scope="session")
def paper_run(tmp_path_factory):
    return PaperRun(tmp_path_factory.mktemp("paper"))



# -- acceptance criteria reporting ------------------------------------------------

CRITERIA: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """``check(n, ok, detail)`` records and prints one line, then asserts ``ok``."""

    def check(number: int, ok: bool, detail: str) -> None:
        CRITERIA[number] = (bool(ok), detail)
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})")
        assert ok, detail

    return check


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        ok, detail = CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
