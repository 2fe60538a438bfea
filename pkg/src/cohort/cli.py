"""Command-line entry point: ``cohort <subcommand>``.

Exit codes: 0 success, 2 validation error, 3 stage failure, 4 frozen output.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .errors import CohortError, FrozenOutput, StageFailure, ValidationError
from .missingness.analysis import DEFAULT_PREDICTORS
from .missingness.logistic import NUMERIC, ONE_HOT
from .pipeline import (INGEST, MISSINGNESS, N1, N1B, N1C_1, N1C_2, N1C_3, StageConfig, run_all,
                       run_stage, run_synth)
from .synthgen import load_preset

EXIT_OK, EXIT_VALIDATION, EXIT_STAGE, EXIT_FROZEN = 0, 2, 3, 4
N1C_STAGES = {1: N1C_1, 2: N1C_2, 3: N1C_3}


def _global_flags() -> argparse.ArgumentParser:
    # Shared so the flags work both before and after the subcommand.
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--out", type=Path, default=argparse.SUPPRESS,
                   help="output directory (default: $COHORT_DATA_DIR or ./cohort_out)")
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed (synth)")
    p.add_argument("--force", action="store_true", default=argparse.SUPPRESS,
                   help="archive and replace frozen outputs")
    p.add_argument("--log-level", default=argparse.SUPPRESS,
                   choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="logging verbosity")
    return p


def _n1c_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rules", type=Path, help="school-type rules file (default: built-in)")
    p.add_argument("--synonyms", type=Path, help="geo synonyms file (default: built-in)")


def _missingness_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--predictors", default=",".join(DEFAULT_PREDICTORS),
                   help="comma-separated covariates (default: %(default)s)")
    p.add_argument("--encoding", choices=[ONE_HOT, NUMERIC], default=ONE_HOT)
    p.add_argument("--table2-mode", action="store_true",
                   help="numeric sex, decade and province terms, for a compact coefficient table")


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = argparse.ArgumentParser(prog="cohort", parents=[common],
                                     description="Census-layer normalisation and missingness forensics.")
    parser.add_argument("--version", action="version", version=f"cohort {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="load a raw register through a field mapping")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--config", type=Path, required=True)

    for name, help_text in (("n1", "one representative row per person"),
                            ("n1b", "identity audit, canonical ids and alias table")):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--in", dest="in_dir", type=Path, required=True)
    sub.choices["n1b"].add_argument("--threshold", type=float, default=0.80)

    p = sub.add_parser("n1c", parents=[common], help="reference tables, school types, iterations 1-3")
    p.add_argument("--in", dest="in_dir", type=Path, required=True,
                   help="N1b output for iteration 1; the n1c directory for iterations 2 and 3")
    p.add_argument("--iteration", type=int, choices=[1, 2, 3],
                   help="run a single iteration (default: all three)")
    p.add_argument("--adopt", type=Path, help="file of person ids whose excavated clues were reviewed and adopted")
    _n1c_flags(p)

    p = sub.add_parser("missingness", parents=[common], help="flags, chi-square, logistic model, ROC")
    p.add_argument("--in", dest="in_dir", type=Path, required=True)
    _missingness_flags(p)

    p = sub.add_parser("synth", parents=[common], help="write a synthetic register with ground truth")
    p.add_argument("--preset", default="paper_shape")
    p.add_argument("--size", type=int, help="override the preset population size")

    p = sub.add_parser("run-all", parents=[common], help="every stage from ingest to missingness")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--config", type=Path, required=True)
    _n1c_flags(p)
    _missingness_flags(p)
    return parser


def _out_root(args) -> Path:
    out = getattr(args, "out", None)
    if out is not None:
        return out
    return Path(os.environ.get("COHORT_DATA_DIR") or "cohort_out")


def _stage_config(args) -> StageConfig:
    predictors = tuple(p.strip() for p in getattr(args, "predictors", ",".join(DEFAULT_PREDICTORS)).split(",")
                       if p.strip())
    return StageConfig(
        raw_path=getattr(args, "input", None),
        mapping_path=getattr(args, "config", None),
        rules_path=getattr(args, "rules", None),
        synonyms_path=getattr(args, "synonyms", None),
        adopt_path=getattr(args, "adopt", None),
        predictors=predictors,
        encoding=getattr(args, "encoding", ONE_HOT),
        table2_mode=getattr(args, "table2_mode", False),
        threshold=getattr(args, "threshold", 0.80),
    )


def _dispatch(args) -> None:
    force = getattr(args, "force", False)
    cfg = _stage_config(args)
    cmd = args.command
    if cmd == "run-all":
        out = _out_root(args)
        manifests = run_all(args.input, cfg, out, force)
        print(f"run-all: {len(manifests)} stages complete; summary in {out / 'run_summary.md'}")
        return
    if cmd == "synth":
        overrides = {}
        if getattr(args, "seed", None) is not None:
            overrides["seed"] = args.seed
        if args.size is not None:
            overrides["population_size"] = args.size
        config = load_preset(args.preset, **overrides)
        out = _out_root(args)
        m = run_synth(config, out, force)
        print(f"synth: {m.rows_out} rows for {config.population_size} ids written to {out}")
        return
    if cmd == "ingest":
        stages, in_dir = [INGEST], None
    elif cmd == "n1c":
        stages = [N1C_STAGES[args.iteration]] if args.iteration else [N1C_1, N1C_2, N1C_3]
        in_dir = args.in_dir
    else:
        stages = [{"n1": N1, "n1b": N1B, "missingness": MISSINGNESS}[cmd]]
        in_dir = args.in_dir
    out = _out_root(args)
    for stage in stages:
        m = run_stage(stage, in_dir, out, cfg, force)
        print(f"{stage}: {m.rows_in} rows in, {m.rows_out} rows out -> {out}")
        in_dir = out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(args, "log_level", "WARNING"),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        _dispatch(args)
    except FrozenOutput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FROZEN
    except ValidationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except StageFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STAGE
    except CohortError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_STAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
