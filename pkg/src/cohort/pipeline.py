"""Stage orchestration with freeze points and run manifests.

Every stage writes its outputs plus ``manifest_<stage>.json`` recording the
content digests of what it read and wrote. A later stage refuses inputs whose
bytes no longer match the upstream manifest, and a stage refuses to overwrite
its own frozen outputs unless forced, in which case they are archived first.
"""

from __future__ import annotations

import hashlib
import json
import logging
import shutil
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

from . import __version__
from .census import consolidate_persons, render_profile_markdown
from .errors import CohortError, FrozenOutput, MissingInput, StageFailure, TamperedInput, ValidationError
from .fields import load_config
from .identity import (AUTO_UNIQUE, apply_aliases, audit_identities, regroup_by_canonical,
                       resolve_canonical, review_queue)
from .ingest import ingest_raw, write_rejects
from .missingness.analysis import DEFAULT_PREDICTORS, analyse, predictor_spec, render_report
from .missingness.figures import emit_figures
from .missingness.flags import write_flags
from .missingness.logistic import ONE_HOT
from .normalise.iterations import (OK, RAW_V2, CleanStudentRecord, iteration1_merge, iteration2_refine,
                                   iteration3_partition, render_excavation_report)
from .normalise.reference import (TABLE_FILES, build_reference_tables, load_synonyms, read_reference_tables,
                                  write_reference_tables)
from .normalise.rules import DATA_MISSING, load_rules
from .records import CensalRecord, RawStudentRecord, ResolvedRecord, read_records, write_records, write_rows
from .synthgen import synthesize, write_synthetic
from .synthgen.generate import config_doc

log = logging.getLogger(__name__)

INGEST, N1, N1B, N1C_1, N1C_2, N1C_3, MISSINGNESS, SYNTH = (
    "INGEST", "N1", "N1B", "N1C_1", "N1C_2", "N1C_3", "MISSINGNESS", "SYNTH")
STAGES = (INGEST, N1, N1B, N1C_1, N1C_2, N1C_3, MISSINGNESS, SYNTH)
PIPELINE = (INGEST, N1, N1B, N1C_1, N1C_2, N1C_3, MISSINGNESS)
STAGE_DIRS = {INGEST: "ingest", N1: "n1", N1B: "n1b", N1C_1: "n1c", N1C_2: "n1c", N1C_3: "n1c",
              MISSINGNESS: "missingness", SYNTH: "synth"}

INGESTED = "records_ingested.csv"
CENSUS = "students_n1_census.csv"
SUPERSEDED = "n1_superseded_rows.csv"
ALIASES = "person_id_aliases.csv"
RESOLVED = "students_n1_census_resolved.csv"
REVIEW = "n1b_review_queue.csv"
V1, V2, V3 = "students_master_clean_v1.csv", "students_master_clean_v2.csv", "students_master_clean_v3.csv"
REF_FILES = tuple(TABLE_FILES.values())

# What each stage consumes: (upstream stage, file names) pairs.
_CONSUMES = {
    N1: ((INGEST, (INGESTED,)),),
    N1B: ((N1, (CENSUS, SUPERSEDED)),),
    N1C_1: ((N1B, (RESOLVED,)),),
    N1C_2: ((N1C_1, (V1,) + REF_FILES),),
    N1C_3: ((N1C_1, REF_FILES), (N1C_2, (V2,))),
    MISSINGNESS: ((N1C_1, REF_FILES), (N1C_3, (V3,))),
}


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def manifest_name(stage: str) -> str:
    return f"manifest_{stage.lower()}.json"


@dataclass
class RunManifest:
    stage: str
    input_digests: dict[str, str]
    config_digests: dict[str, str]
    rows_in: int
    rows_out: int
    output_digests: dict[str, str]
    timestamp: str
    tool_version: str = __version__
    details: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunManifest":
        return cls(**json.loads(text))

    @classmethod
    def load(cls, path: str | Path) -> "RunManifest":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


@dataclass
class StageConfig:
    """Inputs that are not produced by an upstream stage."""

    raw_path: Path | None = None
    mapping_path: Path | None = None
    rules_path: Path | None = None
    synonyms_path: Path | None = None
    adopt_path: Path | None = None
    predictors: tuple[str, ...] = DEFAULT_PREDICTORS
    encoding: str = ONE_HOT
    table2_mode: bool = False
    threshold: float = 0.80

    def resource_digests(self, stage: str) -> dict[str, str]:
        out = {}
        if stage == INGEST:
            out["field_mapping"] = _digest_or_missing(self.mapping_path, "field mapping")
        if stage == N1B:
            out["threshold"] = sha256_bytes(repr(self.threshold).encode())
        if stage in (N1C_1, N1C_2, N1C_3):
            out["rules"] = _resource_digest(self.rules_path, "default_rules.yaml")
            out["synonyms"] = _resource_digest(self.synonyms_path, "default_synonyms.yaml")
        if stage == N1C_3 and self.adopt_path is not None:
            out["adopted_clues"] = _digest_or_missing(self.adopt_path, "adopted clue list")
        if stage == MISSINGNESS:
            options = {"predictors": list(self.predictors), "encoding": self.encoding,
                       "table2_mode": self.table2_mode}
            out["options"] = sha256_bytes(json.dumps(options, sort_keys=True).encode())
        return out


def _digest_or_missing(path: Path | None, what: str) -> str:
    if path is None or not Path(path).is_file():
        raise MissingInput(f"{what} not found: {path}")
    return sha256_file(path)


def _resource_digest(path: Path | None, default: str) -> str:
    if path is not None:
        return _digest_or_missing(path, default.replace("default_", "").replace(".yaml", "") + " file")
    return sha256_bytes(resources.files("cohort.data").joinpath(default).read_bytes())


# -- freeze points --------------------------------------------------------------

def _check_frozen(stage: str, out_dir: Path, force: bool) -> None:
    path = out_dir / manifest_name(stage)
    if not path.exists():
        return
    if not force:
        raise FrozenOutput(f"{stage} output in {out_dir} is frozen; rerun with --force to archive and replace it")
    old = RunManifest.load(path)
    archive = out_dir / "_archive"
    k = 1
    while (archive / f"{stage.lower()}-{k}").exists():
        k += 1
    target = archive / f"{stage.lower()}-{k}"
    target.mkdir(parents=True)
    for name in list(old.output_digests) + [path.name]:
        src = out_dir / name
        if src.exists():
            shutil.move(str(src), str(target / name))
    log.info("archived previous %s outputs to %s", stage, target)


def verify_inputs(stage: str, in_dir: Path) -> dict[str, str]:
    """Check consumed files against their upstream manifests; return their digests."""
    digests = {}
    for upstream, names in _CONSUMES.get(stage, ()):
        mpath = in_dir / manifest_name(upstream)
        if not mpath.exists():
            raise MissingInput(f"{stage} needs the {upstream} output in {in_dir} (no {mpath.name})")
        manifest = RunManifest.load(mpath)
        for name in names:
            path = in_dir / name
            if not path.exists():
                raise MissingInput(f"{stage} input {path} is missing")
            recorded = manifest.output_digests.get(name)
            actual = sha256_file(path)
            if recorded != actual:
                raise TamperedInput(f"{path} does not match the digest recorded by {upstream}; refusing to proceed")
            digests[name] = actual
    return digests


# -- stages -----------------------------------------------------------------------

@dataclass
class _Outcome:
    rows_in: int
    rows_out: int
    outputs: list[str]
    details: dict = field(default_factory=dict)


def _stage_ingest(in_dir: Path, out: Path, cfg: StageConfig) -> _Outcome:
    mapping = load_config(cfg.mapping_path)
    result = ingest_raw(cfg.raw_path, mapping)
    write_records(out / INGESTED, result.records, RawStudentRecord)
    write_rejects(out / "ingest_rejects.csv", result.rejects)
    lines = ["# Ingest", "", f"Data rows read: {result.row_count}", f"Records: {len(result.records)}",
             f"Quarantined rows: {len(result.rejects)}", f"Cell warnings: {len(result.warnings)}", ""]
    if result.warnings:
        lines += ["| row | field | warning |", "|---:|---|---|"]
        lines += [f"| {row} | {name} | {msg} |" for row, name, msg in result.warnings]
        lines.append("")
    (out / "ingest_report.md").write_text("\n".join(lines), encoding="utf-8")
    return _Outcome(result.row_count, len(result.records), [INGESTED, "ingest_rejects.csv", "ingest_report.md"],
                    {"rejected": len(result.rejects), "warnings": len(result.warnings)})


def _stage_n1(in_dir: Path, out: Path, cfg: StageConfig) -> _Outcome:
    rows = read_records(in_dir / INGESTED, RawStudentRecord)
    selected, superseded = consolidate_persons(rows)
    write_records(out / CENSUS, selected, CensalRecord)
    write_records(out / SUPERSEDED, superseded, CensalRecord)
    (out / "n1_profile.md").write_text(render_profile_markdown(selected), encoding="utf-8")
    return _Outcome(len(rows), len(selected) + len(superseded), [CENSUS, SUPERSEDED, "n1_profile.md"],
                    {"persons": len(selected), "superseded_rows": len(superseded)})


def _stage_n1b(in_dir: Path, out: Path, cfg: StageConfig) -> _Outcome:
    census = read_records(in_dir / CENSUS, CensalRecord)
    superseded = read_records(in_dir / SUPERSEDED, CensalRecord)
    clusters = audit_identities(census, cfg.threshold, raw_rows=census + superseded)
    aliases = resolve_canonical(clusters, cfg.threshold)
    resolved = apply_aliases(census, aliases)
    queue = review_queue(clusters, aliases)

    # Idempotence audit: a second pass over the merged population, with the
    # queued clusters set aside, must find nothing new.
    second = resolve_canonical(audit_identities(regroup_by_canonical(resolved), cfg.threshold,
                                                suppress=[c.member_ids for c in queue]), cfg.threshold)
    idempotent = all(a.resolution_status == AUTO_UNIQUE for a in second)

    write_rows(out / ALIASES, ("person_id_original", "person_id_canonical", "resolution_status", "evidence_summary"),
               ((a.person_id_original, a.person_id_canonical, a.resolution_status, a.evidence_summary)
                for a in aliases))
    write_records(out / RESOLVED, resolved, ResolvedRecord)
    write_rows(out / REVIEW, ("cluster", "cluster_kind", "member_ids", "id_a", "id_b", "similarity",
                              "evidence_kind", "shared_key"),
               ((n, c.kind, "|".join(c.member_ids), e.id_a, e.id_b, f"{e.similarity:.6f}", e.kind, e.shared_key)
                for n, c in enumerate(queue, start=1) for e in c.evidence))
    status: dict[str, int] = {}
    for a in aliases:
        status[a.resolution_status] = status.get(a.resolution_status, 0) + 1
    kinds: dict[str, int] = {}
    for c in clusters:
        if c.kind != "NONE":
            kinds[c.kind] = kinds.get(c.kind, 0) + 1
    lines = ["# N1b identity resolution", "", f"Person ids: {len(census)}", "",
             "| resolution_status | ids |", "|---|---:|"]
    lines += [f"| {k} | {v} |" for k, v in sorted(status.items())]
    lines += ["", "| conflict cluster kind | clusters |", "|---|---:|"]
    lines += [f"| {k} | {v} |" for k, v in sorted(kinds.items())]
    lines += ["", f"Clusters queued for review: {len(queue)}",
              f"Second pass finds only AUTO_UNIQUE: {'yes' if idempotent else 'no'}", ""]
    (out / "n1b_report.md").write_text("\n".join(lines), encoding="utf-8")
    return _Outcome(len(census), len(resolved), [ALIASES, RESOLVED, REVIEW, "n1b_report.md"],
                    {"status_counts": status, "review_clusters": len(queue), "idempotent": idempotent})


def _flag_summary(records: list[CleanStudentRecord]) -> dict:
    n = len(records)
    counts = {"rows": n, "geo_ok": sum(r.geo_flag == OK for r in records),
              "school_ok": sum(r.school_flag == OK for r in records),
              "fully_ok": sum(r.fully_ok for r in records)}
    counts["fully_ok_share"] = round(counts["fully_ok"] / n, 6) if n else None
    return counts


def _flag_report(title: str, summary: dict) -> str:
    n = summary["rows"]
    pct = (lambda k: f"{100 * summary[k] / n:.2f}%") if n else (lambda k: "n/a")
    return "\n".join([f"# {title}", "", f"Rows: {n}", "", "| flag | OK rows | share |", "|---|---:|---:|",
                      f"| geo_flag | {summary['geo_ok']} | {pct('geo_ok')} |",
                      f"| school_flag | {summary['school_ok']} | {pct('school_ok')} |",
                      f"| both | {summary['fully_ok']} | {pct('fully_ok')} |", ""])


def _stage_n1c_1(in_dir: Path, out: Path, cfg: StageConfig) -> _Outcome:
    resolved = read_records(in_dir / RESOLVED, ResolvedRecord)
    rules, synonyms = load_rules(cfg.rules_path), load_synonyms(cfg.synonyms_path)
    refs = build_reference_tables(resolved, synonyms, rules.stopwords)
    write_reference_tables(out, refs)
    v1 = iteration1_merge(resolved, refs, synonyms, rules)
    write_records(out / V1, v1, CleanStudentRecord)
    summary = _flag_summary(v1)
    (out / "n1c_v1_report.md").write_text(_flag_report("N1c iteration 1", summary), encoding="utf-8")
    summary["reference_entries"] = {k: len(refs.table(k)) for k in TABLE_FILES}
    return _Outcome(len(resolved), len(v1), list(REF_FILES) + [V1, "n1c_v1_report.md"], summary)


def _stage_n1c_2(in_dir: Path, out: Path, cfg: StageConfig) -> _Outcome:
    rules, synonyms = load_rules(cfg.rules_path), load_synonyms(cfg.synonyms_path)
    refs = read_reference_tables(in_dir, rules.stopwords)
    v1 = read_records(in_dir / V1, CleanStudentRecord)
    v2 = iteration2_refine(v1, refs, synonyms, rules)
    write_records(out / V2, v2, CleanStudentRecord)
    summary = _flag_summary(v2)
    (out / "n1c_v2_report.md").write_text(_flag_report("N1c iteration 2", summary), encoding="utf-8")
    return _Outcome(len(v1), len(v2), [V2, "n1c_v2_report.md"], summary)


def _read_adopted(path: Path | None) -> frozenset[str]:
    if path is None:
        return frozenset()
    return frozenset(line.strip() for line in Path(path).read_text(encoding="utf-8").splitlines()
                     if line.strip() and not line.startswith("#"))


def _stage_n1c_3(in_dir: Path, out: Path, cfg: StageConfig) -> _Outcome:
    rules = load_rules(cfg.rules_path)
    refs = read_reference_tables(in_dir, rules.stopwords)
    v2 = read_records(in_dir / V2, CleanStudentRecord)
    adopted = _read_adopted(cfg.adopt_path)
    v3, clues = iteration3_partition(v2, refs, rules, adopted)
    v3 = sorted(v3, key=lambda r: _id_key(r.person_id_original))
    # The file row number is an artefact of the raw file order; v3 leaves it out.
    write_records(out / V3, v3, CleanStudentRecord, exclude=("row_number",))
    n = len(v3)
    raw_v2 = sum(r.school_info_source == RAW_V2 for r in v3)
    missing = sum(r.school_info_source == DATA_MISSING for r in v3)
    lines = ["# N1c iteration 3: population partition", "", f"Persons: {n}", "",
             "| subset | persons | share |", "|---|---:|---:|"]
    for label, k in ((RAW_V2, raw_v2), (DATA_MISSING, missing)):
        lines.append(f"| {label} | {k} | {100 * k / n:.1f}% |" if n else f"| {label} | {k} | n/a |")
    lines += ["", f"Geography fully normalised: {sum(r.geo_flag == OK for r in v3)} of {n}", ""]
    lines.append(render_excavation_report(v3, clues, adopted))
    (out / "n1c_v3_report.md").write_text("\n".join(lines), encoding="utf-8")
    return _Outcome(len(v2), n, [V3, "n1c_v3_report.md"],
                    {"raw_v2": raw_v2, "data_missing": missing, "clues": len(clues),
                     "data_missing_share": round(missing / n, 6) if n else None})


def _id_key(pid: str):
    return (0, int(pid), "") if pid.isdigit() else (1, 0, pid)


def _stage_missingness(in_dir: Path, out: Path, cfg: StageConfig) -> _Outcome:
    v3 = read_records(in_dir / V3, CleanStudentRecord)
    refs = read_reference_tables(in_dir)
    spec = predictor_spec(cfg.predictors, cfg.encoding, cfg.table2_mode)
    result = analyse(v3, spec)
    outputs = ["missingness_flags.csv", "missingness_report.md"]
    write_flags(out / "missingness_flags.csv", result.flags)
    if result.model is not None:
        write_rows(out / "model_coefficients.csv", ("term", "coefficient"),
                   ((t, f"{c:.10f}") for t, c in zip(result.model.column_names, result.model.coefficients)))
        outputs.append("model_coefficients.csv")
    if result.calibration:
        write_rows(out / "calibration.csv", ("bin", "n", "mean_predicted", "observed_rate"),
                   ((i, b.count, f"{b.mean_score:.10f}", f"{b.observed_rate:.10f}")
                    for i, b in enumerate(result.calibration, start=1)))
        outputs.append("calibration.csv")
    decade = result.crosstabs.get("decade")
    if decade is not None and result.roc is not None:
        outputs += [p.name for p in emit_figures(decade, result.roc, out)]
    else:
        result.notices.append("figures skipped: no decade table or ROC curve")
    labels = {"province_birth": {e.ref_id: e.canonical_label for e in refs.provinces}}
    (out / "missingness_report.md").write_text(render_report(result, labels), encoding="utf-8")
    details = {"prevalence": None if not result.flags else round(result.prevalence, 6),
               "auc": None if result.roc is None else result.roc.auc,
               "accuracy": result.accuracy,
               "chi_square": {k: {"statistic": v.statistic, "df": v.degrees_of_freedom, "p_value": v.p_value}
                              for k, v in result.chi_square.items()},
               "notices": list(result.notices)}
    return _Outcome(len(v3), len(result.flags), outputs, details)


_RUNNERS = {INGEST: _stage_ingest, N1: _stage_n1, N1B: _stage_n1b, N1C_1: _stage_n1c_1,
            N1C_2: _stage_n1c_2, N1C_3: _stage_n1c_3, MISSINGNESS: _stage_missingness}


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def run_stage(stage: str, in_dir: str | Path | None, out_dir: str | Path,
              configs: StageConfig | None = None, force: bool = False) -> RunManifest:
    """Run one stage: verify inputs, refuse frozen outputs, write outputs and manifest."""
    if stage not in _RUNNERS:
        raise ValidationError(f"unknown stage {stage!r}")
    cfg = configs or StageConfig()
    out = Path(out_dir)
    in_dir = Path(in_dir) if in_dir is not None else out
    input_digests = verify_inputs(stage, in_dir)
    if stage == INGEST:
        if cfg.raw_path is None or not Path(cfg.raw_path).is_file():
            raise MissingInput(f"raw register not found: {cfg.raw_path}")
        input_digests[Path(cfg.raw_path).name] = sha256_file(cfg.raw_path)
    config_digests = cfg.resource_digests(stage)
    out.mkdir(parents=True, exist_ok=True)
    _check_frozen(stage, out, force)

    log.info("running %s", stage)
    try:
        outcome = _RUNNERS[stage](in_dir, out, cfg)
    except ValidationError:
        raise
    except CohortError as exc:
        raise StageFailure(f"{stage}: {type(exc).__name__}: {exc}") from exc
    except (OSError, ValueError, KeyError) as exc:
        raise StageFailure(f"{stage}: {type(exc).__name__}: {exc}") from exc

    manifest = RunManifest(
        stage=stage, input_digests=input_digests, config_digests=config_digests,
        rows_in=outcome.rows_in, rows_out=outcome.rows_out,
        output_digests={name: sha256_file(out / name) for name in outcome.outputs},
        timestamp=_now(), details=outcome.details,
    )
    if stage != INGEST and manifest.rows_in != manifest.rows_out:
        raise StageFailure(f"{stage}: row accounting broke ({manifest.rows_in} in, {manifest.rows_out} out)")
    (out / manifest_name(stage)).write_text(manifest.to_json(), encoding="utf-8")
    log.info("%s done: %d rows in, %d rows out", stage, manifest.rows_in, manifest.rows_out)
    return manifest


def run_all(raw_path: str | Path, configs: StageConfig | None, out_dir: str | Path,
            force: bool = False) -> list[RunManifest]:
    """INGEST through MISSINGNESS in order, each in its own subdirectory; stops at the first failure."""
    cfg = configs or StageConfig()
    cfg = StageConfig(**{**asdict(cfg), "raw_path": Path(raw_path)})
    # Fail on a bad predictor list before any stage writes output.
    predictor_spec(cfg.predictors, cfg.encoding, cfg.table2_mode)
    out = Path(out_dir)
    manifests = []
    previous = None
    for stage in PIPELINE:
        stage_dir = out / STAGE_DIRS[stage]
        # Iterations 2 and 3 read the n1c directory; the others read their predecessor's.
        in_dir = stage_dir if previous is None else out / STAGE_DIRS[previous]
        manifests.append(run_stage(stage, in_dir, stage_dir, cfg, force))
        previous = stage
    write_run_summary(out, manifests)
    return manifests


def write_run_summary(out_dir: Path, manifests: list[RunManifest]) -> Path:
    """Markdown summary linking every report; no timestamps, so reruns match byte for byte."""
    by_stage = {m.stage: m for m in manifests}
    lines = ["# Run summary", "", "| stage | rows in | rows out | outputs |", "|---|---:|---:|---|"]
    for m in manifests:
        folder = STAGE_DIRS[m.stage]
        links = ", ".join(f"[{name}]({folder}/{name})" for name in m.output_digests if name.endswith(".md"))
        lines.append(f"| {m.stage} | {m.rows_in} | {m.rows_out} | {links} |")
    lines.append("")
    part = by_stage.get(N1C_3)
    if part is not None:
        d = part.details
        n = d["raw_v2"] + d["data_missing"]
        lines += ["## Population split", ""]
        if n:
            lines += [f"- {RAW_V2}: {d['raw_v2']} ({100 * d['raw_v2'] / n:.1f}%)",
                      f"- {DATA_MISSING}: {d['data_missing']} ({100 * d['data_missing'] / n:.1f}%)", ""]
        else:
            lines += ["- empty population", ""]
    miss = by_stage.get(MISSINGNESS)
    if miss is not None:
        d = miss.details
        lines += ["## Missingness model", ""]
        lines.append(f"- AUC: {d['auc']:.4f}" if d["auc"] is not None else "- AUC: n/a")
        lines.append(f"- Accuracy: {d['accuracy']:.4f}" if d["accuracy"] is not None else "- Accuracy: n/a")
        dec = d["chi_square"].get("decade")
        if dec is not None:
            lines.append(f"- Decade chi-square: {dec['statistic']:.2f} (df {dec['df']})")
        for msg in d["notices"]:
            lines.append(f"- Notice: {msg}")
        lines.append("")
    path = Path(out_dir) / "run_summary.md"
    path.write_text("\n".join(lines), encoding="utf-8")
    return path


def run_synth(config, out_dir: str | Path, force: bool = False) -> RunManifest:
    """Generate a synthetic register and record a SYNTH manifest beside it."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _check_frozen(SYNTH, out, force)
    try:
        records, gt = synthesize(config)
    except CohortError:
        raise
    except (ValueError, RuntimeError) as exc:
        raise StageFailure(f"{SYNTH}: {exc}") from exc
    paths = write_synthetic(out, records, gt, config)
    manifest = RunManifest(
        stage=SYNTH, input_digests={},
        config_digests={"synth_config": sha256_bytes(json.dumps(config_doc(config), sort_keys=True).encode())},
        rows_in=config.population_size, rows_out=len(records),
        output_digests={p.name: sha256_file(p) for p in paths.values()},
        timestamp=_now(),
        details={"true_person_count": gt.true_person_count, "planted_clusters": len(gt.duplicate_clusters),
                 "missing_persons": sum(gt.true_missing.values())},
    )
    (out / manifest_name(SYNTH)).write_text(manifest.to_json(), encoding="utf-8")
    return manifest
