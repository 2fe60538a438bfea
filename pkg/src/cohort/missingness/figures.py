"""Decade area chart and ROC curve, each with a CSV data sidecar."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from ..errors import DegenerateTable  # noqa: E402
from ..records import write_rows  # noqa: E402
from .roc import RocCurve  # noqa: E402
from .stats import ContingencyTable  # noqa: E402

DECADE_STEM = "fig_missingness_by_decade"
ROC_STEM = "fig_roc"

_SVG_META = {"Date": None, "Creator": "cohort"}
_PNG_META = {"Software": "cohort"}


def _save(fig, out_dir: Path, stem: str) -> list[Path]:
    paths = [out_dir / f"{stem}.svg", out_dir / f"{stem}.png"]
    with plt.rc_context({"svg.hashsalt": "cohort", "svg.fonttype": "path"}):
        fig.savefig(paths[0], format="svg", metadata=_SVG_META)
        fig.savefig(paths[1], format="png", dpi=200, metadata=_PNG_META)
    plt.close(fig)
    return paths


def decade_figure(table: ContingencyTable, out_dir: Path) -> list[Path]:
    if table is None or len(table.row_labels) == 0:
        raise DegenerateTable("no decade cross-tabulation to plot")
    totals = table.counts.sum(axis=1)
    pct = 100.0 * table.row_rates()
    sidecar = out_dir / f"{DECADE_STEM}.csv"
    write_rows(sidecar, ("entry_decade", "n", "missing", "missing_pct"), (
        (lv, int(t), int(m), f"{p:.4f}") for lv, t, m, p in zip(table.row_labels, totals, table.counts[:, 1], pct)
    ))
    labels = [f"{lv}s" if isinstance(lv, int) else str(lv) for lv in table.row_labels]
    x = list(range(len(labels)))
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.fill_between(x, pct, color="#8c2d04", alpha=0.35, step=None)
    ax.plot(x, pct, color="#8c2d04", marker="o")
    for xi, p in zip(x, pct):
        ax.annotate(f"{p:.1f}%", (xi, p), textcoords="offset points", xytext=(0, 6), ha="center", fontsize=8)
    ax.set_xticks(x, labels)
    ax.set_ylim(0, 105)
    ax.set_xlabel("Entry decade")
    ax.set_ylabel("Missing school type (%)")
    ax.set_title("Missing school information by entry decade")
    fig.tight_layout()
    return [sidecar] + _save(fig, out_dir, DECADE_STEM)


def roc_figure(roc: RocCurve, out_dir: Path) -> list[Path]:
    if roc is None or not roc.points:
        raise DegenerateTable("no ROC curve to plot")
    sidecar = out_dir / f"{ROC_STEM}.csv"
    write_rows(sidecar, ("false_positive_rate", "true_positive_rate"),
               ((f"{fx:.10f}", f"{ty:.10f}") for fx, ty in roc.points))
    xs = [p[0] for p in roc.points]
    ys = [p[1] for p in roc.points]
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.plot(xs, ys, color="#08519c", lw=2, label=f"AUC = {roc.auc:.4f}")
    ax.plot([0, 1], [0, 1], color="grey", ls="--", lw=1)
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1.01)
    ax.set_xlabel("False positive rate")
    ax.set_ylabel("True positive rate")
    ax.set_title("ROC: predicting missing school type")
    ax.legend(loc="lower right")
    fig.tight_layout()
    return [sidecar] + _save(fig, out_dir, ROC_STEM)


def emit_figures(decade_table: ContingencyTable | None, roc: RocCurve | None, out_dir: Path) -> list[Path]:
    out_dir = Path(out_dir)
    return decade_figure(decade_table, out_dir) + roc_figure(roc, out_dir)
