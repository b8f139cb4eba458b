"""Comparison reports over run summaries.

Reads one or more ``*.summary.csv`` files, prints an aligned table, and can
additionally write the comparison as CSV plus one bar-chart figure per
metric next to it.
"""

from __future__ import annotations

import csv
import math
import os

from .net_model import ParseError
from .sim import SUMMARY_HEADER

METRICS = SUMMARY_HEADER.split(",")
_LABELS = {
    "revenue_rate": "revenue/time",
    "acceptance_ratio": "acceptance ratio",
    "rc_ratio": "revenue/cost",
    "avg_snf": "avg fragmentation",
    "avg_power_watts": "avg power (W)",
    "rejected_resource_ratio": "rejected resources",
}


def load_summary(path) -> dict[str, float]:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ParseError(path, 1, "summary file has no data row")
    row = rows[0]
    out = {}
    for key in METRICS:
        if key not in row or row[key] is None:
            raise ParseError(path, 1, f"summary file lacks column {key!r}")
        try:
            out[key] = float(row[key])
        except ValueError as exc:
            raise ParseError(path, 2, f"column {key!r}: {exc}") from exc
    return out


def run_label(path) -> str:
    name = os.path.basename(str(path))
    for suffix in (".summary.csv", ".csv"):
        if name.endswith(suffix):
            name = name[: -len(suffix)]
    return name


def load_runs(paths, labels=None) -> list[tuple[str, dict[str, float]]]:
    labels = labels or [run_label(p) for p in paths]
    return [(label, load_summary(path)) for label, path in zip(labels, paths)]


def _fmt(value: float) -> str:
    return "n/a" if math.isnan(value) else f"{value:.4f}"


def format_table(runs: list[tuple[str, dict[str, float]]]) -> str:
    """Aligned text table: one row per metric, one column per run."""
    headers = ["metric"] + [label for label, _ in runs]
    rows = [[_LABELS[m]] + [_fmt(values[m]) for _, values in runs]
            for m in METRICS]
    widths = [max(len(str(row[c])) for row in [headers] + rows)
              for c in range(len(headers))]
    def line(cells):
        return "  ".join(str(c).ljust(w) for c, w in zip(cells, widths)).rstrip()
    divider = "  ".join("-" * w for w in widths)
    return "\n".join([line(headers), divider] + [line(r) for r in rows])


def write_comparison_csv(runs, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["run"] + METRICS)
        for label, values in runs:
            writer.writerow([label] + [f"{values[m]:.6f}" for m in METRICS])


def render_figures(runs, prefix) -> list[str]:
    """One bar chart per metric, written as ``<prefix>_<metric>.png``."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    labels = [label for label, _ in runs]
    written = []
    for metric in METRICS:
        values = [values[metric] for _, values in runs]
        fig, ax = plt.subplots(figsize=(max(4.0, 1.2 * len(labels) + 2.0), 3.2))
        ax.bar(labels, [0.0 if math.isnan(v) else v for v in values],
               color="#4878a8")
        ax.set_ylabel(_LABELS[metric])
        ax.set_title(f"{_LABELS[metric]} by run")
        ax.tick_params(axis="x", rotation=20)
        fig.tight_layout()
        out = f"{prefix}_{metric}.png"
        fig.savefig(out, dpi=150)
        plt.close(fig)
        written.append(out)
    return written
