"""Static figure rendering for sweep CSVs (offline, vector output only)."""

from __future__ import annotations

import csv
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")  # no display server
import matplotlib.pyplot as plt  # noqa: E402


def read_long_csv(path):
    """Rows of a long-form sweep CSV as a list of dicts."""
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def render_metric_plot(csv_path, out_path, metrics=None, logx=False, logy=False,
                       title=None):
    """Line chart of metric vs swept value, one series per metric.

    The CSV must carry the long-form columns (parameter, value, metric,
    result); rows with non-numeric results are skipped.
    """
    rows = read_long_csv(csv_path)
    if not rows:
        raise ValueError(f"{csv_path}: empty CSV")
    required = {"parameter", "value", "metric", "result"}
    missing = required - set(rows[0])
    if missing:
        raise ValueError(f"{csv_path}: missing columns {sorted(missing)}")

    series = defaultdict(list)
    for row in rows:
        if metrics and row["metric"] not in metrics:
            continue
        try:
            x = float(row["value"])
            y = float(row["result"])
        except ValueError:
            continue
        series[row["metric"]].append((x, y))
    if not series:
        raise ValueError("no plottable rows (check metric names)")

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for name in sorted(series):
        pts = sorted(series[name])
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o",
                markersize=3, label=name)
    if logx:
        ax.set_xscale("log")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(rows[0]["parameter"])
    ax.set_ylabel("metric value")
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    out_path = Path(out_path)
    if out_path.suffix.lower() not in (".svg", ".pdf"):
        out_path = out_path.with_suffix(".svg")
    fig.savefig(out_path)
    plt.close(fig)
    return out_path


def render_error_summary(labeled_errors, out_path, title=None):
    """Bar chart of keyed-vs-keyless error rates for one run report."""
    labels = [k for k, v in labeled_errors.items() if v is not None]
    values = [labeled_errors[k] for k in labels]
    if not labels:
        raise ValueError("nothing to plot")
    fig, ax = plt.subplots(figsize=(5.0, 3.5))
    ax.bar(range(len(labels)), values, color="steelblue")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=20, ha="right", fontsize=8)
    ax.set_ylabel("error probability")
    ax.set_ylim(0, 1.05 * max(max(values), 1e-6))
    if title:
        ax.set_title(title)
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    out_path = Path(out_path)
    if out_path.suffix.lower() not in (".svg", ".pdf"):
        out_path = out_path.with_suffix(".svg")
    fig.savefig(out_path)
    plt.close(fig)
    return out_path


def render_curve(xs, ys_by_label, out_path, xlabel="n", ylabel="bits",
                 logx=False, logy=False, title=None):
    """Simple multi-series line figure (used for entropy-vs-n curves)."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, ys in ys_by_label.items():
        ax.plot(xs, ys, label=label)
    if logx:
        ax.set_xscale("log")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    out_path = Path(out_path)
    if out_path.suffix.lower() not in (".svg", ".pdf"):
        out_path = out_path.with_suffix(".svg")
    fig.savefig(out_path)
    plt.close(fig)
    return out_path
