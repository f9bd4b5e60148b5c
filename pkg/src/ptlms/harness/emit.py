"""CSV, SVG and text artifacts for learning curves and complexity reports."""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from ..afcore import ComplexityReport, format_complexity_tables
from .experiment import LearningCurve


def _values(curve):
    return np.asarray(curve.msd_db if isinstance(curve, LearningCurve) else curve, dtype=float)


def _fmt(v):
    # repr gives the shortest string that parses back to the same double
    return "nan" if math.isnan(v) else repr(float(v))


def write_csv(curves: dict, path):
    """One ``iteration`` column plus one MSD column (dB) per curve.

    Curves of unequal length leave blank cells past their end. An empty
    curve set writes the header line only.
    """
    path = Path(path)
    labels = list(curves)
    cols = [_values(curves[k]) for k in labels]
    n = max((len(c) for c in cols), default=0)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iteration"] + labels)
        for i in range(n):
            w.writerow([i] + [_fmt(c[i]) if i < len(c) else "" for c in cols])
    return path


def read_csv(path) -> dict:
    """Inverse of :func:`write_csv`; returns ``{label: ndarray}``."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:1] != ["iteration"]:
        raise ValueError(f"{path}: not a learning-curve CSV")
    labels = rows[0][1:]
    data = {k: [] for k in labels}
    for row in rows[1:]:
        for k, cell in zip(labels, row[1:]):
            if cell != "":
                data[k].append(float(cell))
    return {k: np.array(v) for k, v in data.items()}


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    # fixed element ids and no timestamp keep the SVG byte-stable
    matplotlib.rcParams["svg.hashsalt"] = "ptlms"
    return plt


def write_svg(curves: dict, path, title="", ylabel="Normalized MSD (dB)", markers=None):
    """Line plot of the curves against iteration; optional vertical markers."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label, c in curves.items():
        y = _values(c)
        ax.plot(np.arange(len(y)), y, linewidth=1.0, label=label)
    for x in markers or ():
        ax.axvline(x, color="0.5", linestyle=":", linewidth=0.8)
    ax.set_xlabel("Iterations")
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if curves:
        ax.legend(loc="upper right", fontsize=8)
    ax.grid(True, linewidth=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return Path(path)


def write_bars(rows: dict, columns, path, title=""):
    """Grouped bar chart, ``rows`` maps a group name to one value per column."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4.5))
    groups = list(rows)
    width = 0.8 / max(len(columns), 1)
    x = np.arange(len(groups))
    for j, col in enumerate(columns):
        ax.bar(x + j * width, [rows[g][j] for g in groups], width, label=col)
    ax.set_xticks(x + width * (len(columns) - 1) / 2)
    ax.set_xticklabels(groups)
    ax.set_ylabel("Sparseness")
    ax.set_ylim(0, 1)
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return Path(path)


def write_table_csv(rows: dict, columns, path, key="name"):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([key] + list(columns))
        for name, vals in rows.items():
            w.writerow([name] + [_fmt(v) for v in vals])
    return Path(path)


def write_complexity(report: ComplexityReport, path):
    text = format_complexity_tables(report)
    Path(path).write_text(text)
    return text


def emit(curves: dict, path, title=""):
    """Write ``<path>.csv`` and ``<path>.svg``; returns both paths."""
    base = Path(path)
    if base.suffix in (".csv", ".svg"):
        base = base.with_suffix("")
    base.parent.mkdir(parents=True, exist_ok=True)
    c = write_csv(curves, base.with_suffix(".csv"))
    s = write_svg(curves, base.with_suffix(".svg"), title=title)
    return c, s
