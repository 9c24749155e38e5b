"""File emission: delimited curve tables and rendered figures.

Output is deterministic byte-for-byte for identical inputs: floats are
written with shortest round-trip repr, and the SVG backend is salted
with the configuration hash instead of object ids or timestamps.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .curves import CoverageCurve
from .errors import DomainError

__all__ = ["ResultRow", "write_curve_csv", "read_curve_csv", "render_curve_figure"]


@dataclass
class ResultRow:
    """One sweep point: the swept parameter, its value and the curve."""

    sweep_param: str
    sweep_value: float | str
    curve: CoverageCurve


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return repr(float(x))


def write_curve_csv(rows: list[ResultRow], path, threshold_label: str = "threshold_db"):
    """Delimited table: sweep_param, sweep_value, threshold, coverage, stderr."""
    if not rows:
        raise DomainError("nothing to emit")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["sweep_param", "sweep_value", threshold_label, "coverage", "stderr"])
        for row in rows:
            curve = row.curve
            se = curve.stderr if curve.stderr is not None else [None] * len(curve.coverage)
            for t, c, s in zip(curve.thresholds_db, curve.coverage, se):
                writer.writerow(
                    [row.sweep_param, _fmt(row.sweep_value), _fmt(t), _fmt(c), _fmt(s)]
                )
    return path


def read_curve_csv(path) -> list[ResultRow]:
    """Inverse of write_curve_csv (used for round-trip checks)."""
    rows: dict[str, ResultRow] = {}
    order = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data: dict[str, list] = {}
        for rec in reader:
            key = rec[1]
            data.setdefault(key, []).append(rec)
            if key not in order:
                order.append(key)
    out = []
    for key in order:
        recs = data[key]
        thr = np.array([float(r[2]) for r in recs])
        cov = np.array([float(r[3]) for r in recs])
        se = None
        if any(r[4] != "" for r in recs):
            se = np.array([float(r[4]) if r[4] != "" else math.nan for r in recs])
        sweep_param = recs[0][0]
        try:
            sweep_value = float(key)
        except ValueError:
            sweep_value = key
        out.append(ResultRow(sweep_param, sweep_value, CoverageCurve(thr, cov, se)))
    return out


def render_curve_figure(
    rows: list[ResultRow],
    path,
    title: str,
    xlabel: str,
    config_hash: str,
    ylabel: str = "coverage probability",
):
    """One line per sweep value; embeds the configuration hash in the
    file metadata so outputs are traceable and reproducible."""
    if not rows:
        raise DomainError("nothing to render")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with plt.rc_context({"svg.hashsalt": config_hash}):
        fig, ax = plt.subplots(figsize=(6.4, 4.2))
        for row in rows:
            label = (
                f"{row.sweep_param}={row.sweep_value}"
                if row.sweep_param != "none"
                else None
            )
            ax.plot(row.curve.thresholds_db, row.curve.coverage, marker="", label=label)
            if row.curve.stderr is not None:
                ax.fill_between(
                    row.curve.thresholds_db,
                    np.clip(row.curve.coverage - row.curve.stderr, 0, 1),
                    np.clip(row.curve.coverage + row.curve.stderr, 0, 1),
                    alpha=0.2,
                )
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.set_ylim(-0.02, 1.02)
        ax.grid(True, alpha=0.4)
        ax.set_title(title)
        if any(r.sweep_param != "none" for r in rows):
            ax.legend(fontsize=8)
        fig.tight_layout()
        metadata = {"Date": None} if path.suffix == ".svg" else {}
        fig.savefig(path, metadata=metadata)
        plt.close(fig)
    if path.suffix == ".svg":
        _append_hash_comment(path, config_hash)
    return path


def _append_hash_comment(path: Path, config_hash: str):
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(f"<!-- config-sha256: {config_hash} -->\n")
