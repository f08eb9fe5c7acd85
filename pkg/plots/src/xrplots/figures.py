"""Figure builders over sweep results CSV files.

Reads the results.csv contract produced by the simulation harness (one row
per sweep cell x policy x seed) and renders three figure kinds: mean offload
ratio vs distance grouped by a column, mean energy vs distance per policy
truncated at the FLR limit, and the offload decision-region strip.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

FIGURE_KINDS = ("offload-vs-distance", "energy-vs-distance", "regions")

REQUIRED_COLUMNS = {
    "offload-vs-distance": ("distance", "policy", "mean_offload_ratio"),
    "energy-vs-distance": ("distance", "policy", "mean_energy", "flr_total"),
    "regions": ("distance", "policy", "mean_offload_ratio"),
}


class FigureError(ValueError):
    """Raised for unusable inputs: empty CSV, missing columns, bad spec."""


@dataclass
class FigureSpec:
    input_csv: str
    kind: str
    output: str
    group_by: str = "policy"
    policy: str = "partial"
    flr_limit: float = 0.1
    region_high: float = 0.9
    region_low: float = 0.1
    title: str = ""

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise FigureError(f"unknown figure kind: {self.kind!r} "
                              f"(expected one of {FIGURE_KINDS})")

    @classmethod
    def from_file(cls, path) -> "FigureSpec":
        with open(path) as fh:
            return cls(**json.load(fh))


def load_results(path, required_columns) -> list[dict]:
    """Read results rows, checking the columns the figure needs."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required_columns if c not in header]
        if missing:
            raise FigureError(
                f"{path}: missing required columns {missing}; found {header}")
        rows = [row for row in reader if not row.get("error")]
    if not rows:
        raise FigureError(f"{path}: no usable result rows")
    return rows


def _mean_by(rows, key_fn, value_col) -> dict:
    acc: dict = {}
    for row in rows:
        acc.setdefault(key_fn(row), []).append(float(row[value_col]))
    return {k: float(np.mean(v)) for k, v in acc.items()}


def offload_series(rows, group_by: str, policy: str) -> dict:
    """Per group value: (distances, mean offload ratios), seeds averaged."""
    rows = [r for r in rows if r["policy"] == policy]
    if not rows:
        raise FigureError(f"no rows for policy {policy!r}")
    series = {}
    for group in sorted({r[group_by] for r in rows}):
        sub = [r for r in rows if r[group_by] == group]
        means = _mean_by(sub, lambda r: float(r["distance"]),
                         "mean_offload_ratio")
        distances = sorted(means)
        series[group] = (distances, [means[d] for d in distances])
    return series


def energy_series(rows, group_by: str, flr_limit: float) -> dict:
    """Per group value: (distances, mean energies) truncated at the limit.

    A series stops just before the first distance whose mean FLR goes above
    the limit, mirroring coverage-limited plotting.
    """
    series = {}
    for group in sorted({r[group_by] for r in rows}):
        sub = [r for r in rows if r[group_by] == group]
        energy = _mean_by(sub, lambda r: float(r["distance"]), "mean_energy")
        flr = _mean_by(sub, lambda r: float(r["distance"]), "flr_total")
        distances = []
        for d in sorted(energy):
            if flr[d] > flr_limit:
                break
            distances.append(d)
        series[group] = (distances, [energy[d] for d in distances])
    return series


def region_table(rows, policy: str, high: float, low: float) -> list[dict]:
    """Classify each distance by the policy's mean offload ratio."""
    rows = [r for r in rows if r["policy"] == policy]
    if not rows:
        raise FigureError(f"no rows for policy {policy!r}")
    means = _mean_by(rows, lambda r: float(r["distance"]),
                     "mean_offload_ratio")
    table = []
    for d in sorted(means):
        alpha = means[d]
        region = ("always" if alpha >= high
                  else "never" if alpha <= low else "partial")
        table.append({"distance": d, "mean_alpha": alpha, "region": region})
    return table


REGION_COLORS = {"always": "#2c7fb8", "partial": "#7fcdbb", "never": "#edf8b1"}


def render(spec: FigureSpec) -> dict:
    """Render one figure to spec.output; returns the plotted data series."""
    rows = load_results(spec.input_csv, REQUIRED_COLUMNS[spec.kind])

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    try:
        if spec.kind == "offload-vs-distance":
            series = offload_series(rows, spec.group_by, spec.policy)
            for group, (x, y) in series.items():
                ax.plot(x, y, marker="o", label=f"{spec.group_by}={group}")
            ax.set_ylabel("mean offload ratio")
            ax.set_ylim(-0.05, 1.05)
            ax.legend()
        elif spec.kind == "energy-vs-distance":
            series = energy_series(rows, spec.group_by, spec.flr_limit)
            for group, (x, y) in series.items():
                ax.plot(x, [v * 1e3 for v in y], marker="o", label=str(group))
            ax.set_ylabel("mean frame energy (mJ)")
            ax.legend(title=spec.group_by)
        else:
            table = region_table(rows, spec.policy, spec.region_high,
                                 spec.region_low)
            series = {"regions": table}
            distances = [row["distance"] for row in table]
            edges = distances + [2 * distances[-1] - distances[-2]
                                 if len(distances) > 1 else distances[-1] + 1.0]
            for i, row in enumerate(table):
                ax.axvspan(edges[i], edges[i + 1],
                           color=REGION_COLORS[row["region"]])
            handles = [plt.Rectangle((0, 0), 1, 1, color=c)
                       for c in REGION_COLORS.values()]
            ax.legend(handles, REGION_COLORS.keys(), loc="upper right")
            ax.set_yticks([])
            ax.set_xlim(edges[0], edges[-1])
        ax.set_xlabel("distance (m)")
        if spec.title:
            ax.set_title(spec.title)
        ax.grid(True, alpha=0.4)
        fig.tight_layout()
        fig.savefig(spec.output)
    finally:
        plt.close(fig)
    return series
