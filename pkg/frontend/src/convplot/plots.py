"""CSV validation and log-log convergence plotting.

The only contract with the solver package is the CSV schema below; this
module never imports it.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

CSV_HEADER = ("level,n,h,ndof,err_h1,err_l2_omega,err_flux_dual,"
              "est_data,est_jump,est_neumann,est_gls,est_dual,est_total,"
              "c_ratio,rate_h1")

COLUMNS = CSV_HEADER.split(",")


class CsvError(ValueError):
    """Raised when a CSV file does not conform to the schema."""


@dataclass
class Series:
    """One convergence series read from a CSV file."""

    label: str
    h: np.ndarray
    err_h1: np.ndarray


@dataclass
class ValidationReport:
    path: str
    num_rows: int
    column_stats: Dict[str, Dict[str, float]]


@dataclass
class PlotSpec:
    """Inputs for one figure: CSV paths, labels, reference slope, output."""

    csv_paths: Sequence[str]
    out_path: str
    ref_slope: int = 1
    labels: Optional[Sequence[str]] = None
    title: Optional[str] = None
    figsize: tuple = (6.0, 4.5)

    def __post_init__(self):
        if not self.csv_paths:
            raise CsvError("at least one CSV path is required")
        if self.ref_slope not in (1, 2):
            raise ValueError("ref_slope must be 1 or 2")
        if self.labels is not None and len(self.labels) != len(self.csv_paths):
            raise ValueError("labels must match csv_paths in length")


def _read_rows(path: str) -> List[Dict[str, str]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvError("%s: empty file" % path)
        if header != COLUMNS:
            if len(header) != len(COLUMNS):
                raise CsvError("%s: header has %d columns, expected %d"
                               % (path, len(header), len(COLUMNS)))
            for got, want in zip(header, COLUMNS):
                if got != want:
                    raise CsvError("%s: unexpected column %r, expected %r"
                                   % (path, got, want))
        rows = [dict(zip(COLUMNS, row)) for row in reader if row]
    if not rows:
        raise CsvError("%s: no rows" % path)
    return rows


def validate_csv(path: str) -> ValidationReport:
    """Check a CSV against the schema; return row count and column stats.

    Raises CsvError naming the offending column when the header is wrong,
    or "no rows" when the data section is empty.
    """
    rows = _read_rows(path)
    stats: Dict[str, Dict[str, float]] = {}
    for col in COLUMNS:
        vals = []
        for row in rows:
            cell = row[col]
            if cell == "":
                continue
            try:
                vals.append(float(cell))
            except ValueError:
                raise CsvError("%s: non-numeric value %r in column %r"
                               % (path, cell, col))
        if vals:
            arr = np.asarray(vals)
            stats[col] = {"count": len(vals), "min": float(arr.min()),
                          "max": float(arr.max()), "mean": float(arr.mean())}
        else:
            stats[col] = {"count": 0}
    return ValidationReport(path=path, num_rows=len(rows), column_stats=stats)


def read_table(path: str, label: Optional[str] = None) -> Series:
    """Read the (h, err_h1) series from a schema-conforming CSV."""
    rows = _read_rows(path)
    h = np.asarray([float(r["h"]) for r in rows])
    err = np.asarray([float(r["err_h1"]) for r in rows])
    if np.any(h <= 0.0) or np.any(err < 0.0):
        raise CsvError("%s: h must be positive and err_h1 nonnegative" % path)
    return Series(label=label or path, h=h, err_h1=err)


def fitted_slope(h: np.ndarray, err: np.ndarray) -> float:
    """Least-squares slope of log(err) vs log(h)."""
    mask = err > 0.0
    if mask.sum() < 2:
        raise CsvError("need at least two positive errors to fit a slope")
    coeffs = np.polyfit(np.log(h[mask]), np.log(err[mask]), 1)
    return float(coeffs[0])


_MARKERS = ["o", "s", "^", "d", "v", "*", "x", "+"]


def plot_convergence(spec: PlotSpec) -> str:
    """Render one log-log figure of err_h1 vs h with a dashed reference line.

    The reference line has the requested slope and is anchored at the first
    data point of the first series.  Output is deterministic vector graphics
    (SVG) unless another extension is requested.
    """
    labels = spec.labels or [None] * len(spec.csv_paths)
    series = [read_table(p, lab) for p, lab in zip(spec.csv_paths, labels)]

    plt.rcParams["svg.hashsalt"] = "convplot"
    fig, ax = plt.subplots(figsize=spec.figsize)
    for i, s in enumerate(series):
        ax.loglog(s.h, s.err_h1, marker=_MARKERS[i % len(_MARKERS)],
                  label=s.label)

    h0, e0 = series[0].h[0], series[0].err_h1[0]
    h_all = np.concatenate([s.h for s in series])
    h_ref = np.array([h_all.max(), h_all.min()])
    ax.loglog(h_ref, e0 * (h_ref / h0) ** spec.ref_slope, "k--",
              label="slope %d" % spec.ref_slope)

    ax.set_xlabel("h")
    ax.set_ylabel(r"$\|u - u_h\|_{H^1}$")
    if spec.title:
        ax.set_title(spec.title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(spec.out_path, metadata={"Date": None})
    plt.close(fig)
    return spec.out_path
