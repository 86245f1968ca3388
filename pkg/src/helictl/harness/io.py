"""CSV export/import of time series and emission of a plotting script."""

from __future__ import annotations

import csv
import os
from pathlib import Path
from typing import Mapping

import numpy as np

from .simulate import BASE_COLUMNS, DIAG_COLUMNS, TimeSeries


def export_csv(series: TimeSeries, path, diag: bool = False, stride: int = 1) -> Path:
    """Write ``series`` with the fixed header (plus diagnostics columns when
    ``diag``). Floats use shortest round-trip formatting, so reading the file
    back reproduces every value bit for bit."""
    path = Path(path)
    if diag:
        columns = tuple(c for c in series.columns)
    else:
        columns = BASE_COLUMNS
    sub = series.select(columns)
    rows = sub.data[::stride].tolist()
    try:
        with open(path, "w", newline="") as fh:
            fh.write(",".join(columns) + "\n")
            fh.writelines(",".join(map(repr, row)) + "\n" for row in rows)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write CSV: {exc.strerror}", str(path)) from None
    return path


def read_csv(path, dt: float | None = None) -> TimeSeries:
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            data = [[float(v) for v in row] for row in reader]
    except OSError as exc:
        raise OSError(exc.errno, f"cannot read CSV: {exc.strerror}", str(path)) from None
    arr = np.array(data, dtype=float).reshape(-1, len(header))
    if dt is None:
        dt = float(arr[1, 0] - arr[0, 0]) if arr.shape[0] > 1 else 0.0
    return TimeSeries(tuple(header), arr, dt)


_PLOT_TEMPLATE = '''\
"""Tracking-error and control-input figures from simulation CSV output.

Generated file; run with ``python {name}``. Requires matplotlib.
"""
import csv
import math
import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
RUNS = {runs!r}


def load(path):
    with open(os.path.join(HERE, path), newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {{k: [float(r[k]) for r in rows] for k in rows[0]}} if rows else {{}}


def main():
    data = {{label: load(path) for label, path in RUNS.items()}}
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for label, d in data.items():
        ax.plot(d["t"], [math.degrees(v) for v in d["e1"]], label=label)
    ax.set_xlabel("t (s)")
    ax.set_ylabel("elevation tracking error (deg)")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(os.path.join(HERE, "tracking_error.png"), dpi=150)

    fig, ax = plt.subplots(figsize=(6, 3.5))
    for label, d in data.items():
        ax.plot(d["t"], d["u1"], label=label)
    ax.set_xlabel("t (s)")
    ax.set_ylabel("control input u1")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(os.path.join(HERE, "control_input.png"), dpi=150)


if __name__ == "__main__":
    main()
'''


def emit_plot_script(csv_paths: Mapping[str, os.PathLike] | TimeSeries, path,
                     label: str = "proposed") -> Path:
    """Write a matplotlib script rendering ``tracking_error.png`` and
    ``control_input.png`` from the given CSV files (``label -> path``).

    Passing a ``TimeSeries`` instead writes its CSV next to the script first.
    """
    path = Path(path)
    if isinstance(csv_paths, TimeSeries):
        csv_path = path.with_suffix(".csv")
        export_csv(csv_paths, csv_path)
        csv_paths = {label: csv_path}
    runs = {}
    for lbl, p in csv_paths.items():
        p = Path(p)
        try:
            runs[lbl] = os.path.relpath(p, path.parent)
        except ValueError:
            runs[lbl] = str(p.resolve())
    text = _PLOT_TEMPLATE.format(name=path.name, runs=runs)
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write plot script: {exc.strerror}", str(path)) from None
    return path
