"""Figure rendering for solver output directories.

Renders the stabilization record (energy estimates vs iteration), the
eigenfunction profiles, and — when pointed at a sweep directory — the
spectrum against the sweep parameter.  Figures land next to the delimited
output as PNG files.
"""

from __future__ import annotations

import csv
import json
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _read_csv_columns(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [row for row in reader]
    data = np.array([[float(v) for v in row] for row in rows])
    return header, data


def render_history(history_csv: str, out_png: str) -> str:
    header, data = _read_csv_columns(history_csv)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    k = data[:, 0]
    for i in range(1, data.shape[1]):
        ax.plot(k, data[:, i], lw=1.0, label=header[i].replace("_", ""))
    ax.set_xlabel("iteration k")
    ax.set_ylabel("energy estimate")
    ax.set_title("stabilization of the block iteration")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_png, dpi=150)
    plt.close(fig)
    return out_png


def render_eigenfunctions(eigenfunctions_csv: str, out_png: str, x_window: float = 5.0) -> str:
    header, data = _read_csv_columns(eigenfunctions_csv)
    x = data[:, 0]
    keep = np.abs(x) <= x_window
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for i in range(1, data.shape[1]):
        ax.plot(x[keep], data[keep, i], lw=1.0, label=header[i].replace("_", ""))
    ax.set_xlabel("x")
    ax.set_ylabel("amplitude")
    ax.set_title("eigenfunctions")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_png, dpi=150)
    plt.close(fig)
    return out_png


def render_sweep(sweep_csv: str, out_png: str) -> str:
    header, data = _read_csv_columns(sweep_csv)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    states = np.unique(data[:, 1]).astype(int)
    for n in states:
        rows = data[data[:, 1] == n]
        order = np.argsort(rows[:, 0])
        ax.plot(rows[order, 0], rows[order, 2], "o-", ms=3, lw=1.0, label=f"E{n}")
    ax.set_xlabel(header[0])
    ax.set_ylabel("E")
    ax.set_title(f"spectrum vs {header[0]}")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_png, dpi=150)
    plt.close(fig)
    return out_png


def render_run(run_dir: str, out_dir: str) -> list[str]:
    """Render every figure the directory's contents support."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    history = os.path.join(run_dir, "history.csv")
    if os.path.exists(history):
        written.append(render_history(history, os.path.join(out_dir, "history.png")))
    functions = os.path.join(run_dir, "eigenfunctions.csv")
    if os.path.exists(functions):
        window = 5.0
        manifest_path = os.path.join(run_dir, "manifest.json")
        if os.path.exists(manifest_path):
            with open(manifest_path) as fh:
                manifest = json.load(fh)
            window = min(5.0, manifest.get("grid", {}).get("a", 5.0))
        written.append(
            render_eigenfunctions(functions, os.path.join(out_dir, "eigenfunctions.png"), x_window=window)
        )
    sweep = os.path.join(run_dir, "sweep.csv")
    if os.path.exists(sweep):
        written.append(render_sweep(sweep, os.path.join(out_dir, "sweep.png")))
    return written
