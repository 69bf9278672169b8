"""Figure rendering over the simulator's file contracts.

Inputs are the trace CSV (iter, step, min_weighted_sinr, min_rate_bps_hz,
residual, p_*_dbm) and the scenario JSON dump; nothing here imports the
simulator itself.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

TRACE_PREFIX = ("iter", "step", "min_weighted_sinr", "min_rate_bps_hz",
                "residual")
STEP_TYPES = {"init", "beamforming", "power"}

FIGSIZE = (6.4, 4.2)
DPI = 150


class TraceParseError(ValueError):
    """Malformed trace CSV; message carries row/column diagnostics."""


@dataclass
class TracePlotSpec:
    """What to draw: labeled trace files and an output image path."""

    traces: list          # [(path, label), ...]
    out_path: str | Path
    xlabel: str = "step"
    ylabel: str = "minimum rate [bits/s/Hz]"
    baseline: float | None = None       # horizontal overlay, e.g. an MF level
    baseline_label: str = "baseline"
    title: str | None = None
    records: list = field(init=False, default_factory=list)

    def __post_init__(self):
        if not self.traces:
            raise ValueError("need at least one input trace")
        labels = [lab for _, lab in self.traces]
        if len(set(labels)) != len(labels):
            raise ValueError(f"trace labels must be unique, got {labels}")


def read_trace(path) -> dict:
    """Parse a trace CSV into arrays; raise TraceParseError with diagnostics."""
    path = Path(path)
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows:
        raise TraceParseError(f"{path}: empty trace file")
    header = rows[0]
    if tuple(header[:5]) != TRACE_PREFIX:
        raise TraceParseError(
            f"{path}: header mismatch, expected columns {list(TRACE_PREFIX)} "
            f"first, got {header[:5]}")
    power_cols = header[5:]
    for j, name in enumerate(power_cols):
        if not (name.startswith("p_") and name.endswith("_dbm")):
            raise TraceParseError(
                f"{path}: column {5 + j} should be a p_*_dbm power column, "
                f"got '{name}'")
    if len(rows) == 1:
        raise TraceParseError(f"{path}: no data rows")

    steps, rates, wsinr, residual, powers = [], [], [], [], []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise TraceParseError(
                f"{path}: row {i} has {len(row)} fields, expected {len(header)}")
        if row[1] not in STEP_TYPES:
            raise TraceParseError(
                f"{path}: row {i}, column 'step': unknown step type '{row[1]}'")
        try:
            wsinr.append(float(row[2]))
            rates.append(float(row[3]))
            residual.append(float(row[4]))
            powers.append([float(x) for x in row[5:]])
        except ValueError as exc:
            raise TraceParseError(f"{path}: row {i}: {exc}") from exc
        steps.append(row[1])
    return {
        "steps": steps,
        "min_rate": np.array(rates),
        "min_weighted_sinr": np.array(wsinr),
        "residual": np.array(residual),
        "powers_dbm": np.array(powers),
    }


def plot_convergence(spec: TracePlotSpec) -> Path:
    """Min rate versus step index, one curve per trace.

    Beamforming and power steps get distinct markers; the initial snapshot
    (NaN metrics) is skipped.
    """
    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
    markers = {"beamforming": "^", "power": "o"}
    for path, label in spec.traces:
        data = read_trace(path)
        keep = [i for i, s in enumerate(data["steps"])
                if s != "init" and math.isfinite(data["min_rate"][i])]
        x = np.arange(1, len(keep) + 1)
        y = data["min_rate"][keep]
        (line,) = ax.plot(x, y, label=label, lw=1.5)
        for kind, mark in markers.items():
            sel = [j for j, i in enumerate(keep) if data["steps"][i] == kind]
            ax.plot(x[sel], y[sel], mark, color=line.get_color(), ms=5,
                    ls="none")
        spec.records.append((label, len(keep)))
    if spec.baseline is not None:
        ax.axhline(spec.baseline, color="gray", ls="--", lw=1.0,
                   label=spec.baseline_label)
    ax.set_xlabel(spec.xlabel)
    ax.set_ylabel(spec.ylabel)
    if spec.title:
        ax.set_title(spec.title)
    ax.grid(True, alpha=0.3)
    ax.legend()
    out = Path(spec.out_path)
    fig.savefig(out)
    plt.close(fig)
    return out


def read_scenario(path) -> dict:
    path = Path(path)
    try:
        with open(path) as f:
            d = json.load(f)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON: {exc}") from exc
    for key in ("ap_positions", "ue_positions", "clusters"):
        if key not in d:
            raise ValueError(f"{path}: missing scenario field '{key}'")
    return d


def plot_network(scenario_path, out_path) -> dict:
    """AP grid, UE drops, and serving-cluster edges; returns drawn counts."""
    scn = read_scenario(scenario_path)
    aps = np.asarray(scn["ap_positions"], dtype=float)
    ues = np.asarray(scn["ue_positions"], dtype=float)
    clusters = np.asarray(scn["clusters"], dtype=int)

    fig, ax = plt.subplots(figsize=(5.4, 5.4), dpi=DPI)
    n_edges = 0
    for k in range(len(ues)):
        for l in clusters[k]:
            ax.plot([ues[k, 0], aps[l, 0]], [ues[k, 1], aps[l, 1]],
                    color="lightsteelblue", lw=0.6, zorder=1)
            n_edges += 1
    ax.plot(aps[:, 0], aps[:, 1], "s", color="tab:red", ms=7, zorder=3,
            label=f"APs ({len(aps)})")
    ax.plot(ues[:, 0], ues[:, 1], ".", color="tab:blue", ms=5, zorder=2,
            label=f"UEs ({len(ues)})")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_aspect("equal")
    ax.legend(loc="upper right", framealpha=0.9)
    fig.savefig(Path(out_path))
    plt.close(fig)
    return {"n_aps": len(aps), "n_ues": len(ues), "n_edges": n_edges}
