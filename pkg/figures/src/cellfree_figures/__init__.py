"""Rendering of cellfree-maxmin run artifacts (trace CSV / scenario JSON)."""

from .plots import (TraceParseError, TracePlotSpec, plot_convergence,
                    plot_network, read_scenario, read_trace)

__version__ = "0.1.0"

__all__ = [
    "TraceParseError",
    "TracePlotSpec",
    "plot_convergence",
    "plot_network",
    "read_scenario",
    "read_trace",
]
