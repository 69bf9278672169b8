"""Render every figure an artifact directory supports.

Usage:  cellfree-figures ARTIFACT_DIR [--out DIR] [--format png|svg]

Picks up trace*.csv files (one convergence curve each, labeled from the file
name) and scenario.json (network layout plot).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .plots import TraceParseError, TracePlotSpec, plot_convergence, plot_network


def trace_label(path: Path) -> str:
    name = path.stem
    return name[len("trace_"):] if name.startswith("trace_") else name


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cellfree-figures",
        description="Plot convergence curves and network layout from "
                    "cellfree-maxmin artifacts")
    parser.add_argument("artifact_dir", help="directory with trace*.csv / scenario.json")
    parser.add_argument("--out", default=None, help="output directory (default: artifact dir)")
    parser.add_argument("--format", choices=["png", "svg"], default="png")
    args = parser.parse_args(argv)

    art = Path(args.artifact_dir)
    out = Path(args.out) if args.out else art
    if not art.is_dir():
        print(f"error: {art} is not a directory", file=sys.stderr)
        return 2
    out.mkdir(parents=True, exist_ok=True)

    traces = sorted(art.glob("trace*.csv"))
    scenario = art / "scenario.json"
    if not traces and not scenario.exists():
        print(f"error: nothing to plot in {art}", file=sys.stderr)
        return 2

    try:
        if traces:
            spec = TracePlotSpec(
                traces=[(p, trace_label(p)) for p in traces],
                out_path=out / f"convergence.{args.format}")
            plot_convergence(spec)
            print(f"wrote {spec.out_path} "
                  f"({', '.join(f'{lab}: {n} steps' for lab, n in spec.records)})")
        if scenario.exists():
            counts = plot_network(scenario, out / f"network.{args.format}")
            print(f"wrote {out / f'network.{args.format}'} "
                  f"({counts['n_aps']} APs, {counts['n_ues']} UEs, "
                  f"{counts['n_edges']} edges)")
    except (TraceParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
