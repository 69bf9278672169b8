"""End-to-end runner: config in, scenario/trace/result artifacts out.

Exit codes: 0 success, 2 invalid configuration or unreadable inputs,
3 degenerate beamformer (UatF SINR undefined for some UE).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import channel, powerctl, scenario as scenario_mod
from .errors import ConfigurationError, DegenerateBeamformerError
from .scenario import NetworkConfig

EXIT_CONFIG = 2
EXIT_DEGENERATE = 3


@dataclass
class RunResult:
    p_lin: np.ndarray
    rates: np.ndarray
    min_weighted_sinr: float
    iterations: int
    wall_time_s: float
    config: dict
    seed: int
    algorithm: str
    beamformer: str

    def to_dict(self) -> dict:
        with np.errstate(divide="ignore"):
            p_dbm = 10.0 * np.log10(self.p_lin)
        return {
            "algorithm": self.algorithm,
            "beamformer": self.beamformer,
            "seed": self.seed,
            "powers_dbm": [round(float(x), 10) for x in p_dbm],
            "powers_lin": [float(x) for x in self.p_lin],
            "rates_bps_hz": [float(r) for r in self.rates],
            "min_rate_bps_hz": float(np.min(self.rates)),
            "min_weighted_sinr": float(self.min_weighted_sinr),
            "iterations": self.iterations,
            "wall_time_s": self.wall_time_s,
            "config": self.config,
        }


def _parse_weights(text: str, K: int) -> np.ndarray | None:
    if text is None or text == "uniform":
        return None
    try:
        w = np.array([float(x) for x in text.split(",")], dtype=float)
    except ValueError as exc:
        raise ConfigurationError(f"cannot parse weights '{text}'") from exc
    if len(w) != K or np.any(w <= 0):
        raise ConfigurationError(f"weights must be {K} positive numbers")
    return w


def _load_config(args) -> NetworkConfig:
    cfg = NetworkConfig.from_json(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    w = _parse_weights(args.weights, cfg.K)
    if w is not None:
        cfg.weights = w.tolist()
    cfg.validate()
    return cfg


def run(config: NetworkConfig, algorithm: str, beamformer: str, tol: float,
        max_iters: int, out_dir: Path) -> RunResult:
    """Build scenario + ensemble, run the selected algorithm, write artifacts."""
    t0 = time.perf_counter()
    scn = scenario_mod.build_scenario(config)
    ens = channel.sample_ensemble(scn, config.n_sim, config.seed,
                                  n_antennas=config.N)
    rule = {"tmmse": "team_mmse", "mf": "matched_filter"}[beamformer]
    algo = powerctl.algorithm_fp if algorithm == "fp" else powerctl.algorithm_ao
    result = algo(ens, scn, tol=tol, max_iter=max_iters, beamformer=rule)
    from .uatf import rate, sinr
    rates = rate(result.stats, result.p)
    min_wsinr = float(np.min(sinr(result.stats, result.p) / scn.weights))
    wall = time.perf_counter() - t0

    out_dir.mkdir(parents=True, exist_ok=True)
    scenario_mod.dump_scenario(scn, out_dir / "scenario.json")
    result.trace.write_csv(out_dir / "trace.csv")
    config_echo = {**config.to_dict(), "weights": config.weight_vector().tolist()}
    rr = RunResult(p_lin=result.p, rates=rates, min_weighted_sinr=min_wsinr,
                   iterations=result.iterations, wall_time_s=wall,
                   config=config_echo, seed=config.seed,
                   algorithm=algorithm, beamformer=beamformer)
    with open(out_dir / "result.json", "w") as f:
        json.dump(rr.to_dict(), f, indent=2)
    return rr


def sweep_weights(config: NetworkConfig, weight_list, algorithm: str,
                  beamformer: str, tol: float, max_iters: int,
                  out_dir: Path) -> list[RunResult]:
    """One converged run per weight vector; rate tuples trace the Pareto boundary."""
    results = []
    for i, w in enumerate(weight_list):
        cfg_i = NetworkConfig.from_dict({**config.to_dict(),
                                         "weights": [float(x) for x in w]})
        results.append(run(cfg_i, algorithm, beamformer, tol, max_iters,
                           out_dir / f"sweep_{i:03d}"))
    with open(out_dir / "sweep.json", "w") as f:
        json.dump([r.to_dict() for r in results], f, indent=2)
    return results


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cellfree-maxmin",
        description="Joint max-min power control and distributed beamforming simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="network config JSON")
        p.add_argument("--algorithm", choices=["fp", "ao"], default="fp")
        p.add_argument("--beamformer", choices=["tmmse", "mf"], default="tmmse")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--tol", type=float, default=1e-6)
        p.add_argument("--max-iters", type=int, default=100)
        p.add_argument("--out", default="out", help="artifact directory")

    p_run = sub.add_parser("run", help="single optimization run")
    common(p_run)
    p_run.add_argument("--weights", default="uniform",
                       help="CSV list of positive weights, or 'uniform'")

    p_sweep = sub.add_parser("sweep", help="weight-sweep of converged runs")
    common(p_sweep)
    p_sweep.add_argument("--weights", action="append", required=True,
                         help="CSV weight vector; repeat the flag per sweep entry")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = _load_config(args)
            rr = run(cfg, args.algorithm, args.beamformer, args.tol,
                     args.max_iters, Path(args.out))
            print(f"min rate {rr.to_dict()['min_rate_bps_hz']:.4f} bits/s/Hz "
                  f"after {rr.iterations} outer iterations "
                  f"({rr.wall_time_s:.1f} s); artifacts in {args.out}")
        else:
            cfg = NetworkConfig.from_json(args.config)
            if args.seed is not None:
                cfg.seed = args.seed
            weight_list = []
            for text in args.weights:
                w = _parse_weights(text, cfg.K)
                weight_list.append(np.ones(cfg.K) if w is None else w)
            results = sweep_weights(cfg, weight_list, args.algorithm,
                                    args.beamformer, args.tol, args.max_iters,
                                    Path(args.out))
            for i, rr in enumerate(results):
                print(f"sweep {i}: rates "
                      + ", ".join(f"{r:.4f}" for r in rr.to_dict()["rates_bps_hz"]))
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DegenerateBeamformerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    return 0


if __name__ == "__main__":
    sys.exit(main())
