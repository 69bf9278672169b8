"""Interference calculus: standard interference mappings, the normalized
fixed-point iteration, and the two joint power-control/beamforming algorithms.

Both joint algorithms alternate a beamforming step (rebuild the distributed
beamformers at the current power vector) with a power step.  The fixed-point
variant applies one normalized interference-map evaluation per round; the
alternating-optimization variant solves the full max-min power problem for the
current beamformers with an inner fixed-point loop.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelEnsemble
from .errors import DegenerateBeamformerError, InternalConsistencyError
from .scenario import NetworkScenario
from .teammse import BeamformerSet, build_matched_filter, build_team_mmse
from .uatf import UatFStatistics, estimate_statistics, sinr

TRACE_COLUMNS = ("iter", "step", "min_weighted_sinr", "min_rate_bps_hz", "residual")


@dataclass
class TraceRecord:
    iteration: int
    step: str                     # "init" | "beamforming" | "power"
    p: np.ndarray
    weighted_sinr: np.ndarray | None
    residual: float

    @property
    def min_weighted_sinr(self) -> float:
        if self.weighted_sinr is None:
            return float("nan")
        return float(np.min(self.weighted_sinr))

    @property
    def min_rate(self) -> float:
        # weights do not reorder the rate minimum only when uniform, so the
        # unweighted minimum rate is recomputed from the raw SINRs
        if self.weighted_sinr is None or self._sinr is None:
            return float("nan")
        return float(np.min(np.log2(1.0 + self._sinr)))

    _sinr: np.ndarray | None = None


@dataclass
class ConvergenceTrace:
    records: list = field(default_factory=list)
    converged: bool = False

    def append(self, iteration, step, p, sinr_values, weights, residual):
        weighted = None if sinr_values is None else np.asarray(sinr_values) / weights
        rec = TraceRecord(iteration=iteration, step=step, p=np.array(p, dtype=float),
                          weighted_sinr=weighted, residual=float(residual))
        rec._sinr = None if sinr_values is None else np.asarray(sinr_values, dtype=float)
        self.records.append(rec)

    def min_rates(self) -> np.ndarray:
        return np.array([r.min_rate for r in self.records])

    def power_records(self) -> list:
        return [r for r in self.records if r.step == "power"]

    def write_csv(self, path):
        K = len(self.records[0].p) if self.records else 0
        header = list(TRACE_COLUMNS) + [f"p_{k + 1}_dbm" for k in range(K)]
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(header)
            for i, rec in enumerate(self.records):
                with np.errstate(divide="ignore"):
                    p_dbm = 10.0 * np.log10(rec.p)
                w.writerow([i, rec.step,
                            f"{rec.min_weighted_sinr:.12g}",
                            f"{rec.min_rate:.12g}",
                            f"{rec.residual:.12g}"]
                           + [f"{x:.6f}" for x in p_dbm])


@dataclass
class MapEvaluation:
    T: np.ndarray
    sinr: np.ndarray
    stats: UatFStatistics
    beamformers: BeamformerSet | None = None


@dataclass
class InterferenceMap:
    """T(p) = diag(weights) f(p) for a standard interference function f."""

    weights: np.ndarray
    kind: str                     # "fixed_beamformer" | "team_optimal"
    _fn: callable = None

    def evaluate(self, p: np.ndarray) -> MapEvaluation:
        return self._fn(np.asarray(p, dtype=float))

    def __call__(self, p: np.ndarray) -> np.ndarray:
        return self.evaluate(p).T


def _map_from_stats(stats: UatFStatistics, weights: np.ndarray, p: np.ndarray,
                    beamformers=None) -> MapEvaluation:
    a2 = np.abs(stats.a) ** 2
    den = p @ stats.B - p * a2 + stats.n
    T = weights * den / a2
    return MapEvaluation(T=T, sinr=p * a2 / den, stats=stats, beamformers=beamformers)


def fixed_beamformer_map(stats: UatFStatistics, weights: np.ndarray) -> InterferenceMap:
    """Interference map of a fixed beamformer set (affine, hence standard).

    T_k(p) = w_k (p_k (B_kk - |a_k|^2) + sum_{j!=k} p_j B_jk + n_k) / |a_k|^2.
    """
    if stats.degenerate().any():
        raise DegenerateBeamformerError(
            "UatF-degenerate beamformer: some E[h_k^H v_k] = 0")
    weights = np.asarray(weights, dtype=float)
    fn = lambda p: _map_from_stats(stats, weights, p)
    return InterferenceMap(weights=weights, kind="fixed_beamformer", _fn=fn)


def team_optimal_map(ensemble: ChannelEnsemble, scenario: NetworkScenario,
                     weights: np.ndarray | None = None) -> InterferenceMap:
    """Interference map whose utility is the team-MMSE-optimal SINR at p.

    Each evaluation rebuilds the team-MMSE beamformers for the given power
    vector and reads T_k(p) = w_k p_k / u_k(p) off their UatF statistics.
    """
    weights = scenario.weights if weights is None else np.asarray(weights, dtype=float)

    def fn(p):
        bf = build_team_mmse(ensemble, scenario, p)
        stats = estimate_statistics(ensemble, bf)
        if stats.degenerate().any():
            raise DegenerateBeamformerError(
                "team-MMSE beamformer degenerate; is some p_k = 0?")
        return _map_from_stats(stats, weights, p, beamformers=bf)

    return InterferenceMap(weights=weights, kind="team_optimal", _fn=fn)


def fixed_point_solve(imap: InterferenceMap, P: float, tol: float = 1e-6,
                      max_iter: int = 100, p0: np.ndarray | None = None):
    """Normalized fixed-point iteration p <- P * T(p) / ||T(p)||_inf.

    Returns (p_star, trace).  Every iterate satisfies ||p||_inf = P exactly;
    the fixed point approximates the least element of the solution set of the
    max-min power control problem for the map's utilities.
    """
    K = len(imap.weights)
    p = np.full(K, float(P)) if p0 is None else np.array(p0, dtype=float)
    trace = ConvergenceTrace()
    for i in range(1, max_iter + 1):
        ev = imap.evaluate(p)
        p_next = P * (ev.T / np.max(ev.T))
        residual = np.max(np.abs(p_next - p)) / P
        trace.append(i, "power", p_next, ev.sinr, imap.weights, residual)
        p = p_next
        if residual <= tol:
            trace.converged = True
            break
    if not trace.converged:
        warnings.warn(f"fixed_point_solve: residual {residual:.3e} > tol {tol:.3e} "
                      f"after {max_iter} iterations", RuntimeWarning)
    return p, trace


@dataclass
class AlgorithmResult:
    p: np.ndarray
    beamformers: BeamformerSet
    stats: UatFStatistics
    trace: ConvergenceTrace
    iterations: int


def _joint_algorithm(ensemble, scenario, mode, tol, max_iter, inner_tol,
                     inner_max_iter, beamformer, weights, p0, enforce_monotone):
    weights = scenario.weights if weights is None else np.asarray(weights, dtype=float)
    P = scenario.power_budget_lin
    p = np.full(scenario.K, P) if p0 is None else np.array(p0, dtype=float)
    trace = ConvergenceTrace()
    trace.append(0, "init", p, None, weights, 0.0)

    mf = build_matched_filter(ensemble, scenario) if beamformer == "matched_filter" else None
    mf_stats = estimate_statistics(ensemble, mf) if mf is not None else None

    prev_obj = None
    bf = stats = None
    iterations = 0
    for i in range(1, max_iter + 1):
        # beamforming step: rebuild at the current powers
        if mf is not None:
            bf_next, stats_next = mf, mf_stats
        else:
            bf_next = build_team_mmse(ensemble, scenario, p)
            stats_next = estimate_statistics(ensemble, bf_next)
        if stats_next.degenerate().any():
            raise DegenerateBeamformerError("beamformer degenerate during outer loop")
        s = sinr(stats_next, p)
        obj_at_p = float(np.min(s / weights))

        # power step
        if mode == "fp":
            ev = _map_from_stats(stats_next, weights, p)
            p_next = P * (ev.T / np.max(ev.T))
        else:
            inner_map = fixed_beamformer_map(stats_next, weights)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                p_next, _ = fixed_point_solve(inner_map, P, tol=inner_tol,
                                              max_iter=inner_max_iter, p0=p)
        residual = np.max(np.abs(p_next - p)) / P
        s_next = sinr(stats_next, p_next)
        obj = float(np.min(s_next / weights))

        slack = 1e-9 * (1.0 + abs(obj_at_p))
        if mode == "ao" and obj < obj_at_p - slack:
            # p was feasible for the inner problem, so its optimum cannot be
            # worse; a decrease here means the inner solve is broken
            raise InternalConsistencyError(
                f"AO round {i}: power step decreased the min weighted SINR "
                f"({obj_at_p:.12e} -> {obj:.12e})")
        if enforce_monotone and prev_obj is not None \
                and obj < prev_obj - 1e-9 * (1.0 + abs(prev_obj)):
            # the beamformer rebuild is only optimal up to Monte Carlo noise;
            # a round that ends worse than the last one is noise, not progress:
            # discard it and keep the previous iterate
            trace.converged = True
            break

        trace.append(i, "beamforming", p, s, weights, 0.0)
        trace.append(i, "power", p_next, s_next, weights, residual)
        p, bf, stats = p_next, bf_next, stats_next
        iterations = i

        obj_change = None if prev_obj is None else abs(obj - prev_obj) / max(abs(prev_obj), 1e-300)
        prev_obj = obj
        if i >= 2 and (residual <= tol or (obj_change is not None and obj_change <= tol)):
            trace.converged = True
            break

    if not trace.converged:
        warnings.warn(f"joint algorithm ({mode}): no convergence within {max_iter} "
                      f"outer iterations (residual {residual:.3e})", RuntimeWarning)
    return AlgorithmResult(p=p, beamformers=bf, stats=stats, trace=trace,
                           iterations=iterations)


def algorithm_fp(ensemble: ChannelEnsemble, scenario: NetworkScenario,
                 tol: float = 1e-6, max_iter: int = 100,
                 beamformer: str = "team_mmse", weights=None,
                 p0=None) -> AlgorithmResult:
    """Joint algorithm, fixed-point variant: one normalized map evaluation per
    round of beamformer rebuilding.  Provably converges to the max-min optimum."""
    return _joint_algorithm(ensemble, scenario, "fp", tol, max_iter, None, None,
                            beamformer, weights, p0, enforce_monotone=False)


def algorithm_ao(ensemble: ChannelEnsemble, scenario: NetworkScenario,
                 tol: float = 1e-6, max_iter: int = 100, inner_tol: float = 1e-9,
                 inner_max_iter: int = 20000, beamformer: str = "team_mmse",
                 weights=None, p0=None) -> AlgorithmResult:
    """Joint algorithm, alternating-optimization variant: each round solves the
    full max-min power problem for the current beamformers.  The min weighted
    SINR is nondecreasing across rounds (slack 1e-9): a round that would end
    worse than the previous one signals sample-noise-level progress only and
    terminates the loop with the previous iterate kept."""
    return _joint_algorithm(ensemble, scenario, "ao", tol, max_iter, inner_tol,
                            inner_max_iter, beamformer, weights, p0,
                            enforce_monotone=True)
