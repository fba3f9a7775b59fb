"""Bounds, bootstrap, and confidence intervals for a linear functional.

The identified set of ``E[psi(W, theta)]`` is an interval whose endpoints
are the values of two linear programs. Its confidence set is

    [lb - q_lb / sqrt(n), ub + q_ub / sqrt(n)]

where ``(q_lb, q_ub)`` are read off the joint bootstrap distribution of the
recentered endpoint values ``L = sqrt(n) (lb* - lb)`` and
``U = sqrt(n) (ub* - ub)``: among pairs that cover with joint frequency
``1 - alpha`` under both the "lower endpoint" and "upper endpoint" events,
the one with the smallest total length is chosen.
"""

from __future__ import annotations

import heapq
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .lp import (DEFAULT_OPTIONS, INFEASIBLE, MINIMIZE, OPTIMAL, UNBOUNDED, LinearProgram,
                 LpNumericalError, LpSolution, SolverOptions, solve_lp)
from .model import LOWER, UPPER, CompiledModel, Dataset, ModelSpec, row_map

FLAG_OK = "ok"
FLAG_RELAXED = "relaxed"
FLAG_FAILED = "failed"


class InferenceError(RuntimeError):
    pass


class SolverFailure(InferenceError):
    """An LP could not be solved (numerical breakdown, unboundedness, or a
    relaxed model that is still infeasible)."""


class CalibrationError(InferenceError):
    """No quantile pair satisfies both coverage constraints."""


@dataclass(frozen=True)
class InferenceOptions:
    """Knobs shared by estimation, bootstrap and calibration.

    Attributes
    ----------
    relax : {"auto", "off"}
        Whether an empty sample identified set is repaired by relaxing all
        moments by the smallest feasible amount.
    relax_epsilon : float
        The relaxation is ``c_star + relax_epsilon * (1 + max|rhs|)``.
    threshold_mode : {"length", "indicator"}
        How the identified-set length is thresholded, see
        :func:`threshold_delta`.
    clamp_nonnegative : bool
        Clamp calibrated quantiles at zero so the confidence set always
        contains the estimated set.
    workers : int or None
        Bootstrap processes; ``None`` means ``os.cpu_count()``.
    warm_start : bool
        Start each bootstrap solve from the original-sample basis.
    """

    relax: str = "auto"
    relax_epsilon: float = 1e-6
    threshold_mode: str = "length"
    clamp_nonnegative: bool = False
    workers: Optional[int] = 1
    warm_start: bool = True
    solver: SolverOptions = field(default_factory=lambda: DEFAULT_OPTIONS)

    def __post_init__(self):
        if self.relax not in ("auto", "off"):
            raise ValueError("relax must be 'auto' or 'off'")
        if self.threshold_mode not in ("length", "indicator"):
            raise ValueError("threshold_mode must be 'length' or 'indicator'")
        if self.relax_epsilon <= 0:
            raise ValueError("relax_epsilon must be positive")
        if self.workers is not None and self.workers < 1:
            raise ValueError("workers must be at least 1")


DEFAULT_INFERENCE = InferenceOptions()


@dataclass(frozen=True, eq=False)
class IdentifiedSetEstimate:
    lb: float
    ub: float
    sol_lb: LpSolution
    sol_ub: LpSolution
    relaxation_used: float
    c_star: float
    lp_lb: LinearProgram
    lp_ub: LinearProgram

    @property
    def delta(self) -> float:
        return self.ub - self.lb

    @property
    def relaxed(self) -> bool:
        return self.relaxation_used > 0


@dataclass(frozen=True, eq=False)
class BootstrapDraws:
    L: np.ndarray
    U: np.ndarray
    flags: tuple
    seed: int
    n: int

    @property
    def B(self) -> int:
        return self.L.size

    @property
    def usable(self) -> np.ndarray:
        return np.array([f != FLAG_FAILED for f in self.flags], dtype=bool)

    @property
    def failure_rate(self) -> float:
        return float(np.mean(~self.usable)) if self.B else 0.0

    def summary(self, probs=(0.05, 0.25, 0.5, 0.75, 0.95)) -> dict:
        ok = self.usable
        out = {"B": self.B, "n": self.n, "seed": self.seed,
               "failures": int(np.count_nonzero(~ok)),
               "relaxed": sum(f == FLAG_RELAXED for f in self.flags),
               "failure_rate": self.failure_rate}
        for name, arr in (("L", self.L[ok]), ("U", self.U[ok])):
            qs = np.quantile(arr, probs) if arr.size else [float("nan")] * len(probs)
            out[f"quantiles_{name}"] = {f"{p:g}": float(q) for p, q in zip(probs, qs)}
        return out


class Threshold(NamedTuple):
    delta_star: float
    b_n: float


class QuantilePair(NamedTuple):
    q_lb: float
    q_ub: float


@dataclass(frozen=True, eq=False)
class ConfidenceSet:
    lower: float
    upper: float
    alpha: float
    q_lb: float
    q_ub: float
    delta_hat: float
    delta_star: float
    b_n: float
    relaxation_used: float
    estimate: Optional[IdentifiedSetEstimate] = None
    draws: Optional[BootstrapDraws] = None

    def to_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "alpha": self.alpha,
                "q_lb": self.q_lb, "q_ub": self.q_ub, "delta_hat": self.delta_hat,
                "delta_star": self.delta_star, "b_n": self.b_n,
                "relaxation_used": self.relaxation_used}


@dataclass(frozen=True, eq=False)
class DeltaMethodOracle:
    sd_lb: float
    sd_ub: float
    influence_lb: np.ndarray
    influence_ub: np.ndarray


# -- estimation -------------------------------------------------------------

def _epsilon(S: np.ndarray, options: InferenceOptions) -> float:
    h = S[1:, -1]
    return options.relax_epsilon * (1.0 + (np.max(np.abs(h)) if h.size else 0.0))


def _relaxation_lp(cm: CompiledModel, S: np.ndarray) -> LinearProgram:
    """``min t`` subject to every (split) sample moment being at most ``t``."""
    spec = cm.spec
    d = spec.d_theta
    G, h = S[1:, :d], S[1:, d]
    idx, sign = row_map(spec, 1.0)
    A = np.hstack([G[idx] * sign[:, None], -np.ones((idx.size, 1))])
    rhs = -sign * h[idx]
    # |m_j(theta)| over the box is at most |h_j| + sum_k |G_jk| max(|lo_k|, |hi_k|)
    box = np.maximum(np.abs(spec.theta_lower), np.abs(spec.theta_upper))
    T = float(np.max(np.abs(h) + np.abs(G) @ box, initial=0.0)) + 1.0
    c = np.zeros(d + 1)
    c[-1] = 1.0
    return LinearProgram(c, A, rhs, ("leq",) * idx.size,
                         np.append(spec.theta_lower, -T), np.append(spec.theta_upper, T),
                         MINIMIZE)


def _c_star(cm: CompiledModel, S: np.ndarray, solver: SolverOptions) -> float:
    if cm.spec.k == 0:
        return 0.0
    sol = solve_lp(_relaxation_lp(cm, S), solver)
    if sol.status != OPTIMAL:
        raise SolverFailure(f"relaxation program is {sol.status}")
    return max(0.0, float(sol.value))


def compute_relaxation(spec: ModelSpec, data: Dataset, weights=None,
                       solver: SolverOptions = DEFAULT_OPTIONS) -> float:
    """Smallest uniform slack ``c_star`` that makes the sample moments feasible.

    ``c_star = max(0, min_theta max_j m_j(theta))`` where equality moments
    count in both directions. The model relaxed by any amount above
    ``c_star`` has a nonempty feasible set.
    """
    cm = CompiledModel(spec, data)
    return _c_star(cm, cm.means(weights), solver)


def _solve_pair(cm: CompiledModel, S: np.ndarray, relaxation: float, solver: SolverOptions,
                warm: tuple = (None, None)):
    lps, sols = [], []
    for direction, ws in zip((LOWER, UPPER), warm):
        lp = cm.lp(direction=direction, relaxation=relaxation, slot_means=S)
        lps.append(lp)
        sols.append(solve_lp(lp, solver, ws))
    return lps, sols


def _estimate(cm: CompiledModel, S: np.ndarray, options: InferenceOptions,
              floor: float = 0.0, warm: tuple = (None, None)):
    """Solve both bound programs; relax when the sample set is empty.

    Returns ``(lps, sols, relaxation, c_star)``.
    """
    relaxation = floor
    c_star = 0.0
    lps, sols = _solve_pair(cm, S, relaxation, options.solver, warm)
    if any(s.status == INFEASIBLE for s in sols) and options.relax == "auto":
        c_star = _c_star(cm, S, options.solver)
        relaxation = float(max(floor, c_star + _epsilon(S, options)))
        lps, sols = _solve_pair(cm, S, relaxation, options.solver, warm)
    return lps, sols, relaxation, c_star


def estimate_identified_set(spec: ModelSpec, data: Dataset, weights=None,
                            options: InferenceOptions = DEFAULT_INFERENCE,
                            ) -> IdentifiedSetEstimate:
    """Lower and upper bounds of the functional over the sample identified set.

    Raises
    ------
    SolverFailure
        If a bound program is infeasible (with relaxation off, or after
        relaxing, which indicates a solver problem), unbounded, or breaks
        down numerically.
    """
    cm = CompiledModel(spec, data)
    return _estimate_compiled(cm, cm.means(weights), options)


def _estimate_compiled(cm, S, options) -> IdentifiedSetEstimate:
    try:
        lps, sols, relaxation, c_star = _estimate(cm, S, options)
    except LpNumericalError as exc:
        raise SolverFailure(str(exc)) from exc
    for direction, sol in zip((LOWER, UPPER), sols):
        if sol.status == INFEASIBLE:
            hint = "" if options.relax == "auto" else " (relaxation is off)"
            raise SolverFailure(f"{direction} bound program is infeasible{hint}")
        if sol.status == UNBOUNDED:
            raise SolverFailure(f"{direction} bound program is unbounded")
    return IdentifiedSetEstimate(sols[0].value, sols[1].value, sols[0], sols[1],
                                 relaxation, c_star, lps[0], lps[1])


# -- bootstrap --------------------------------------------------------------

def draw_rng(seed: int, b: int) -> np.random.Generator:
    """Independent counter-based stream for bootstrap draw ``b``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, b])))


def multinomial_weights(n: int, seed: int, b: int) -> np.ndarray:
    return draw_rng(seed, b).multinomial(n, np.full(n, 1.0 / n)).astype(float)


def _draw_chunk(cm: CompiledModel, est_values, floor: float, warm: tuple, seed: int,
                indices, options: InferenceOptions):
    lb0, ub0 = est_values
    root_n = math.sqrt(cm.n)
    L = np.full(len(indices), np.nan)
    U = np.full(len(indices), np.nan)
    flags = []
    for i, b in enumerate(indices):
        S = cm.means(multinomial_weights(cm.n, seed, b))
        try:
            _, sols, relaxation, _ = _estimate(cm, S, options, floor, warm)
        except LpNumericalError:
            flags.append(FLAG_FAILED)
            continue
        if not all(s.status == OPTIMAL for s in sols):
            flags.append(FLAG_FAILED)
            continue
        L[i] = root_n * (sols[0].value - lb0)
        U[i] = root_n * (sols[1].value - ub0)
        flags.append(FLAG_RELAXED if relaxation > floor else FLAG_OK)
    return L, U, flags


def _chunks(B: int, parts: int):
    bounds = np.linspace(0, B, parts + 1).astype(int)
    return [range(bounds[i], bounds[i + 1]) for i in range(parts) if bounds[i + 1] > bounds[i]]


def resolve_workers(workers: Optional[int]) -> int:
    return max(1, workers if workers is not None else (os.cpu_count() or 1))


def bootstrap_value_functions(spec: ModelSpec, data: Dataset, B: int, seed: int,
                              options: InferenceOptions = DEFAULT_INFERENCE,
                              estimate: Optional[IdentifiedSetEstimate] = None,
                              ) -> BootstrapDraws:
    """Nonparametric bootstrap of the recentered, sqrt(n)-scaled bound values.

    Draw ``b`` reweights the sample by multinomial counts from its own RNG
    stream keyed by ``(seed, b)``, so the output does not depend on the
    number of workers or the order in which draws run. Draws are relaxed by
    at least the relaxation used on the original sample; a draw whose
    programs are still infeasible is relaxed further and flagged
    ``"relaxed"``. Solver breakdowns are flagged ``"failed"`` and carry NaN.
    """
    if B < 1:
        raise ValueError("B must be at least 1")
    cm = CompiledModel(spec, data)
    if estimate is None:
        estimate = _estimate_compiled(cm, cm.means(), options)
    warm = ((estimate.sol_lb.basis, estimate.sol_ub.basis) if options.warm_start
            else (None, None))
    args = (cm, (estimate.lb, estimate.ub), estimate.relaxation_used, warm, seed)
    workers = min(resolve_workers(options.workers), B)
    if workers == 1:
        parts = [_draw_chunk(*args, range(B), options)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_draw_chunk, *args, idx, options)
                       for idx in _chunks(B, workers * 4)]
            parts = [f.result() for f in futures]
    L = np.concatenate([p[0] for p in parts])
    U = np.concatenate([p[1] for p in parts])
    flags = tuple(f for p in parts for f in p[2])
    return BootstrapDraws(L, U, flags, seed, cm.n)


# -- calibration ------------------------------------------------------------

def threshold_delta(delta_hat: float, n: int, mode: str = "length") -> Threshold:
    """Zero out an estimated set length below ``b_n = (ln n)^(-1/2)``.

    ``mode="length"`` keeps ``delta_hat`` when it exceeds ``b_n``;
    ``mode="indicator"`` returns 1 instead.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if mode not in ("length", "indicator"):
        raise ValueError("mode must be 'length' or 'indicator'")
    b_n = 1.0 / math.sqrt(math.log(n))
    keep = delta_hat > b_n
    if mode == "indicator":
        return Threshold(1.0 if keep else 0.0, b_n)
    return Threshold(float(delta_hat) if keep else 0.0, b_n)


def required_count(alpha: float, B: int) -> int:
    """``ceil((1 - alpha) B)``, guarded against round-off just above an integer."""
    return int(math.ceil((1.0 - alpha) * B - 1e-9))


class _TopM:
    """Running m-th largest of a growing multiset."""

    def __init__(self, m: int):
        self.m = m
        self.heap = []

    def push(self, v: float) -> None:
        if len(self.heap) < self.m:
            heapq.heappush(self.heap, v)
        elif v > self.heap[0]:
            heapq.heapreplace(self.heap, v)

    def value(self) -> Optional[float]:
        return self.heap[0] if len(self.heap) == self.m else None


def calibrate_arrays(L, U, D: float, alpha: float) -> QuantilePair:
    """Shortest quantile pair for paired draws ``(L, U)`` and slack ``D``.

    With ``m = ceil((1 - alpha) B)``, the pair must satisfy

    * at least ``m`` draws with ``L <= q_lb`` and ``U + D >= -q_ub``;
    * at least ``m`` draws with ``L <= q_lb + D`` and ``U >= -q_ub``.

    ``q_lb`` ranges over ``{L} u {L - D}``; for each the smallest admissible
    ``q_ub`` is found from running top-``m`` heaps, and the pair with the
    smallest ``q_lb + q_ub`` wins (ties go to the smaller ``q_lb``).
    """
    L = np.asarray(L, dtype=float)
    U = np.asarray(U, dtype=float)
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if L.shape != U.shape or L.ndim != 1:
        raise ValueError("L and U must be paired 1-d arrays")
    if D < 0:
        raise ValueError("D must be nonnegative")
    B = L.size
    if B == 0:
        raise CalibrationError("no usable bootstrap draws")
    m = required_count(alpha, B)
    if m < 1:
        m = 1
    order = np.argsort(L, kind="stable")
    Ls = L[order]
    Us = U[order]
    UD = Us + D
    top1, top2 = _TopM(m), _TopM(m)
    i1 = i2 = 0
    best = None
    for q in np.unique(np.concatenate([L, L - D])):
        while i1 < B and Ls[i1] <= q:
            top1.push(UD[i1])
            i1 += 1
        qd = q + D
        while i2 < B and Ls[i2] <= qd:
            top2.push(Us[i2])
            i2 += 1
        k1, k2 = top1.value(), top2.value()
        if k1 is None or k2 is None:
            continue
        q_ub = max(-k1, -k2)
        total = q + q_ub
        if best is None or total < best[0]:
            best = (total, float(q), float(q_ub))
    if best is None:
        raise CalibrationError(f"no quantile pair reaches {m} of {B} draws")
    return QuantilePair(best[1], best[2])


def calibrate_quantiles(draws: BootstrapDraws, delta_star: float, alpha: float) -> QuantilePair:
    """Calibrate on the non-failed draws with ``D = sqrt(n) * delta_star``."""
    ok = draws.usable
    D = math.sqrt(draws.n) * delta_star
    return calibrate_arrays(draws.L[ok], draws.U[ok], D, alpha)


def assemble_confidence_set(estimate: IdentifiedSetEstimate, draws: BootstrapDraws,
                            alpha: float, options: InferenceOptions = DEFAULT_INFERENCE,
                            ) -> ConfidenceSet:
    th = threshold_delta(estimate.delta, draws.n, options.threshold_mode)
    q_lb, q_ub = calibrate_quantiles(draws, th.delta_star, alpha)
    if options.clamp_nonnegative:
        q_lb, q_ub = max(q_lb, 0.0), max(q_ub, 0.0)
    root_n = math.sqrt(draws.n)
    return ConfidenceSet(estimate.lb - q_lb / root_n, estimate.ub + q_ub / root_n, alpha,
                         q_lb, q_ub, estimate.delta, th.delta_star, th.b_n,
                         estimate.relaxation_used, estimate, draws)


def construct_confidence_set(spec: ModelSpec, data: Dataset, alpha: float, B: int,
                             seed: int, options: InferenceOptions = DEFAULT_INFERENCE,
                             ) -> ConfidenceSet:
    """Estimate, bootstrap, threshold, calibrate and assemble the interval."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    cm = CompiledModel(spec, data)
    est = _estimate_compiled(cm, cm.means(), options)
    draws = bootstrap_value_functions(spec, data, B, seed, options, est)
    return assemble_confidence_set(est, draws, alpha, options)


# -- delta method -----------------------------------------------------------

def _influence(cm: CompiledModel, sol: LpSolution, relaxation: float, weights) -> np.ndarray:
    vals = cm.observation_values(sol.primal)
    idx, sign = row_map(cm.spec, relaxation)
    # a shift dm in moment j moves the row's rhs by -sign * dm
    infl = vals[:, 0] - vals[:, 1 + idx] @ (sol.duals * sign)
    w = np.ones(cm.n) if weights is None else np.asarray(weights, dtype=float)
    return infl - np.average(infl, weights=w)


def delta_method_oracle(spec: ModelSpec, data: Dataset, est: IdentifiedSetEstimate,
                        weights=None) -> DeltaMethodOracle:
    """First-order (influence function) approximation of the bound laws.

    The influence of observation ``i`` on a bound is
    ``psi(W_i, theta*) + sum_j lambda_j m_j(W_i, theta*)`` evaluated at that
    bound's optimizer and Lagrange multipliers, centered. The standard
    deviations are the (weighted, population-form) standard deviations of
    these vectors; ``N(0, sd^2)`` approximates the law of ``L`` and ``U``.
    """
    cm = CompiledModel(spec, data)
    w = np.ones(cm.n) if weights is None else np.asarray(weights, dtype=float)
    il = _influence(cm, est.sol_lb, est.relaxation_used, w)
    iu = _influence(cm, est.sol_ub, est.relaxation_used, w)

    def sd(v):
        return float(math.sqrt(max(np.average(v * v, weights=w), 0.0)))

    return DeltaMethodOracle(sd(il), sd(iu), il, iu)


__all__ = [
    "FLAG_OK", "FLAG_RELAXED", "FLAG_FAILED", "InferenceError", "SolverFailure",
    "CalibrationError", "InferenceOptions", "DEFAULT_INFERENCE", "IdentifiedSetEstimate",
    "BootstrapDraws", "ConfidenceSet", "DeltaMethodOracle", "Threshold", "QuantilePair",
    "compute_relaxation", "estimate_identified_set", "bootstrap_value_functions",
    "draw_rng", "multinomial_weights", "threshold_delta", "required_count",
    "calibrate_arrays", "calibrate_quantiles", "assemble_confidence_set",
    "construct_confidence_set", "delta_method_oracle", "resolve_workers",
]
