"""Sample checks of the regularity conditions behind the bootstrap.

The bootstrap is valid when, at each bound, the optimizer and the Lagrange
multipliers are unique and the gradients of the active moments are linearly
independent. These can be checked on the sample problem; their uniform
(over a neighbourhood of distributions) versions cannot, and the report
says so.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .inference import (DEFAULT_INFERENCE, IdentifiedSetEstimate, InferenceOptions,
                        draw_rng, estimate_identified_set, threshold_delta)
from .lp import (OPTIMAL, LinearProgram, LpNumericalError, LpSolution,
                 assess_solution_uniqueness, solve_lp)
from .model import LOWER, UPPER, CompiledModel, Dataset, ModelSpec, row_map

SCHEMA_VERSION = 1
EIG_WARN = 1e-6
# eigenvalues this far below the largest are treated as exact zeros
EIG_ZERO_REL = 1e-12

CAVEAT = ("These checks use a single sample. Uniform versions of the "
          "constraint qualification, uniqueness of optimizers and multipliers "
          "over nearby distributions, and the Donsker conditions on the moment "
          "class cannot be verified from data and are assumed.")


class LicqResult(NamedTuple):
    min_eig: float
    min_eig_normalized: float
    active_labels: list

    @property
    def vacuous(self) -> bool:
        """No active rows: the qualification holds trivially."""
        return not self.active_labels

    def passes(self, eig_warn: float = EIG_WARN) -> bool:
        return self.vacuous or self.min_eig_normalized > eig_warn

    @property
    def hard_violation(self) -> bool:
        return not self.vacuous and self.min_eig == 0.0


def gram_min_eig(G: np.ndarray) -> float:
    """Smallest eigenvalue of ``G @ G.T``, with round-off zeros snapped to 0."""
    G = np.asarray(G, dtype=float)
    if G.shape[0] == 0:
        return 0.0
    eig = np.linalg.eigvalsh(G @ G.T)
    top = max(float(eig[-1]), 0.0)
    low = float(eig[0])
    if low <= EIG_ZERO_REL * max(top, 1.0):
        return 0.0
    return low


def licq_from_rows(G: np.ndarray, labels) -> LicqResult:
    G = np.atleast_2d(np.asarray(G, dtype=float))
    if len(labels) == 0:
        return LicqResult(0.0, 0.0, [])
    norms = np.linalg.norm(G, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    return LicqResult(gram_min_eig(G), gram_min_eig(G / safe[:, None]), list(labels))


def licq_for_solution(lp: LinearProgram, sol: LpSolution) -> LicqResult:
    """Gram-matrix test on the rows of ``lp`` that are equalities or binding."""
    rows = np.asarray(sol.active_set, dtype=int)
    labels = lp.row_labels or tuple(f"row{i}" for i in range(lp.n_constraints))
    return licq_from_rows(lp.A[rows], [labels[i] for i in rows])


def check_licq(spec: ModelSpec, data: Dataset, weights, sol: LpSolution,
               relaxation: float = 0.0, direction: str = LOWER) -> LicqResult:
    """Minimum eigenvalue of ``G G'`` for the active moment gradients at ``sol``.

    ``G`` stacks the sample gradient rows of every equality moment and every
    inequality moment that binds at ``sol.primal``. Both the raw eigenvalue
    and the one for rows scaled to unit length are returned; the latter is
    invariant to rescaling individual moments. An empty ``G`` gives 0 and is
    flagged as vacuous.
    """
    if sol.status != OPTIMAL:
        raise ValueError("check_licq needs an optimal solution")
    lp = CompiledModel(spec, data).lp(weights, direction, relaxation)
    return licq_for_solution(lp, sol)


class ProbeResult(NamedTuple):
    pass_fraction: float
    trials: int
    infeasible: int
    warnings: list


def _perturb(lp: LinearProgram, eq_pairs: np.ndarray, rng, scale: float) -> LinearProgram:
    k = lp.n_constraints
    eps = rng.uniform(-scale, scale, size=k)
    # both halves of a split equality move outward so the pair stays consistent
    eps[eq_pairs] = scale * (1.0 - rng.random(size=int(eq_pairs.sum())))
    return LinearProgram(lp.objective, lp.A, lp.rhs + eps, lp.relations, lp.var_lower,
                         lp.var_upper, lp.sense, lp.objective_constant, lp.row_labels)


def _split_lps(cm: CompiledModel, weights, relaxation: float):
    """Bound programs with every equality written as two inequalities, plus a
    mask of the rows that came from equalities."""
    S = cm.means(weights)
    lps = [cm.lp(direction=direction, relaxation=relaxation, slot_means=S, split_eq=True)
           for direction in (LOWER, UPPER)]
    idx, _ = row_map(cm.spec, relaxation, split_eq=True)
    return lps, cm.spec.is_eq[idx] if idx.size else np.zeros(0, dtype=bool)


def perturbation_licq_probe(spec: ModelSpec, data: Dataset, weights=None,
                            epsilon_scale: float = 1e-4, trials: int = 100, seed: int = 0,
                            relaxation: float = 0.0, eig_warn: float = EIG_WARN,
                            ) -> ProbeResult:
    """Share of small right-hand-side perturbations under which LICQ holds.

    Each trial draws ``eps`` uniform on ``[-epsilon_scale, epsilon_scale]``
    per inequality row (equalities are first split into two inequalities,
    each loosened by an independent draw from ``(0, epsilon_scale]``),
    re-solves both bound programs, and passes when both satisfy LICQ on
    normalized rows. Trial ``t`` uses the stream keyed by ``(seed, t)``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if epsilon_scale <= 0:
        raise ValueError("epsilon_scale must be positive")
    cm = CompiledModel(spec, data)
    lps, eq_pairs = _split_lps(cm, weights, relaxation)
    passed = infeasible = 0
    for t in range(trials):
        rng = draw_rng(seed, t)
        ok = True
        for base in lps:
            lp = _perturb(base, eq_pairs, rng, epsilon_scale)
            try:
                sol = solve_lp(lp)
            except LpNumericalError:
                sol = None
            if sol is None or sol.status != OPTIMAL:
                infeasible += 1
                ok = False
                break
            if not licq_for_solution(lp, sol).passes(eig_warn):
                ok = False
        passed += ok
    warnings = []
    if infeasible:
        warnings.append(f"{infeasible} of {trials} perturbed problems could not be solved "
                        "and count as failures")
    return ProbeResult(passed / trials, trials, infeasible, warnings)


@dataclass
class DiagnosticsReport:
    licq_min_eig_lb: float
    licq_min_eig_ub: float
    licq_min_eig_normalized_lb: float
    licq_min_eig_normalized_ub: float
    active_labels_lb: list
    active_labels_ub: list
    primal_unique_lb: bool
    primal_unique_ub: bool
    dual_unique_lb: bool
    dual_unique_ub: bool
    multipliers_lb: dict
    multipliers_ub: dict
    lb: float
    ub: float
    delta_hat: float
    b_n: float
    relaxation_used: float
    c_star: float
    probe_pass_fraction: Optional[float] = None
    warnings: list = field(default_factory=list)
    caveat: str = CAVEAT

    @property
    def hard_licq_violation(self) -> bool:
        """An active gradient set that is exactly rank deficient on either side."""
        return any(eig == 0.0 and labels for eig, labels in (
            (self.licq_min_eig_lb, self.active_labels_lb),
            (self.licq_min_eig_ub, self.active_labels_ub)))

    def to_dict(self) -> dict:
        out = {"schema_version": SCHEMA_VERSION}
        for name in self.__dataclass_fields__:
            out[name] = getattr(self, name)
        out["hard_licq_violation"] = self.hard_licq_violation
        return out


def full_report(spec: ModelSpec, data: Dataset, seed: int = 0,
                options: InferenceOptions = DEFAULT_INFERENCE,
                probe_trials: int = 50, epsilon_scale: float = 1e-4,
                eig_warn: float = EIG_WARN,
                estimate: Optional[IdentifiedSetEstimate] = None) -> DiagnosticsReport:
    """Estimate the bounds and collect every sample regularity check.

    Set ``probe_trials=0`` to skip the perturbation probe.
    """
    est = estimate or estimate_identified_set(spec, data, options=options)
    th = threshold_delta(est.delta, max(data.n, 2), options.threshold_mode)
    sides = {}
    for side, lp, sol in (("lb", est.lp_lb, est.sol_lb), ("ub", est.lp_ub, est.sol_ub)):
        licq = licq_for_solution(lp, sol)
        uniq = assess_solution_uniqueness(lp, sol)
        labels = lp.row_labels or ()
        mult = {lab: float(v) for lab, v in zip(labels, sol.duals)}
        sides[side] = (licq, uniq, mult)
    warnings = []
    for side, (licq, uniq, _) in sides.items():
        name = "lower" if side == "lb" else "upper"
        if not licq.passes(eig_warn):
            warnings.append(f"{name} bound: active moment gradients are nearly dependent "
                            f"(normalized min eigenvalue {licq.min_eig_normalized:.3g})")
        if not uniq["primal_unique"]:
            warnings.append(f"{name} bound: the optimizer is not unique")
        if not uniq["dual_unique"]:
            warnings.append(f"{name} bound: the Lagrange multipliers are not unique")
    if est.delta <= th.b_n:
        warnings.append(f"estimated set length {est.delta:.4g} is at most b_n = {th.b_n:.4g}; "
                        "the functional is close to point identified")
    if est.relaxed:
        warnings.append(f"the sample identified set is empty; moments were relaxed by "
                        f"{est.relaxation_used:.4g}")
    probe = None
    if probe_trials > 0:
        res = perturbation_licq_probe(spec, data, None, epsilon_scale, probe_trials, seed,
                                      est.relaxation_used, eig_warn)
        probe = res.pass_fraction
        warnings.extend(res.warnings)
        if probe < 1.0:
            warnings.append(f"LICQ failed in {1 - probe:.1%} of perturbed problems")
    (l_licq, l_uniq, l_mult), (u_licq, u_uniq, u_mult) = sides["lb"], sides["ub"]
    return DiagnosticsReport(
        l_licq.min_eig, u_licq.min_eig, l_licq.min_eig_normalized, u_licq.min_eig_normalized,
        l_licq.active_labels, u_licq.active_labels,
        bool(l_uniq["primal_unique"]), bool(u_uniq["primal_unique"]),
        bool(l_uniq["dual_unique"]), bool(u_uniq["dual_unique"]),
        l_mult, u_mult, float(est.lb), float(est.ub), float(est.delta), float(th.b_n),
        float(est.relaxation_used), float(est.c_star), probe, warnings)
