"""Dense bounded-variable revised simplex.

The solver works on problems of the form::

    minimize / maximize   c @ x + c0
    subject to            A[i] @ x <= b[i]   (relation "leq")
                          A[i] @ x == b[i]   (relation "eq")
                          lower <= x <= upper   (finite bounds)

Every row gets a slack column (fixed at zero for equality rows) and, during
phase 1, an artificial column. Nonbasic variables sit at one of their bounds.
Pricing is Dantzig's rule; after a run of degenerate pivots the solver falls
back to Bland's rule until progress resumes, so it cannot cycle and identical
inputs always produce identical pivot sequences.

Duals are reported as sensitivities of the optimal value to the right-hand
side, ``duals[i] = d value / d rhs[i]``. For a minimization this makes the
dual of a ``leq`` row nonpositive; for a maximization it is nonnegative.
Equality duals are free.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

MINIMIZE = "minimize"
MAXIMIZE = "maximize"
OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_RELATIONS = ("eq", "leq")


class LpError(Exception):
    """Base class for solver failures."""


class LpNumericalError(LpError):
    """The simplex could not certify a result within its iteration cap."""


class Constraint(NamedTuple):
    coeffs: np.ndarray
    rhs: float
    relation: str


@dataclass(frozen=True)
class SolverOptions:
    """Tolerances for :func:`solve_lp`.

    ``tol_feas`` and ``tol_active`` are multiplied by ``1 + ||rhs||_inf``.
    """

    tol_feas: float = 1e-9
    tol_active: float = 1e-7
    tol_cs: float = 1e-7
    tol_gap: float = 1e-8
    tol_dual: float = 1e-9
    tol_pivot: float = 1e-9
    max_iter: Optional[int] = None
    refactor_every: int = 50
    bland_after: int = 20


DEFAULT_OPTIONS = SolverOptions()


@dataclass(frozen=True, eq=False)
class LinearProgram:
    objective: np.ndarray
    A: np.ndarray
    rhs: np.ndarray
    relations: tuple
    var_lower: np.ndarray
    var_upper: np.ndarray
    sense: str = MINIMIZE
    objective_constant: float = 0.0
    row_labels: Optional[tuple] = None

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float).reshape(-1)
        n = c.size
        A = np.asarray(self.A, dtype=float)
        if A.size == 0:
            A = A.reshape(0, n)
        if A.ndim != 2 or A.shape[1] != n:
            raise ValueError(f"constraint matrix has shape {A.shape}, expected (k, {n})")
        rhs = np.asarray(self.rhs, dtype=float).reshape(-1)
        if rhs.size != A.shape[0]:
            raise ValueError("rhs length does not match the number of constraints")
        relations = tuple(self.relations)
        if len(relations) != A.shape[0]:
            raise ValueError("one relation is required per constraint")
        bad = [r for r in relations if r not in _RELATIONS]
        if bad:
            raise ValueError(f"unknown constraint relation {bad[0]!r}")
        lo = np.asarray(self.var_lower, dtype=float).reshape(-1)
        hi = np.asarray(self.var_upper, dtype=float).reshape(-1)
        if lo.size != n or hi.size != n:
            raise ValueError("variable bounds must have length n_vars")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValueError("variable bounds must be finite")
        if np.any(lo > hi):
            raise ValueError("var_lower exceeds var_upper")
        if self.sense not in (MINIMIZE, MAXIMIZE):
            raise ValueError(f"unknown sense {self.sense!r}")
        if self.row_labels is not None and len(self.row_labels) != A.shape[0]:
            raise ValueError("row_labels must have one entry per constraint")
        for name, arr in (("objective", c), ("A", A), ("rhs", rhs)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite values")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "relations", relations)
        object.__setattr__(self, "var_lower", lo)
        object.__setattr__(self, "var_upper", hi)
        object.__setattr__(self, "objective_constant", float(self.objective_constant))

    @classmethod
    def from_constraints(cls, objective, constraints: Sequence, var_lower, var_upper,
                         sense=MINIMIZE, objective_constant=0.0):
        """Build from ``(coeffs, relation, rhs)`` triples."""
        n = len(objective)
        A = np.array([np.asarray(c[0], dtype=float) for c in constraints]).reshape(-1, n)
        relations = tuple(c[1] for c in constraints)
        rhs = [float(c[2]) for c in constraints]
        return cls(objective, A, rhs, relations, var_lower, var_upper, sense,
                   objective_constant)

    @property
    def n_vars(self) -> int:
        return self.objective.size

    @property
    def n_constraints(self) -> int:
        return self.A.shape[0]

    @property
    def is_eq(self) -> np.ndarray:
        return np.array([r == "eq" for r in self.relations], dtype=bool)

    @property
    def constraints(self) -> list:
        return [Constraint(self.A[i].copy(), float(self.rhs[i]), self.relations[i])
                for i in range(self.n_constraints)]


@dataclass(frozen=True, eq=False)
class Basis:
    """Simplex basis, reusable as a warm start for an LP of the same shape.

    Column ids: ``j < n`` structural, ``n + i`` slack of row ``i``,
    ``n + m + i`` artificial of row ``i``.
    """

    n: int
    m: int
    basic: np.ndarray
    at_upper: np.ndarray
    sigma: np.ndarray


@dataclass(frozen=True, eq=False)
class LpSolution:
    status: str
    value: float
    primal: np.ndarray
    duals: np.ndarray
    active_set: tuple
    reduced_costs: np.ndarray
    slacks: np.ndarray
    iterations: int = 0
    basis: Optional[Basis] = None

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def _pow2_row_scale(A: np.ndarray) -> np.ndarray:
    # power-of-two scaling is exact in floating point
    if A.shape[0] == 0:
        return np.ones(0)
    amax = np.max(np.abs(A), axis=1) if A.shape[1] else np.zeros(A.shape[0])
    scale = np.ones(A.shape[0])
    nz = amax > 0
    scale[nz] = np.exp2(-np.round(np.log2(amax[nz])))
    return scale


class _Simplex:
    def __init__(self, lp: LinearProgram, opts: SolverOptions):
        self.lp = lp
        self.opts = opts
        n, m = lp.n_vars, lp.n_constraints
        self.n, self.m = n, m
        self.N = n + 2 * m
        self.rho = _pow2_row_scale(lp.A)
        self.A = lp.A * self.rho[:, None]
        self.b = lp.rhs * self.rho
        self.sign = 1.0 if lp.sense == MINIMIZE else -1.0
        self.cost2 = np.zeros(self.N)
        self.cost2[:n] = self.sign * lp.objective
        eq = lp.is_eq
        self.lower = np.concatenate([lp.var_lower, np.zeros(2 * m)])
        self.upper = np.concatenate([lp.var_upper, np.where(eq, 0.0, np.inf), np.zeros(m)])
        self.sigma = np.ones(m)
        self.bnorm = 1.0 + (np.max(np.abs(self.b)) if m else 0.0)
        self.tol_feas = opts.tol_feas * self.bnorm
        cscale = 1.0 + (np.max(np.abs(lp.objective)) if n else 0.0)
        self.tol_d = opts.tol_dual * cscale
        self.max_iter = opts.max_iter or 50 * (n + m)
        self.iterations = 0
        self.x = np.zeros(self.N)
        self.at_up = np.zeros(self.N, dtype=bool)
        self.basis = np.zeros(m, dtype=int)
        self.is_basic = np.zeros(self.N, dtype=bool)
        self.Binv = np.eye(m)

    # -- linear algebra helpers -------------------------------------------
    def _column(self, j: int) -> np.ndarray:
        n, m = self.n, self.m
        if j < n:
            return self.A[:, j]
        col = np.zeros(m)
        if j < n + m:
            col[j - n] = 1.0
        else:
            col[j - n - m] = self.sigma[j - n - m]
        return col

    def _times(self, v: np.ndarray) -> np.ndarray:
        n, m = self.n, self.m
        return self.A @ v[:n] + v[n:n + m] + self.sigma * v[n + m:]

    def _refactor(self) -> None:
        m = self.m
        if m == 0:
            return
        B = np.empty((m, m))
        for k, j in enumerate(self.basis):
            B[:, k] = self._column(j)
        try:
            self.Binv = np.linalg.inv(B)
        except np.linalg.LinAlgError as exc:
            raise LpNumericalError("singular basis") from exc
        if not np.all(np.isfinite(self.Binv)):
            raise LpNumericalError("singular basis")
        xn = np.where(self.is_basic, 0.0, self.x)
        self.x[self.basis] = self.Binv @ (self.b - self._times(xn))

    def _reduced_costs(self, cost: np.ndarray):
        n, m = self.n, self.m
        y = cost[self.basis] @ self.Binv if m else np.zeros(0)
        d = cost.copy()
        d[:n] -= self.A.T @ y
        d[n:n + m] -= y
        d[n + m:] -= self.sigma * y
        return y, d

    def _pivot(self, r: int, alpha: np.ndarray) -> None:
        piv = alpha[r]
        row = self.Binv[r] / piv
        self.Binv -= np.outer(alpha, row)
        self.Binv[r] = row

    def _tick(self) -> None:
        self.iterations += 1
        if self.iterations > self.max_iter:
            raise LpNumericalError(
                f"iteration cap {self.max_iter} reached without certifying a result")

    # -- starting points ---------------------------------------------------
    def cold_start(self) -> None:
        n, m = self.n, self.m
        lo, hi = self.lower[:n], self.upper[:n]
        use_upper = np.abs(hi) < np.abs(lo)
        self.x[:] = 0.0
        self.x[:n] = np.where(use_upper, hi, lo)
        self.at_up[:] = False
        self.at_up[:n] = use_upper
        r = self.b - self.A @ self.x[:n]
        eq = self.lp.is_eq
        use_slack = (~eq) & (r >= 0)
        self.sigma = np.where(r >= 0, 1.0, -1.0)
        self.upper[n + m:] = np.where(use_slack, 0.0, np.inf)
        self.basis = np.where(use_slack, n + np.arange(m), n + m + np.arange(m))
        self.is_basic[:] = False
        self.is_basic[self.basis] = True
        self.x[self.basis] = np.abs(r)
        self.Binv = np.diag(np.where(use_slack, 1.0, self.sigma)) if m else np.eye(0)

    def warm_start(self, ws: Basis) -> bool:
        n, m = self.n, self.m
        if ws.n != n or ws.m != m:
            return False
        self.sigma = ws.sigma.copy()
        self.upper[n + m:] = 0.0
        self.basis = ws.basic.copy()
        self.is_basic[:] = False
        self.is_basic[self.basis] = True
        self.at_up = ws.at_upper.copy()
        self.at_up[self.is_basic] = False
        self.at_up &= np.isfinite(self.upper)
        self.x = np.where(self.at_up, self.upper, self.lower)
        try:
            self._refactor()
        except LpNumericalError:
            return False
        return True

    # -- primal simplex ----------------------------------------------------
    def primal(self, cost: np.ndarray) -> str:
        opts = self.opts
        m = self.m
        degenerate = 0
        since_refactor = 0
        while True:
            if since_refactor >= opts.refactor_every:
                self._refactor()
                since_refactor = 0
            y, d = self._reduced_costs(cost)
            movable = (~self.is_basic) & (self.upper > self.lower)
            improving = movable & (((~self.at_up) & (d < -self.tol_d))
                                   | (self.at_up & (d > self.tol_d)))
            cand = np.flatnonzero(improving)
            if cand.size == 0:
                return OPTIMAL
            bland = degenerate >= opts.bland_after
            q = int(cand[0]) if bland else int(cand[np.argmax(np.abs(d[cand]))])
            direction = -1.0 if self.at_up[q] else 1.0
            alpha = self.Binv @ self._column(q) if m else np.zeros(0)
            delta = direction * alpha
            t_flip = self.upper[q] - self.lower[q]
            r = -1
            t_min = np.inf
            if m:
                xb = self.x[self.basis]
                ratios = np.full(m, np.inf)
                pos = delta > opts.tol_pivot
                neg = delta < -opts.tol_pivot
                ratios[pos] = (xb[pos] - self.lower[self.basis][pos]) / delta[pos]
                ub = self.upper[self.basis]
                ratios[neg] = (ub[neg] - xb[neg]) / (-delta[neg])
                np.maximum(ratios, 0.0, out=ratios)
                t_min = float(ratios.min())
                if np.isfinite(t_min):
                    ties = np.flatnonzero(ratios <= t_min + 1e-12 * (1.0 + t_min))
                    if bland:
                        r = int(ties[np.argmin(self.basis[ties])])
                    else:
                        r = int(ties[np.argmax(np.abs(delta[ties]))])
            if not np.isfinite(t_flip) and not np.isfinite(t_min):
                return UNBOUNDED
            self._tick()
            since_refactor += 1
            if t_flip <= t_min:
                t = t_flip
                if m:
                    self.x[self.basis] -= t * delta
                self.x[q] = self.lower[q] if self.at_up[q] else self.upper[q]
                self.at_up[q] = not self.at_up[q]
            else:
                t = t_min
                p = int(self.basis[r])
                self.x[self.basis] -= t * delta
                self.x[q] += direction * t
                leave_up = delta[r] < 0
                self.x[p] = self.upper[p] if leave_up else self.lower[p]
                self.at_up[p] = bool(leave_up)
                self.at_up[q] = False
                self.is_basic[p] = False
                self.is_basic[q] = True
                self.basis[r] = q
                self._pivot(r, alpha)
            degenerate = degenerate + 1 if t <= self.tol_feas else 0

    # -- dual simplex (warm starts) ----------------------------------------
    def dual_feasible(self, d: np.ndarray) -> bool:
        movable = (~self.is_basic) & (self.upper > self.lower)
        bad = movable & (((~self.at_up) & (d < -self.tol_d)) | (self.at_up & (d > self.tol_d)))
        return not bad.any()

    def primal_infeasibility(self) -> np.ndarray:
        xb = self.x[self.basis]
        return np.maximum(self.lower[self.basis] - xb, xb - self.upper[self.basis])

    def dual(self, cost: np.ndarray) -> str:
        opts = self.opts
        n, m = self.n, self.m
        degenerate = 0
        since_refactor = 0
        while True:
            if since_refactor >= opts.refactor_every:
                self._refactor()
                since_refactor = 0
            viol = self.primal_infeasibility()
            bad = np.flatnonzero(viol > self.tol_feas)
            if bad.size == 0:
                return OPTIMAL
            bland = degenerate >= opts.bland_after
            if bland:
                r = int(bad[np.argmin(self.basis[bad])])
            else:
                r = int(bad[np.argmax(viol[bad])])
            p = int(self.basis[r])
            below = self.x[p] < self.lower[p]
            y, d = self._reduced_costs(cost)
            row = self.Binv[r]
            arow = np.empty(self.N)
            arow[:n] = row @ self.A
            arow[n:n + m] = row
            arow[n + m:] = self.sigma * row
            movable = (~self.is_basic) & (self.upper > self.lower)
            tp = opts.tol_pivot
            if below:
                elig = movable & (((~self.at_up) & (arow < -tp)) | (self.at_up & (arow > tp)))
            else:
                elig = movable & (((~self.at_up) & (arow > tp)) | (self.at_up & (arow < -tp)))
            cand = np.flatnonzero(elig)
            if cand.size == 0:
                return INFEASIBLE
            ratios = np.abs(d[cand]) / np.abs(arow[cand])
            rmin = ratios.min()
            ties = cand[ratios <= rmin + 1e-12 * (1.0 + rmin)]
            q = int(ties[0]) if bland else int(ties[np.argmax(np.abs(arow[ties]))])
            self._tick()
            since_refactor += 1
            alpha = self.Binv @ self._column(q)
            target = self.lower[p] if below else self.upper[p]
            step = (self.x[p] - target) / alpha[r]
            self.x[self.basis] -= alpha * step
            self.x[q] += step
            self.x[p] = target
            self.at_up[p] = not below
            self.at_up[q] = False
            self.is_basic[p] = False
            self.is_basic[q] = True
            self.basis[r] = q
            self._pivot(r, alpha)
            degenerate = degenerate + 1 if rmin <= self.tol_d else 0

    # -- driver ------------------------------------------------------------
    def phase_one_cost(self) -> np.ndarray:
        cost = np.zeros(self.N)
        art = slice(self.n + self.m, self.N)
        cost[art] = np.where(np.isinf(self.upper[art]), 1.0, 0.0)
        return cost

    def solve(self, warm: Optional[Basis]) -> str:
        if warm is not None and self.warm_start(warm):
            if self.primal_infeasibility().max(initial=0.0) <= self.tol_feas:
                return self.primal(self.cost2)
            _, d = self._reduced_costs(self.cost2)
            if self.dual_feasible(d):
                status = self.dual(self.cost2)
                if status == INFEASIBLE:
                    return status
                return self.primal(self.cost2)
            self.x[:] = 0.0
            self.iterations = 0
        self.cold_start()
        self.primal(self.phase_one_cost())
        m, n = self.m, self.n
        art = slice(n + m, self.N)
        if self.x[art].sum() > self.tol_feas:
            return INFEASIBLE
        self.upper[art] = 0.0
        self.x[art] = np.where(self.is_basic[art], self.x[art], 0.0)
        return self.primal(self.cost2)

    def result(self, status: str) -> LpSolution:
        lp, n, m = self.lp, self.n, self.m
        nan = np.full(n, np.nan)
        if status != OPTIMAL:
            return LpSolution(status, np.nan, nan, np.full(m, np.nan), (),
                              nan, np.full(m, np.nan), self.iterations, None)
        self._refactor()
        theta = np.clip(self.x[:n], lp.var_lower, lp.var_upper)
        y, _ = self._reduced_costs(self.cost2)
        duals = self.sign * y * self.rho
        leq = ~lp.is_eq
        if lp.sense == MINIMIZE:
            duals[leq] = np.minimum(duals[leq], 0.0)
        else:
            duals[leq] = np.maximum(duals[leq], 0.0)
        slacks = lp.rhs - lp.A @ theta
        value = float(lp.objective @ theta) + lp.objective_constant
        reduced = lp.objective - lp.A.T @ duals
        tol_act = self.opts.tol_active * (1.0 + (np.max(np.abs(lp.rhs)) if m else 0.0))
        active = tuple(int(i) for i in np.flatnonzero(lp.is_eq | (np.abs(slacks) <= tol_act)))
        basis = Basis(n, m, self.basis.copy(), self.at_up.copy(), self.sigma.copy())
        return LpSolution(OPTIMAL, value, theta, duals, active, reduced, slacks,
                          self.iterations, basis)


def solve_lp(lp: LinearProgram, options: SolverOptions = DEFAULT_OPTIONS,
             warm_start: Optional[Basis] = None) -> LpSolution:
    """Solve ``lp`` to optimality or classify it as infeasible/unbounded.

    ``warm_start`` is an optional :class:`Basis` from a previous solve of an
    LP with the same dimensions; it is used when it is primal or dual
    feasible for ``lp`` and silently ignored otherwise.

    Raises
    ------
    LpNumericalError
        If the iteration cap is hit or the basis becomes singular.
    """
    solver = _Simplex(lp, options)
    status = solver.solve(warm_start)
    return solver.result(status)


def kkt_residuals(lp: LinearProgram, sol: LpSolution) -> dict:
    """Primal feasibility, duality gap and complementary slackness of ``sol``."""
    theta = sol.primal
    slack = lp.rhs - lp.A @ theta
    eq = lp.is_eq
    feas = 0.0
    if lp.n_constraints:
        feas = max(float(np.max(np.abs(slack[eq]), initial=0.0)),
                   float(np.max(-slack[~eq], initial=0.0)))
    bound_viol = float(max(np.max(lp.var_lower - theta, initial=0.0),
                           np.max(theta - lp.var_upper, initial=0.0)))
    rc = sol.reduced_costs
    dual_obj = float(lp.rhs @ sol.duals + rc @ theta) + lp.objective_constant
    # reduced costs must point into the box at the optimum
    sgn = 1.0 if lp.sense == MINIMIZE else -1.0
    at_lo = np.isclose(theta, lp.var_lower, rtol=0, atol=1e-9)
    at_hi = np.isclose(theta, lp.var_upper, rtol=0, atol=1e-9)
    rc_ok = np.where(at_lo & at_hi, 0.0,
                     np.where(at_lo, np.maximum(-sgn * rc, 0.0),
                              np.where(at_hi, np.maximum(sgn * rc, 0.0), np.abs(rc))))
    return {
        "primal_infeasibility": max(feas, bound_viol),
        "gap": abs(sol.value - dual_obj),
        "complementary_slackness": float(np.max(np.abs(sol.duals * slack), initial=0.0)),
        "dual_sign_violation": max(float(np.max(sgn * sol.duals[~eq], initial=0.0)), 0.0) + 0.0,
        "reduced_cost_violation": float(np.max(rc_ok, initial=0.0)),
    }


def assess_solution_uniqueness(lp: LinearProgram, sol: LpSolution,
                               tol: float = 1e-9) -> dict:
    """Report-only uniqueness certificates read off the optimal basis.

    ``primal_unique`` is False when some movable nonbasic column (a variable
    strictly inside its box range, or the slack of a binding ``leq`` row)
    prices out at zero, i.e. an alternative optimal direction exists.
    ``dual_unique`` is False when the basis is degenerate: some basic column
    sits at one of its bounds.
    """
    if not sol.optimal or sol.basis is None:
        raise ValueError("uniqueness can only be assessed for an optimal solution")
    n, m = lp.n_vars, lp.n_constraints
    basis = sol.basis
    is_basic = np.zeros(n + 2 * m, dtype=bool)
    is_basic[basis.basic] = True
    cscale = 1.0 + (np.max(np.abs(lp.objective)) if n else 0.0)
    movable = lp.var_upper > lp.var_lower
    struct_flat = (~is_basic[:n]) & movable & (np.abs(sol.reduced_costs) <= tol * cscale)
    rownorm = np.max(np.abs(lp.A), axis=1) if n else np.zeros(m)
    eq = lp.is_eq
    slack_flat = ((~is_basic[n:n + m]) & (~eq)
                  & (np.abs(sol.duals) * np.maximum(rownorm, 1e-300) <= tol * cscale))
    primal_unique = not (struct_flat.any() or slack_flat.any())

    tol_b = 1e-9
    degenerate = False
    for j in basis.basic:
        j = int(j)
        if j < n:
            span = 1.0 + max(abs(lp.var_lower[j]), abs(lp.var_upper[j]))
            x = sol.primal[j]
            if min(x - lp.var_lower[j], lp.var_upper[j] - x) <= tol_b * span:
                degenerate = True
        elif j < n + m:
            i = j - n
            if abs(sol.slacks[i]) <= tol_b * (1.0 + abs(lp.rhs[i])):
                degenerate = True
        else:
            degenerate = True
    return {"primal_unique": bool(primal_unique), "dual_unique": not degenerate}


def dump_lp(lp: LinearProgram) -> str:
    """Plain-text dump of ``lp``, one constraint per line."""
    def fmt(v):
        return " ".join(repr(float(x)) for x in v)

    lines = [
        "pibound-lp 1",
        f"sense {lp.sense}",
        f"nvars {lp.n_vars}",
        f"objective {fmt(lp.objective)}",
        f"constant {lp.objective_constant!r}",
        f"lower {fmt(lp.var_lower)}",
        f"upper {fmt(lp.var_upper)}",
    ]
    labels = lp.row_labels or tuple(f"r{i}" for i in range(lp.n_constraints))
    for i in range(lp.n_constraints):
        lines.append(f"row {labels[i]} {lp.relations[i]} {float(lp.rhs[i])!r} : {fmt(lp.A[i])}")
    return "\n".join(lines) + "\n"


def load_lp(text: str) -> LinearProgram:
    """Inverse of :func:`dump_lp`."""
    fields = {}
    rows = []
    for line in text.splitlines():
        if not line.strip():
            continue
        key, _, rest = line.partition(" ")
        if key == "row":
            head, _, coeffs = rest.partition(" : ")
            label, relation, rhs = head.split()
            rows.append((label, relation, float(rhs),
                         [float(v) for v in coeffs.split()]))
        else:
            fields[key] = rest
    n = int(fields["nvars"])

    def vec(key):
        return np.array([float(v) for v in fields[key].split()]) if n else np.zeros(0)

    A = np.array([r[3] for r in rows]).reshape(len(rows), n)
    return LinearProgram(vec("objective"), A, [r[2] for r in rows],
                         tuple(r[1] for r in rows), vec("lower"), vec("upper"),
                         fields["sense"], float(fields["constant"]),
                         tuple(r[0] for r in rows) if rows else None)


__all__ = [
    "Basis", "Constraint", "LinearProgram", "LpError", "LpNumericalError",
    "LpSolution", "SolverOptions", "MINIMIZE", "MAXIMIZE", "OPTIMAL",
    "INFEASIBLE", "UNBOUNDED", "assess_solution_uniqueness", "dump_lp",
    "kkt_residuals", "load_lp", "solve_lp",
]
