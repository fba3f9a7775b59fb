"""Simulation designs: missing outcomes and interval-valued regression.

Each generator returns the dataset, a matching model spec, and the true
value of the functional, so a Monte Carlo harness can score coverage.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .model import AffineForm, Dataset, ModelSpec, Moment

Y_VALUES = (1, 2, 3, 4, 5)


class SimulatedSample(NamedTuple):
    data: Dataset
    spec: ModelSpec
    psi_true: float


def _half_width(c: float, n: int, delta: float) -> float:
    return max(c / math.sqrt(n), delta)


@dataclass(frozen=True)
class MissingDataConfig:
    n: int
    c: float = 1.0
    delta: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.c < 0 or self.delta < 0:
            raise ValueError("c and delta must be nonnegative")
        if not 0.0 <= self.q <= 1.0:
            raise ValueError(f"missing probability {self.q} outside [0, 1]")

    @property
    def q(self) -> float:
        """Probability that the outcome is missing."""
        return _half_width(self.c, self.n, self.delta)


@dataclass(frozen=True)
class IntervalRegressionConfig:
    n: int
    c: float = 1.0
    delta: float = 1e-6
    theta_true: tuple = (1.15, 1.0, 1.0, 1.0)
    seed: int = 0
    include_zero: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.c < 0 or self.delta < 0:
            raise ValueError("c and delta must be nonnegative")
        if len(self.theta_true) != 4:
            raise ValueError("theta_true must have 4 components")

    @property
    def h(self) -> float:
        """Half-width of the observed outcome interval."""
        return _half_width(self.c, self.n, self.delta)


def missing_data_spec() -> ModelSpec:
    """Model for the mean of a 5-point outcome observed only when D = 1.

    Parameters are ``theta_{yd} = P(Y=y, D=d)`` ordered
    ``(theta_10, ..., theta_50, theta_11, ..., theta_51)``.
    """
    nY = len(Y_VALUES)
    objective = AffineForm(tuple(float(y) for y in Y_VALUES) * 2, 0.0)
    moments = [Moment("missing_mass", "eq",
                      AffineForm((1.0,) * nY + (0.0,) * nY, "neg_d0"))]
    for i, y in enumerate(Y_VALUES):
        coeffs = [0.0] * (2 * nY)
        coeffs[nY + i] = 1.0
        moments.append(Moment(f"observed_y{y}", "eq",
                              AffineForm(tuple(coeffs), f"neg_y{y}_d1")))
    return ModelSpec(2 * nY, np.zeros(2 * nY), np.ones(2 * nY), objective, tuple(moments))


def missing_data_columns(y, d) -> dict:
    """Observation-level columns for the missing-data model from raw ``(Y*D, D)``."""
    y = np.asarray(y, dtype=float)
    d = np.asarray(d, dtype=float)
    cols = {"yd": y * d, "d": d, "neg_d0": -(d == 0).astype(float)}
    for v in Y_VALUES:
        cols[f"neg_y{v}_d1"] = -((d == 1) & (y == v)).astype(float)
    return cols


def generate_missing_data(cfg: MissingDataConfig) -> SimulatedSample:
    rng = np.random.default_rng(cfg.seed)
    q = cfg.q
    y = rng.integers(1, len(Y_VALUES) + 1, size=cfg.n)
    d = (rng.random(cfg.n) >= q).astype(int)
    data = Dataset(missing_data_columns(y * d, d))
    psi_true = float(np.mean(Y_VALUES))
    return SimulatedSample(data, missing_data_spec(), psi_true)


def support_points(d: int = 4) -> np.ndarray:
    """All points of ``{0, 1}^d`` in lexicographic order."""
    return np.array(list(itertools.product((0, 1), repeat=d)), dtype=float)


def interval_regression_spec(d: int = 4, bound: float = 10.0,
                             include_zero: bool = False) -> ModelSpec:
    """Bounds on ``theta_1`` from ``E[Y_lo | x] <= x'theta <= E[Y_hi | x]``.

    Each conditional restriction is written in unconditional form, so
    support point ``r`` contributes
    ``-1{X=x_r} x_r'theta + Y_lo 1{X=x_r} <= 0`` and
    ``1{X=x_r} x_r'theta - Y_hi 1{X=x_r} <= 0``.

    The point ``x = 0`` gives rows without theta. They restrict nothing but
    their sampling noise can empty the sample set and force a relaxation of
    every other row, so they are left out unless ``include_zero`` is set.
    """
    pts = support_points(d)
    lower, upper = [], []
    for r, x in enumerate(pts):
        if not include_zero and not x.any():
            continue
        lower.append(Moment(f"lower_{r}", "leq", AffineForm(
            tuple(f"neg_ind_{r}" if xk else 0.0 for xk in x), f"ylo_{r}")))
        upper.append(Moment(f"upper_{r}", "leq", AffineForm(
            tuple(f"ind_{r}" if xk else 0.0 for xk in x), f"neg_yhi_{r}")))
    objective = AffineForm((1.0,) + (0.0,) * (d - 1), 0.0)
    return ModelSpec(d, np.full(d, -bound), np.full(d, bound), objective,
                     tuple(lower + upper))


def interval_regression_columns(X, y_lo, y_hi) -> dict:
    X = np.asarray(X, dtype=float)
    y_lo = np.asarray(y_lo, dtype=float)
    y_hi = np.asarray(y_hi, dtype=float)
    pts = support_points(X.shape[1])
    cols = {f"x{k + 1}": X[:, k] for k in range(X.shape[1])}
    cols["y_lo"] = y_lo
    cols["y_hi"] = y_hi
    for r, x in enumerate(pts):
        ind = np.all(X == x, axis=1).astype(float)
        cols[f"ind_{r}"] = ind
        cols[f"neg_ind_{r}"] = -ind
        cols[f"ylo_{r}"] = y_lo * ind
        cols[f"neg_yhi_{r}"] = -y_hi * ind
    return cols


def generate_interval_regression(cfg: IntervalRegressionConfig) -> SimulatedSample:
    rng = np.random.default_rng(cfg.seed)
    theta = np.asarray(cfg.theta_true, dtype=float)
    X = (rng.random((cfg.n, theta.size)) < 0.5).astype(float)
    y = X @ theta + rng.standard_normal(cfg.n)
    h = cfg.h
    data = Dataset(interval_regression_columns(X, y - h, y + h))
    spec = interval_regression_spec(theta.size, include_zero=cfg.include_zero)
    return SimulatedSample(data, spec, float(theta[0]))


EXAMPLES = {
    "missing-data": (MissingDataConfig, generate_missing_data),
    "interval-regression": (IntervalRegressionConfig, generate_interval_regression),
}


def generate_example(name: str, n: int, c: float, seed: int, **kwargs) -> SimulatedSample:
    """Dispatch by example name, as used by the command-line simulator."""
    try:
        cfg_cls, gen = EXAMPLES[name]
    except KeyError:
        raise ValueError(f"unknown example {name!r}; choose from {sorted(EXAMPLES)}") from None
    return gen(cfg_cls(n=n, c=c, seed=seed, **kwargs))
