"""Random instance generators shared by the unit and acceptance tests."""

import json

import numpy as np

from pibound.lp import MAXIMIZE, MINIMIZE, LinearProgram
from pibound.model import AffineForm, Dataset, ModelSpec, Moment


def random_lp(rng, n_max=3, k_max=6):
    n = int(rng.integers(1, n_max + 1))
    k = int(rng.integers(0, k_max + 1))
    A = rng.integers(-4, 5, size=(k, n)).astype(float)
    x0 = rng.uniform(-1, 1, size=n)
    is_eq = rng.random(k) < 0.25
    # keep about half the instances feasible by anchoring rhs at x0
    slack = np.where(is_eq, 0.0, rng.uniform(-0.5, 2.0, size=k))
    rhs = A @ x0 + slack
    if rng.random() < 0.3:
        rhs = rng.integers(-3, 4, size=k).astype(float)
    lo = -rng.integers(1, 4, size=n).astype(float)
    hi = rng.integers(1, 4, size=n).astype(float)
    c = rng.integers(-3, 4, size=n).astype(float)
    sense = MAXIMIZE if rng.random() < 0.5 else MINIMIZE
    rel = tuple("eq" if e else "leq" for e in is_eq)
    return LinearProgram(c, A, rhs, rel, lo, hi, sense)


def random_data_model(rng, n=60):
    """Model whose moment system holds at a fixed interior point for every
    observation, so every resample has a nonempty identified set.

    Coefficient slots mix data columns and literals.
    """
    d = int(rng.integers(2, 4))
    k = int(rng.integers(2, 6))
    n_eq = int(rng.integers(0, min(d - 1, k) + 1))
    theta0 = rng.uniform(-0.5, 0.5, d)
    cols, moments = {}, []
    for j in range(k):
        coeffs, G = [], np.empty((n, d))
        for t in range(d):
            if rng.random() < 0.6:
                name = f"a{j}_{t}"
                cols[name] = rng.normal(size=n) + rng.normal()
                coeffs.append(name)
                G[:, t] = cols[name]
            else:
                v = float(rng.integers(-3, 4))
                coeffs.append(v)
                G[:, t] = v
        eq = j < n_eq
        slack = 0.0 if eq else rng.uniform(0.0, 0.5, n) * (rng.random() < 0.7)
        cols[f"b{j}"] = -(G @ theta0) - slack
        moments.append(Moment(f"m{j}", "eq" if eq else "leq",
                              AffineForm(tuple(coeffs), f"b{j}")))
    objective = AffineForm(tuple(float(v) for v in rng.integers(-3, 4, d)), 0.0)
    spec = ModelSpec(d, np.full(d, -2.0), np.full(d, 2.0), objective, tuple(moments))
    return spec, Dataset(cols)


def scaled_copy(spec, data, j, s):
    """Multiply every slot of moment ``j`` by ``s`` (columns are copied)."""
    cols = dict(data.columns)
    m = spec.moments[j]

    def scale(src, tag):
        if isinstance(src, str):
            name = f"{src}__x{tag}"
            cols[name] = s * cols[src]
            return name
        return s * src

    form = AffineForm(tuple(scale(c, i) for i, c in enumerate(m.form.coeffs)),
                      scale(m.form.const, "c"))
    moments = spec.moments[:j] + (Moment(m.label, m.sense, form),) + spec.moments[j + 1:]
    return (ModelSpec(spec.d_theta, spec.theta_lower, spec.theta_upper, spec.objective, moments),
            Dataset(cols))


def random_inconsistent_model(rng):
    """Literal model in one or two parameters containing a contradictory pair.

    Returns the spec plus ``(A, b, is_eq)`` with moment ``j`` reading
    ``A[j] @ theta + b[j] (<= or ==) 0``.
    """
    d = int(rng.integers(1, 3))
    k = int(rng.integers(0, 4))
    A = list(rng.uniform(-2, 2, (k, d)))
    b = list(rng.uniform(-1, 1, k))
    is_eq = list(rng.random(k) < 0.2)
    a = rng.uniform(-2, 2, d)
    t1, t2 = rng.uniform(0.01, 1.0, 2)
    # a'theta <= -t1 and a'theta >= t2 cannot both hold
    A += [a, -a]
    b += [t1, t2]
    is_eq += [False, False]
    order = rng.permutation(len(A))
    A = np.array(A)[order]
    b = np.array(b)[order]
    is_eq = np.array(is_eq)[order]
    moments = tuple(Moment(f"m{j}", "eq" if e else "leq",
                           AffineForm(tuple(float(v) for v in A[j]), float(b[j])))
                    for j, e in enumerate(is_eq))
    spec = ModelSpec(d, np.full(d, -3.0), np.full(d, 3.0), AffineForm((1.0,) * d, 0.0),
                     moments)
    return spec, A, b, is_eq


def synthetic_large_model(n=1000, blocks=40, width=10, leq=20, seed=0):
    """A ``blocks * width``-parameter model with ``blocks`` equalities and ``leq``
    inequalities, as a JSON document plus dataset.

    Each equality fixes the sum of one block of shares to a data mean in
    ``[2, 8]``. Even-numbered inequalities cap the first half of a block,
    odd-numbered ones cap a positive combination of 40 random shares. The
    uniform within-block allocation satisfies all of them in every
    resample.
    """
    rng = np.random.default_rng(seed)
    d = blocks * width
    cols, moments = {}, []

    def row(label, sense, co, col):
        moments.append({"label": label, "sense": sense,
                        "coeffs": [{"lit": float(c)} for c in co], "const": {"col": col}})

    for j in range(blocks):
        cols[f"neg_share_{j}"] = -rng.uniform(2, 8, n)
        co = np.zeros(d)
        co[j * width:(j + 1) * width] = 1.0
        row(f"block_{j}", "eq", co, f"neg_share_{j}")
    for l in range(leq):
        co = np.zeros(d)
        if l % 2:
            idx = rng.choice(d, 40, replace=False)
            co[idx] = rng.uniform(0.2, 1.0, 40)
            cols[f"neg_cap_{l}"] = -rng.uniform(0.85, 0.95, n) * co.sum()
        else:
            j = l % blocks
            co[j * width:j * width + width // 2] = 1.0
            cols[f"neg_cap_{l}"] = -rng.uniform(3, 5, n)
        row(f"cap_{l}", "leq", co, f"neg_cap_{l}")
    objective = rng.uniform(0, 1, d)
    doc = {"d_theta": d, "theta_lower": [0.0] * d, "theta_upper": [1.0] * d,
           "objective": {"coeffs": [{"lit": float(c)} for c in objective],
                         "const": {"lit": 0.0}},
           "moments": moments}
    return json.dumps(doc), Dataset(cols)
