"""Independent reference computations used by the test-suite.

Nothing in here calls into the simplex code.
"""

import itertools

import numpy as np


def vertex_enumeration(c, A, b, is_eq, lower, upper, maximize=False, tol=1e-9):
    """Optimal value of a small bounded LP by enumerating all vertices.

    Returns ``None`` when no vertex is feasible (the polytope is empty).
    """
    c = np.asarray(c, float)
    n = c.size
    A = np.asarray(A, float).reshape(-1, n)
    b = np.asarray(b, float)
    is_eq = np.asarray(is_eq, bool)
    # every hyperplane that can be active: constraint rows and box faces
    planes = [(A[i], b[i]) for i in range(A.shape[0])]
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        planes.append((e, lower[j]))
        planes.append((e, upper[j]))
    best = None
    for combo in itertools.combinations(range(len(planes)), n):
        M = np.array([planes[k][0] for k in combo])
        rhs = np.array([planes[k][1] for k in combo])
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        x = np.linalg.solve(M, rhs)
        scale = 1.0 + np.max(np.abs(b), initial=0.0)
        if np.any(x < np.asarray(lower) - tol * scale) or np.any(x > np.asarray(upper) + tol * scale):
            continue
        r = A @ x - b
        if np.any(r[~is_eq] > tol * scale) or np.any(np.abs(r[is_eq]) > tol * scale):
            continue
        val = c @ x
        if best is None or (val > best if maximize else val < best):
            best = val
    return best


def exhaustive_calibration(L, U, D, alpha):
    """Brute-force search for the shortest interval quantile pair.

    Scans every candidate lower quantile in ``{L} u {L - D}`` against every
    candidate upper quantile in ``{-(U + D)} u {-U}`` and counts draws
    directly. Returns ``(q_lb, q_ub)`` or ``None`` if nothing is feasible.
    """
    L = np.asarray(L, float)
    U = np.asarray(U, float)
    B = L.size
    m = int(np.ceil((1 - alpha) * B - 1e-9))
    qlb = np.unique(np.concatenate([L, L - D]))
    qub = np.unique(np.concatenate([-(U + D), -U]))
    best = None
    for a in qlb:
        in1 = L <= a
        in2 = L <= a + D
        for q in qub:
            c1 = np.count_nonzero(in1 & (U + D >= -q))
            c2 = np.count_nonzero(in2 & (U >= -q))
            if c1 >= m and c2 >= m:
                tot = a + q
                if best is None or tot < best[0] or (tot == best[0] and a < best[1]):
                    best = (tot, a, q)
                break  # qub is sorted: the first feasible q is the smallest
    return None if best is None else (best[1], best[2])


def _zoom_1d(f, lo, hi, levels, points):
    best_x, best_v = None, np.inf
    for _ in range(levels):
        xs = np.linspace(lo, hi, points)
        vals = f(xs)
        k = int(np.argmin(vals))
        if vals[k] < best_v:
            best_v, best_x = float(vals[k]), float(xs[k])
        step = (hi - lo) / (points - 1)
        # a convex function's minimizer is within one step of the grid argmin
        lo, hi = max(lo, best_x - 2 * step), min(hi, best_x + 2 * step)
    return best_v, best_x


def grid_min_max(values_fn, lower, upper, levels=16, points=21):
    """Minimize a convex function on a box by nested zooming grids.

    ``values_fn`` maps an ``(m, d)`` array of points to ``m`` values. Each
    coordinate is searched by a zooming 1-D grid over the profile (the
    minimum over the remaining coordinates), which is again convex.
    Returns ``(value, argmin)``.
    """
    lower = np.asarray(lower, float)
    upper = np.asarray(upper, float)
    if lower.size == 1:
        v, x = _zoom_1d(lambda xs: values_fn(xs[:, None]), lower[0], upper[0], levels, points)
        return v, np.array([x])
    inner = {}

    def profile(xs):
        out = np.empty(xs.size)
        for i, t in enumerate(xs):
            v, rest = grid_min_max(
                lambda pts: values_fn(np.column_stack([np.full(len(pts), t), pts])),
                lower[1:], upper[1:], levels, points)
            out[i] = v
            inner[float(t)] = rest
        return out

    v, x = _zoom_1d(profile, lower[0], upper[0], levels, points)
    return v, np.concatenate([[x], inner[x]])
