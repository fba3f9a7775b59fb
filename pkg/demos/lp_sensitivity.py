"""The LP layer on its own: values, multipliers, active sets and certificates."""

import numpy as np

from pibound.lp import MAXIMIZE, LinearProgram, assess_solution_uniqueness, dump_lp, \
    kkt_residuals, solve_lp

# maximize x + 2y  s.t.  x + y <= 1.5,  y <= 1,  0 <= x, y <= 1
lp = LinearProgram.from_constraints(
    [1.0, 2.0], [([1.0, 1.0], "leq", 1.5), ([0.0, 1.0], "leq", 1.0)],
    [0.0, 0.0], [1.0, 1.0], MAXIMIZE)
sol = solve_lp(lp)
print("value", sol.value, "at", sol.primal)
print("duals (d value / d rhs):", sol.duals)
print("active rows:", sol.active_set)
print("KKT residuals:", {k: float(v) for k, v in kkt_residuals(lp, sol).items()})

# The multiplier predicts the change in value from loosening a row
bumped = LinearProgram.from_constraints(
    [1.0, 2.0], [([1.0, 1.0], "leq", 1.6), ([0.0, 1.0], "leq", 1.0)],
    [0.0, 0.0], [1.0, 1.0], MAXIMIZE)
print("value after rhs 1.5 -> 1.6:", solve_lp(bumped).value,
      " predicted:", sol.value + 0.1 * sol.duals[0])

# Duplicate the first row: the value is unchanged but the split of its
# multiplier between the copies is arbitrary
dup = LinearProgram(lp.objective, np.vstack([lp.A, lp.A[:1]]), np.append(lp.rhs, 1.5),
                    ("leq",) * 3, lp.var_lower, lp.var_upper, MAXIMIZE)
dsol = solve_lp(dup)
print("\nwith a duplicated row:", dsol.duals, assess_solution_uniqueness(dup, dsol))

# Plain-text dump for bug reports
print("\n" + dump_lp(lp))
