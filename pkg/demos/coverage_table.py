"""A small Monte Carlo table: coverage of the 90% confidence set.

Each row repeats the whole pipeline (simulate, estimate, bootstrap,
calibrate) ``reps`` times and records how often the true value was inside
the confidence set. Kept small so it runs in well under a minute; the
acceptance suite runs the full-size versions.
"""

from pibound.simulation import rows_to_table, run_simulation

rows = [run_simulation("missing-data", n, 1.0, alpha=0.10, reps=40, boot=200, seed=0)
        for n in (250, 1000)]
rows.append(run_simulation("interval-regression", 500, 5.0, alpha=0.10, reps=10, boot=100,
                           seed=0))
print(rows_to_table(rows))
