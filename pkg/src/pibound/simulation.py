"""Monte Carlo coverage experiments for the built-in designs."""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import Iterable, NamedTuple

import numpy as np

from .dgp import generate_example
from .inference import (DEFAULT_INFERENCE, InferenceError, InferenceOptions,
                        construct_confidence_set, resolve_workers)

COLUMNS = ("n", "c", "alpha", "reps", "boot", "coverage", "avg_lb", "avg_ub",
           "avg_ci_lower", "avg_ci_upper", "failures", "wall_seconds")


@dataclass(frozen=True)
class SimulationRow:
    n: int
    c: float
    alpha: float
    reps: int
    boot: int
    coverage: float
    avg_lb: float
    avg_ub: float
    avg_ci_lower: float
    avg_ci_upper: float
    failures: int
    wall_seconds: float


class Replication(NamedTuple):
    lb: float
    ub: float
    lower: float
    upper: float
    covered: bool


def rep_seeds(seed: int, rep: int) -> tuple:
    """Data and bootstrap seeds for replication ``rep``.

    They do not depend on ``n`` or ``c``, so designs that differ only in
    those share random numbers.
    """
    data_seed, boot_seed = np.random.SeedSequence([seed, rep]).generate_state(2)
    return int(data_seed), int(boot_seed)


def run_replication(example: str, n: int, c: float, alpha: float, boot: int, seed: int,
                    rep: int, options: InferenceOptions = DEFAULT_INFERENCE,
                    dgp_kwargs=None):
    """One experiment: simulate, build the confidence set, score coverage.

    Returns ``None`` when the pipeline fails for this sample.
    """
    data_seed, boot_seed = rep_seeds(seed, rep)
    sample = generate_example(example, n, c, data_seed, **(dgp_kwargs or {}))
    try:
        cs = construct_confidence_set(sample.spec, sample.data, alpha, boot, boot_seed,
                                      options)
    except InferenceError:
        return None
    covered = cs.lower <= sample.psi_true <= cs.upper
    return Replication(cs.estimate.lb, cs.estimate.ub, cs.lower, cs.upper, covered)


def run_simulation(example: str, n: int, c: float, alpha: float = 0.10, reps: int = 100,
                   boot: int = 300, seed: int = 0,
                   options: InferenceOptions = DEFAULT_INFERENCE, dgp_kwargs=None,
                   ) -> SimulationRow:
    """Coverage and average bounds over ``reps`` independent experiments.

    Replications run in ``options.workers`` processes (the bootstrap inside
    each replication is then serial). Coverage counts
    ``psi_true in [lower, upper]`` over replications that completed; failed
    replications are reported in ``failures``.
    """
    if reps < 1:
        raise ValueError("reps must be at least 1")
    if boot < 1:
        raise ValueError("boot must be at least 1")
    start = time.perf_counter()
    workers = min(resolve_workers(options.workers), reps)
    inner = replace(options, workers=1)
    args = (example, n, c, alpha, boot, seed)
    if workers == 1:
        results = _rep_chunk(args, range(reps), inner, dgp_kwargs)
    else:
        bounds = np.linspace(0, reps, workers * 4 + 1).astype(int)
        chunks = [range(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_rep_chunk, args, ch, inner, dgp_kwargs) for ch in chunks]
            results = [r for f in futures for r in f.result()]
    done = [r for r in results if r is not None]
    failures = len(results) - len(done)

    def avg(field):
        return float(np.mean([getattr(r, field) for r in done])) if done else float("nan")

    coverage = float(np.mean([r.covered for r in done])) if done else float("nan")
    return SimulationRow(n, float(c), float(alpha), reps, boot, coverage, avg("lb"),
                         avg("ub"), avg("lower"), avg("upper"), failures,
                         time.perf_counter() - start)


def _rep_chunk(args, reps, options, dgp_kwargs):
    return [run_replication(*args, rep=r, options=options, dgp_kwargs=dgp_kwargs)
            for r in reps]


def rows_to_csv(rows: Iterable[SimulationRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        d = asdict(row)
        writer.writerow([_fmt(d[c]) for c in COLUMNS])
    return buf.getvalue()


def rows_to_table(rows: Iterable[SimulationRow]) -> str:
    """Aligned plain-text rendering of the CSV columns."""
    cells = [list(COLUMNS)]
    for row in rows:
        d = asdict(row)
        cells.append([_fmt(d[c], pretty=True) for c in COLUMNS])
    widths = [max(len(r[i]) for r in cells) for i in range(len(COLUMNS))]
    return "\n".join("  ".join(v.rjust(w) for v, w in zip(r, widths)) for r in cells) + "\n"


def _fmt(v, pretty=False) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(v)
    if pretty:
        return f"{v:.4f}"
    return repr(float(v))
