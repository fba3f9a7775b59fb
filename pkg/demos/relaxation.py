"""What happens when the sample moment conditions contradict each other.

The two moments below ask for theta >= 0.6 and theta <= 0.4. No theta
satisfies both, so the estimator finds the smallest uniform slack c* that
makes the system feasible (here 0.1, at theta = 0.5) and reports bounds
for the relaxed system.
"""

import json

import numpy as np

from pibound import compute_relaxation, estimate_identified_set, parse_model
from pibound.inference import InferenceOptions, SolverFailure
from pibound.model import Dataset

spec = parse_model(json.dumps({
    "d_theta": 1, "theta_lower": [0], "theta_upper": [1],
    "objective": {"coeffs": [{"lit": 1}], "const": {"lit": 0}},
    "moments": [
        {"label": "at_least", "sense": "leq", "coeffs": [{"lit": -1}], "const": {"lit": 0.6}},
        {"label": "at_most", "sense": "leq", "coeffs": [{"lit": 1}], "const": {"lit": -0.4}},
    ]}))
data = Dataset({"unused": np.zeros(1)})

print("c* =", compute_relaxation(spec, data))
est = estimate_identified_set(spec, data)
print(f"relaxed bounds [{est.lb:.6f}, {est.ub:.6f}], relaxation used {est.relaxation_used:.7f}")

try:
    estimate_identified_set(spec, data, options=InferenceOptions(relax="off"))
except SolverFailure as exc:
    print("with relax='off':", exc)
