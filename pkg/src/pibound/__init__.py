"""Bounds and bootstrap confidence sets for linear functionals of partially
identified parameters defined by linear moment (in)equalities."""

__version__ = "0.1.0"

from .lp import (LinearProgram, LpSolution, SolverOptions, assess_solution_uniqueness,
                 solve_lp)
from .model import (AffineForm, Dataset, ModelSpec, ModelSpecError, Moment,
                    build_empirical_lp, evaluate_moments, parse_model, read_csv,
                    serialize_model, write_csv)
from .inference import (BootstrapDraws, CalibrationError, ConfidenceSet, InferenceOptions,
                        bootstrap_value_functions, calibrate_quantiles, compute_relaxation,
                        construct_confidence_set, delta_method_oracle,
                        estimate_identified_set, threshold_delta)
from .diagnostics import (DiagnosticsReport, check_licq, full_report,
                          perturbation_licq_probe)
