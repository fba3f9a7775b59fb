import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from pibound.dgp import (IntervalRegressionConfig, MissingDataConfig, generate_interval_regression,
                         generate_missing_data, interval_regression_columns,
                         interval_regression_spec, missing_data_columns, missing_data_spec)
from pibound.inference import (FLAG_OK, FLAG_RELAXED, InferenceOptions, SolverFailure,
                               bootstrap_value_functions, compute_relaxation,
                               construct_confidence_set, delta_method_oracle,
                               estimate_identified_set, multinomial_weights)
from pibound.lp import OPTIMAL, solve_lp
from pibound.model import AffineForm, Dataset, ModelSpec, Moment, build_empirical_lp

from generators import scaled_copy
from oracles import grid_min_max


def missing_sample(counts_y_d1, count_d0):
    """Dataset with ``counts_y_d1[y-1]`` rows observed at y and ``count_d0`` missing."""
    y = np.repeat([1, 2, 3, 4, 5, 0], list(counts_y_d1) + [count_d0])
    return Dataset(missing_data_columns(y, (y > 0).astype(int)))


def one_dim(moments, lo=-5.0, hi=5.0):
    """Model in a scalar theta with literal moments ``(a, b)`` meaning a*theta + b <= 0."""
    ms = tuple(Moment(f"m{j}", "leq", AffineForm((float(a),), float(b)))
               for j, (a, b) in enumerate(moments))
    return ModelSpec(1, [lo], [hi], AffineForm((1.0,), 0.0), ms)


DUMMY = Dataset({"z": np.zeros(3)})


def test_missing_data_closed_form_bounds():
    est = estimate_identified_set(missing_data_spec(), missing_sample([18] * 5, 10))
    assert est.lb == pytest.approx(2.80, abs=1e-12)
    assert est.ub == pytest.approx(3.20, abs=1e-12)
    assert est.relaxation_used == 0.0
    assert est.delta == pytest.approx(0.4)


def test_no_missing_mass_point_identifies():
    counts = [3, 1, 4, 1, 5]
    est = estimate_identified_set(missing_data_spec(), missing_sample(counts, 0))
    mean = np.dot([1, 2, 3, 4, 5], counts) / sum(counts)
    assert est.lb == pytest.approx(mean, abs=1e-12)
    assert est.ub == pytest.approx(mean, abs=1e-12)


def test_zero_width_intervals_identify_regression_coefficient():
    # support points (1, 0) and (1, 1): theta_1 = E[Y | x=(1,0)] = 3
    X = np.array([[1, 0], [1, 0], [1, 1], [1, 1]], dtype=float)
    y = np.array([2.0, 4.0, 5.0, 7.0])
    data = Dataset(interval_regression_columns(X, y, y))
    est = estimate_identified_set(interval_regression_spec(2), data)
    assert est.relaxation_used == 0.0
    assert est.lb == pytest.approx(3.0, abs=1e-9)
    assert est.ub == pytest.approx(3.0, abs=1e-9)


def test_relaxation_of_inconsistent_half_lines():
    spec = one_dim([(1.0, 1.0), (-1.0, 0.0)])
    assert compute_relaxation(spec, DUMMY) == pytest.approx(0.5)
    est = estimate_identified_set(spec, DUMMY)
    assert est.c_star == pytest.approx(0.5)
    assert est.relaxation_used == pytest.approx(0.5 + 1e-6 * 2)
    assert est.lb == pytest.approx(-0.5 - 2e-6)
    assert est.ub == pytest.approx(-0.5 + 2e-6)


def test_feasible_model_needs_no_relaxation():
    spec = one_dim([(1.0, -1.0), (-1.0, 0.0)])
    assert compute_relaxation(spec, DUMMY) == 0.0


def test_relaxation_off_raises():
    spec = one_dim([(1.0, 1.0), (-1.0, 0.0)])
    with pytest.raises(SolverFailure, match="infeasible"):
        estimate_identified_set(spec, DUMMY, options=InferenceOptions(relax="off"))


def test_adding_up_violation_relaxation():
    # add sum(theta) = 1 to a sample whose frequencies sum to 1.01
    base = missing_data_spec()
    total = Moment("adding_up", "eq", AffineForm((1.0,) * 10, -1.0))
    spec = ModelSpec(10, base.theta_lower, base.theta_upper, base.objective,
                     base.moments + (total,))
    cols = {"neg_d0": [-0.11]}
    cols.update({f"neg_y{y}_d1": [-0.18] for y in range(1, 6)})
    c_star = compute_relaxation(spec, Dataset(cols))
    # seven split equalities share the 0.01 excess equally
    assert c_star == pytest.approx(0.01 / 7, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_relaxation_minimal_against_grid(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(2, 6))
    moments = [(rng.uniform(-2, 2), rng.uniform(-1, 1)) for _ in range(k)]
    spec = one_dim(moments, -3.0, 3.0)
    c = compute_relaxation(spec, DUMMY)
    a = np.array([m[0] for m in moments])
    b = np.array([m[1] for m in moments])
    ref, _ = grid_min_max(lambda th: np.max(th[:, :1] * a + b, axis=1), [-3.0], [3.0])
    assert c == pytest.approx(max(ref, 0.0), abs=1e-6)
    assert solve_lp(build_empirical_lp(spec, DUMMY, relaxation=c + 1e-6)).status == OPTIMAL
    if c > 1e-6:
        assert solve_lp(build_empirical_lp(spec, DUMMY, relaxation=c - 1e-6)).status != OPTIMAL


def test_identical_rows_give_zero_draws():
    data = missing_sample([0, 0, 7, 0, 0], 0)
    draws = bootstrap_value_functions(missing_data_spec(), data, 25, seed=1)
    assert_array_equal(draws.L, 0.0)
    assert_array_equal(draws.U, 0.0)
    assert set(draws.flags) == {FLAG_OK}
    cs = construct_confidence_set(missing_data_spec(), data, 0.1, 25, 1)
    assert (cs.lower, cs.upper) == (cs.estimate.lb, cs.estimate.ub)


def test_bootstrap_is_deterministic_and_worker_independent():
    s = generate_missing_data(MissingDataConfig(200, 1.0, seed=4))
    a = bootstrap_value_functions(s.spec, s.data, 40, seed=9)
    b = bootstrap_value_functions(s.spec, s.data, 40, seed=9)
    c = bootstrap_value_functions(s.spec, s.data, 40, seed=9, options=InferenceOptions(workers=3))
    for other in (b, c):
        assert_array_equal(a.L, other.L)
        assert_array_equal(a.U, other.U)
        assert a.flags == other.flags
    d = bootstrap_value_functions(s.spec, s.data, 40, seed=10)
    assert not np.array_equal(a.L, d.L)


def test_warm_start_does_not_change_draws():
    s = generate_interval_regression(IntervalRegressionConfig(300, 5.0, seed=2))
    warm = bootstrap_value_functions(s.spec, s.data, 30, seed=3)
    cold = bootstrap_value_functions(s.spec, s.data, 30, seed=3,
                                     options=InferenceOptions(warm_start=False))
    assert_allclose(warm.L, cold.L, atol=1e-8)
    assert_allclose(warm.U, cold.U, atol=1e-8)


def test_multinomial_weights_sum_to_n():
    w = multinomial_weights(50, 0, 3)
    assert w.sum() == 50
    assert_array_equal(w, multinomial_weights(50, 0, 3))


def test_draws_relax_when_resample_is_empty():
    s = generate_interval_regression(IntervalRegressionConfig(400, 1.0, seed=8))
    draws = bootstrap_value_functions(s.spec, s.data, 30, seed=0)
    assert draws.failure_rate == 0.0
    assert FLAG_RELAXED in draws.flags


def test_bootstrap_spread_matches_delta_method_small_sample():
    # n = 20: the lower bound is linear in the cell frequencies, so the
    # bootstrap and delta-method laws share their variance
    data = missing_sample([3, 4, 3, 3, 3], 4)
    spec = missing_data_spec()
    est = estimate_identified_set(spec, data)
    oracle = delta_method_oracle(spec, data, est)
    draws = bootstrap_value_functions(spec, data, 2000, seed=0, estimate=est)
    assert np.std(draws.L) == pytest.approx(oracle.sd_lb, rel=0.15)
    assert np.std(draws.U) == pytest.approx(oracle.sd_ub, rel=0.15)


def test_delta_method_exact_discrete_variance():
    counts = [30, 20, 25, 10, 15]
    missing = 12
    data = missing_sample(counts, missing)
    spec = missing_data_spec()
    oracle = delta_method_oracle(spec, data, estimate_identified_set(spec, data))
    freq = np.array(counts + [missing], dtype=float)
    freq /= freq.sum()
    for value_missing, sd in ((1.0, oracle.sd_lb), (5.0, oracle.sd_ub)):
        g = np.array([1, 2, 3, 4, 5, value_missing])
        var = freq @ (g - freq @ g) ** 2
        assert sd == pytest.approx(math.sqrt(var), abs=1e-10)


def test_delta_method_zero_without_binding_moments():
    spec = one_dim([(1.0, -10.0)])
    oracle = delta_method_oracle(spec, DUMMY, estimate_identified_set(spec, DUMMY))
    assert oracle.sd_lb == 0.0
    assert oracle.sd_ub == 0.0


def test_delta_method_invariant_to_moment_scale():
    s = generate_missing_data(MissingDataConfig(300, 2.0, seed=1))
    spec = s.spec
    cols = dict(s.data.columns)
    cols["neg_y3_d1"] = 7.0 * cols["neg_y3_d1"]
    j = spec.labels.index("observed_y3")
    m = spec.moments[j]
    scaled_m = Moment(m.label, m.sense, AffineForm(
        tuple(7.0 * c for c in m.form.coeffs), m.form.const))
    scaled = ModelSpec(spec.d_theta, spec.theta_lower, spec.theta_upper, spec.objective,
                       spec.moments[:j] + (scaled_m,) + spec.moments[j + 1:])
    data2 = Dataset(cols)
    a = delta_method_oracle(spec, s.data, estimate_identified_set(spec, s.data))
    b = delta_method_oracle(scaled, data2, estimate_identified_set(scaled, data2))
    assert_allclose(a.influence_lb, b.influence_lb, atol=1e-12)
    assert_allclose(a.influence_ub, b.influence_ub, atol=1e-12)


@pytest.mark.parametrize("s", [1e-3, 1e3])
def test_pipeline_scale_invariance(s):
    sample = generate_missing_data(MissingDataConfig(300, 2.0, seed=6))
    spec2, data2 = scaled_copy(sample.spec, sample.data, 2, s)
    a = construct_confidence_set(sample.spec, sample.data, 0.1, 60, 5)
    b = construct_confidence_set(spec2, data2, 0.1, 60, 5)
    for x, y in ((a.lower, b.lower), (a.upper, b.upper), (a.estimate.lb, b.estimate.lb),
                 (a.estimate.ub, b.estimate.ub)):
        assert abs(x - y) <= 1e-8 * max(1.0, abs(x))
    assert_allclose(a.draws.L, b.draws.L, rtol=1e-8, atol=1e-8)


def test_confidence_set_contains_estimate_when_quantiles_positive():
    s = generate_missing_data(MissingDataConfig(500, 1.0, seed=2))
    cs = construct_confidence_set(s.spec, s.data, 0.1, 200, 3)
    assert cs.q_lb > 0 and cs.q_ub > 0
    assert cs.lower <= cs.estimate.lb and cs.upper >= cs.estimate.ub
    assert cs.lower == pytest.approx(cs.estimate.lb - cs.q_lb / math.sqrt(500))
    assert cs.upper == pytest.approx(cs.estimate.ub + cs.q_ub / math.sqrt(500))


def test_clamp_option():
    s = generate_missing_data(MissingDataConfig(500, 1.0, seed=2))
    cs = construct_confidence_set(s.spec, s.data, 0.9, 50, 3,
                                  InferenceOptions(clamp_nonnegative=True))
    assert cs.q_lb >= 0 and cs.q_ub >= 0
