import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lagorth.core import DimensionMismatchError, laguerre_fn
from lagorth.transform import (
    AliasingError,
    CoefficientTensor,
    FunctionHandle,
    analyze,
    analyze_samples,
    basis_function,
    decay_report,
    expdecay,
    gauss_laguerre_rule,
    gaussian,
    integrate,
    pairing,
    schwartz_seminorm,
    seminorm_sequence,
    series_function,
    synthesize,
    tensor_nodes,
    zero_function,
)

RULE64 = gauss_laguerre_rule(64)


# -- quadrature ------------------------------------------------------------


def test_one_point_rule():
    r = gauss_laguerre_rule(1)
    assert r.nodes.tolist() == pytest.approx([1.0])
    assert r.raw_weights.tolist() == pytest.approx([1.0])
    assert r.exactness_degree == 1


def test_two_point_rule_nodes():
    r = gauss_laguerre_rule(2)
    # roots of 1 - 2x + x^2/2
    assert r.nodes == pytest.approx([2 - math.sqrt(2), 2 + math.sqrt(2)], rel=1e-15)


@pytest.mark.parametrize("m", [1, 2, 5, 17, 64, 128])
def test_first_moment(m):
    r = gauss_laguerre_rule(m)
    assert abs(np.sum(r.weights * np.exp(-r.nodes) * r.nodes) - 1.0) < 1e-12


@pytest.mark.parametrize("m", [3, 8, 20, 40])
def test_moment_exactness(m):
    r = gauss_laguerre_rule(m)
    raw = r.weights * np.exp(-r.nodes)
    for j in range(min(r.exactness_degree, 60) + 1):
        assert abs(np.sum(raw * r.nodes**j) - math.factorial(j)) <= 1e-12 * math.factorial(j) * max(1, j)


def test_rule_invariants_and_reference():
    r = gauss_laguerre_rule(30)
    assert np.all(np.diff(r.nodes) > 0) and np.all(r.nodes > 0)
    assert np.all(r.weights > 0)
    ref_x, ref_w = np.polynomial.laguerre.laggauss(30)
    assert np.allclose(r.nodes, ref_x, rtol=1e-13)
    assert np.allclose(r.raw_weights, ref_w, rtol=1e-10, atol=1e-300)


def test_rule_rejects_zero():
    with pytest.raises(ValueError):
        gauss_laguerre_rule(0)


def test_rule_is_immutable():
    r = gauss_laguerre_rule(4)
    with pytest.raises(ValueError):
        r.nodes[0] = 3.0


# -- analyze ---------------------------------------------------------------


def test_analyze_basis_element():
    c = analyze(basis_function(3), 8, RULE64)
    expected = np.zeros(8)
    expected[3] = 1.0
    assert np.max(np.abs(c.values - expected)) < 1e-10


def test_analyze_exponential():
    c = analyze(expdecay(0.5), 12, RULE64)
    assert c[0] == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(c.values[1:])) < 1e-12


def test_analyze_2d_basis():
    c = analyze(basis_function((1, 2)), (4, 4), RULE64)
    expected = np.zeros((4, 4))
    expected[1, 2] = 1.0
    assert np.max(np.abs(c.values - expected)) < 1e-10


def test_analyze_aliasing_guard():
    with pytest.raises(AliasingError):
        analyze(basis_function(0), 10, gauss_laguerre_rule(8))


def test_analyze_threads_same_result():
    f = gaussian(2)
    r = gauss_laguerre_rule(24)
    serial = analyze(f, (10, 10), r)
    threaded = analyze(f, (10, 10), r, threads=4)
    assert np.array_equal(serial.values, threaded.values)


def test_analyze_samples_matches():
    r = gauss_laguerre_rule(20)
    pts, _ = tensor_nodes(r, 2)
    f = gaussian(2)
    a = analyze_samples(f(pts), (6, 6), r)
    assert np.array_equal(a.values, analyze(f, (6, 6), r).values)


def test_gaussian_coefficients_against_direct_quadrature():
    # independent route: adaptive scipy quadrature on a truncated interval
    from scipy.integrate import quad

    c = analyze(gaussian(1), 10, gauss_laguerre_rule(100))
    for n in range(10):
        ref, _ = quad(lambda x: math.exp(-x * x) * laguerre_fn(n, x), 0, 12, epsabs=1e-13)
        assert abs(c[n] - ref) < 1e-8


# -- synthesize ------------------------------------------------------------


def test_synthesize_examples():
    assert synthesize(CoefficientTensor.unit(0, 1), [0.0]) == 1.0
    c = CoefficientTensor(np.array([1.0, -1.0]))
    assert synthesize(c, [0.0]) == 0.0


def test_synthesize_reproduces_basis():
    c = analyze(basis_function(5), 8, RULE64)
    xs = np.linspace(0, 20, 50)[:, None]
    assert np.max(np.abs(synthesize(c, xs) - laguerre_fn(5, xs[:, 0]))) < 1e-9


def test_synthesize_2d_matches_loop():
    rng = np.random.default_rng(3)
    c = CoefficientTensor(rng.normal(size=(3, 4)))
    x = np.array([0.6, 2.5])
    ref = sum(
        c.values[i, j] * laguerre_fn(i, x[0]) * laguerre_fn(j, x[1]) for i in range(3) for j in range(4)
    )
    assert synthesize(c, x) == pytest.approx(ref, rel=1e-13)


def test_synthesize_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        synthesize(CoefficientTensor.zeros((2, 2)), [0.5])


@pytest.mark.parametrize("bounds", [(16,), (6, 5), (3, 3, 4)])
def test_round_trip_identity(bounds):
    rng = np.random.default_rng(sum(bounds))
    c = CoefficientTensor(rng.normal(size=bounds))
    r = gauss_laguerre_rule(32 if len(bounds) < 3 else 16)
    back = analyze(series_function(c), bounds, r)
    assert np.max(np.abs(back.values - c.values)) < 1e-8


def test_parseval():
    rng = np.random.default_rng(7)
    for bounds in [(10,), (5, 6)]:
        c = CoefficientTensor(rng.normal(size=bounds))
        f = series_function(c)
        energy = integrate(FunctionHandle(lambda p: f.evaluator(p) ** 2, f.dims), gauss_laguerre_rule(32))
        a = analyze(f, bounds, gauss_laguerre_rule(32))
        assert abs(np.sum(a.values**2) - energy) < 1e-8


# -- coefficient tensor ----------------------------------------------------


def test_tensor_indexing_bijection():
    c = CoefficientTensor(np.arange(24.0).reshape(2, 3, 4))
    for off in range(24):
        n = c.multi_index(off)
        assert c.offset(n) == off
        assert c[n] == off


def test_tensor_rejects_nonfinite():
    with pytest.raises(ValueError):
        CoefficientTensor(np.array([1.0, np.nan]))


def test_tensor_json_bit_exact():
    rng = np.random.default_rng(11)
    c = CoefficientTensor(rng.normal(size=(3, 5)) * 10.0 ** rng.integers(-200, 200, size=(3, 5)))
    text = json.dumps(c.to_dict())
    back = CoefficientTensor.from_dict(json.loads(text))
    assert back.degree_bounds == c.degree_bounds
    assert np.array_equal(back.values, c.values)
    assert json.loads(text)["values"] == [float(v) for v in c.values.ravel()]


def test_tensor_from_dict_errors():
    with pytest.raises(ValueError):
        CoefficientTensor.from_dict({"dims": 2, "degree_bounds": [3], "values": [1, 2, 3]})
    with pytest.raises(ValueError):
        CoefficientTensor.from_dict({"dims": 1, "degree_bounds": [3], "values": [1, 2]})


def test_tensor_arithmetic_pads():
    a = CoefficientTensor(np.array([1.0, 2.0]))
    b = CoefficientTensor(np.array([1.0, 1.0, 1.0]))
    assert (a + b).values.tolist() == [2.0, 3.0, 1.0]
    assert (2 * a - b).values.tolist() == [1.0, 3.0, -1.0]


def test_pairing_is_coefficient_dot_product():
    rng = np.random.default_rng(5)
    b = CoefficientTensor(np.arange(1.0, 9.0))  # slowly increasing "distribution"
    f = series_function(CoefficientTensor(rng.normal(size=6)))
    a = analyze(f, 8, RULE64)
    assert pairing(b, a) == pytest.approx(float(np.dot(b.values, a.values)))


# -- seminorms -------------------------------------------------------------


@pytest.mark.parametrize("d,k", [(1, 0), (1, 3), (2, 2), (3, 1)])
def test_sequence_seminorm_unit_zero(d, k):
    c = CoefficientTensor.unit((0,) * d, (3,) * d)
    assert seminorm_sequence(c, k) == pytest.approx(0.5 ** (2 * k * d))


def test_sequence_seminorm_examples():
    assert seminorm_sequence(CoefficientTensor.zeros((4, 4)), 2) == 0.0
    assert seminorm_sequence(CoefficientTensor.unit((2, 1), (4, 4)), 1) == pytest.approx(14.0625)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 10), st.integers(1, 6), st.integers(0, 4), st.integers(0, 10**6))
def test_sequence_seminorm_monotone_in_bounds(small, extra, k, seed):
    rng = np.random.default_rng(seed)
    big = CoefficientTensor(rng.normal(size=small + extra))
    assert seminorm_sequence(big.truncate(small), k) <= seminorm_sequence(big, k)


def test_schwartz_seminorm_l0():
    grid = np.linspace(0, 20, 201)[:, None]
    assert schwartz_seminorm(basis_function(0), 0, 0, grid) == 1.0


def test_schwartz_seminorm_zero():
    assert schwartz_seminorm(zero_function(1), 2, 2, np.linspace(0, 5, 11)[:, None]) == 0.0


def test_schwartz_seminorm_dense_grid_oracle():
    dense = np.linspace(0, 40, 100_000)
    l1 = laguerre_fn(1, dense)
    oracle = max(np.max(np.abs(l1)), np.max(np.abs(dense * l1)))
    value = schwartz_seminorm(basis_function(1), 1, 0, np.linspace(0, 40, 801)[:, None])
    assert value <= oracle + 1e-12
    assert value == pytest.approx(oracle, rel=1e-4)


def test_boundary_derivative_uses_forward_stencil():
    from lagorth._fd import partial_derivative

    f = FunctionHandle(lambda p: np.where(p[:, 0] < 0, np.nan, np.exp(-p[:, 0] / 2)), 1)
    d = partial_derivative(f, np.array([[0.0], [1e-3]]), (1,), orthant=True)
    assert np.all(np.isfinite(d))
    assert d[0] == pytest.approx(-0.5, rel=1e-8)
    # |p| <= 1 includes p = 0, whose sup is l_0(0) = 1
    assert schwartz_seminorm(f, 0, 1, np.linspace(0, 10, 101)[:, None]) == 1.0


def test_schwartz_seminorm_empty_grid():
    with pytest.raises(ValueError):
        schwartz_seminorm(basis_function(0), 0, 0, np.empty((0, 1)))


# -- decay report ----------------------------------------------------------


@pytest.mark.parametrize("n", [0, 3, 15])
def test_basis_elements_are_rapid(n):
    assert decay_report(CoefficientTensor.unit(n, 16)).classification == "rapid"


def test_all_ones_is_slow():
    rep = decay_report(CoefficientTensor(np.ones(16)))
    assert rep.classification == "slow"
    # in s': the k = -1 weighted sum is finite and small relative to the unweighted one
    assert rep.sums[-1] < rep.sums[0]


def test_factorial_is_divergent():
    c = CoefficientTensor(np.array([math.factorial(n + 1) for n in range(16)], dtype=float))
    assert decay_report(c).classification == "divergent"


def test_zero_tensor_sentinel():
    rep = decay_report(CoefficientTensor.zeros(8))
    assert rep.classification == "rapid" and rep.exponent == -math.inf


def test_smooth_function_coefficients_are_rapid():
    c = analyze(gaussian(1), 40, gauss_laguerre_rule(120))
    assert decay_report(c).classification == "rapid"


def test_polynomial_growth_is_slow():
    c = CoefficientTensor((np.arange(20) + 1.0) ** 2)
    rep = decay_report(c)
    assert rep.classification == "slow"
    assert rep.exponent == pytest.approx(2.0, abs=1e-9)


def test_decay_report_k_max_validation():
    with pytest.raises(ValueError):
        decay_report(CoefficientTensor.zeros(4), k_max=0)


def test_decay_sums_nondecreasing_in_truncation():
    c = CoefficientTensor(np.ones(20))
    for k in range(0, 5):
        vals = [decay_report(c.truncate(b)).sums[k] for b in range(1, 21)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))
