import numpy as np
import pytest

from lagorth.operators import (
    E_function,
    apply_E_coeff,
    apply_E_pointwise,
    eigenvalues,
    self_adjointness_residual,
)
from lagorth.transform import (
    CoefficientTensor,
    analyze,
    basis_function,
    gauss_laguerre_rule,
    series_function,
    synthesize,
    zero_function,
)

RULE = gauss_laguerre_rule(32)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_coeff_eigenvalue_at_origin(d):
    out = apply_E_coeff(CoefficientTensor.unit((0,) * d, (2,) * d))
    assert out[(0,) * d] == (-0.5) ** d


def test_coeff_eigenvalue_2d():
    out = apply_E_coeff(CoefficientTensor.unit((2, 1), (3, 3)))
    assert out[(2, 1)] == 3.75


def test_coeff_power_composes():
    rng = np.random.default_rng(0)
    c = CoefficientTensor(rng.normal(size=(4, 5)))
    assert np.allclose(apply_E_coeff(c, 2).values, apply_E_coeff(apply_E_coeff(c)).values, rtol=1e-15)


def test_coeff_power_validation():
    with pytest.raises(ValueError):
        apply_E_coeff(CoefficientTensor.zeros(3), 0)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_eigenvalue_sign(d):
    lam = eigenvalues((4,) * d)
    assert np.all(np.sign(lam) == (-1) ** d)


def test_spectrum_monotone_per_axis():
    lam = np.abs(eigenvalues((6, 6)))
    assert np.all(np.diff(lam, axis=0) > 0) and np.all(np.diff(lam, axis=1) > 0)


@pytest.mark.parametrize("n", range(9))
def test_pointwise_eigenfunction_1d(n):
    x = np.linspace(0.5, 10, 30)[:, None]
    f = basis_function(n)
    fx = f(x)
    err = np.abs(apply_E_pointwise(f, x) + (n + 0.5) * fx) / np.maximum(1.0, np.abs(fx))
    assert err.max() < 1e-4


def test_pointwise_zero():
    assert apply_E_pointwise(zero_function(1), [2.0]) == 0.0


def test_pointwise_2d_example():
    f = basis_function((1, 1))
    x = np.array([1.0, 1.0])
    assert abs(apply_E_pointwise(f, x) - 2.25 * f(x)) < 1e-4
    # (1,1) sits on the zero of l_1; check a generic point too
    x = np.array([2.7, 0.6])
    assert abs(apply_E_pointwise(f, x) - 2.25 * f(x)) < 1e-4


def test_pointwise_rejects_boundary():
    with pytest.raises(ValueError):
        apply_E_pointwise(basis_function(1), [0.0])
    with pytest.raises(ValueError):
        apply_E_pointwise(basis_function((1, 1)), [1.0, 0.0])


def test_axis_factors_commute():
    # E1(E2 f) against E2(E1 f) using 1-d operators on each axis separately
    from lagorth.transform import FunctionHandle

    c = CoefficientTensor(np.random.default_rng(2).normal(size=(3, 3)))
    f = series_function(c)

    def axis_factor(h, axis):
        def ev(p):
            out = np.empty(len(p))
            for i, pt in enumerate(p):
                def slice_fn(q, pt=pt):
                    full = np.tile(pt, (len(q), 1))
                    full[:, axis] = q[:, 0]
                    return h.evaluator(full)
                out[i] = apply_E_pointwise(FunctionHandle(slice_fn, 1), [pt[axis]], step=1e-2)
            return out
        return FunctionHandle(ev, 2)

    pts = np.array([[1.3, 2.2], [4.0, 0.9]])
    a = axis_factor(axis_factor(f, 1), 0)(pts)
    b = axis_factor(axis_factor(f, 0), 1)(pts)
    joint = apply_E_pointwise(f, pts)
    exact = synthesize(apply_E_coeff(c), pts)
    assert np.allclose(a, b, atol=1e-6)
    assert np.allclose(a, exact, atol=1e-6)
    assert np.allclose(joint, exact, atol=1e-6)


@pytest.mark.parametrize("bounds", [(6,), (4, 3)])
def test_diagonal_pointwise_consistency(bounds):
    rng = np.random.default_rng(len(bounds))
    c = CoefficientTensor(rng.normal(size=bounds))
    lhs = analyze(E_function(series_function(c)), bounds, RULE)
    rhs = apply_E_coeff(c)
    assert np.max(np.abs(lhs.values - rhs.values)) < 1e-4


def test_self_adjoint_symmetric_case_exact():
    f = series_function(CoefficientTensor(np.array([0.3, -1.0, 2.0])))
    assert self_adjointness_residual(f, f, RULE) == 0.0


def test_self_adjoint_orthogonal_pair():
    assert self_adjointness_residual(basis_function(2), basis_function(5), RULE) < 1e-4


def test_self_adjoint_overlapping_pair():
    f = basis_function(1)
    g = basis_function(1) + basis_function(3)
    from lagorth.transform import tensor_nodes

    pts, w = tensor_nodes(RULE, 1)
    # both sides equal -1.5
    assert np.sum(w * apply_E_pointwise(f, pts) * g(pts)) == pytest.approx(-1.5, abs=1e-4)
    assert self_adjointness_residual(f, g, RULE) < 1e-4
