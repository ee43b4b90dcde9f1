"""The Laguerre operator ``E = prod_i (D_i x_i D_i - x_i/4)``.

On coefficients ``E`` is diagonal with eigenvalue ``prod_i -(n_i + 1/2)``; on
functions it is applied pointwise with finite differences.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from . import _fd
from .core import DimensionMismatchError
from .transform import CoefficientTensor, FunctionHandle, QuadratureRule, tensor_nodes

__all__ = [
    "eigenvalues",
    "apply_E_coeff",
    "apply_E_pointwise",
    "E_function",
    "self_adjointness_residual",
    "default_E_step",
]


def eigenvalues(bounds) -> np.ndarray:
    """Array of shape ``bounds`` holding ``prod_i -(n_i + 1/2)``."""
    lam = np.ones(tuple(bounds))
    for axis, b in enumerate(bounds):
        shape = [1] * len(bounds)
        shape[axis] = b
        lam = lam * (-(np.arange(b) + 0.5)).reshape(shape)
    return lam


def apply_E_coeff(c: CoefficientTensor, power: int = 1) -> CoefficientTensor:
    """Coefficients of ``E^power f`` given those of ``f``."""
    if power < 1:
        raise ValueError(f"power must be >= 1, got {power}")
    return CoefficientTensor(c.values * eigenvalues(c.degree_bounds) ** power)


def default_E_step(dims: int) -> float:
    # total derivative order of E is 2*dims
    return _fd.default_step(2 * dims)


def apply_E_pointwise(f: FunctionHandle, x, *, step: float | None = None):
    """``(E f)(x)`` for points strictly inside the orthant.

    Each axis factor is ``x_i ∂_i^2 + ∂_i - x_i/4``; the d factors are applied
    together as one tensor-product 5-point stencil (axis 1 leftmost). The
    step along axis i is ``step * max(1, x_i)``, shrunk to ``x_i / 3`` near the
    boundary so the stencil stays inside.
    """
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    d = f.dims
    if pts.shape[-1] != d:
        raise DimensionMismatchError(f"points of shape {pts.shape} for a {d}-d function")
    if np.any(pts <= 0):
        raise ValueError("apply_E_pointwise needs points strictly inside the orthant")
    h0 = default_E_step(d) if step is None else step
    h = np.minimum(h0 * np.maximum(1.0, pts), pts / 3.0)

    offs, w2 = _fd.central_stencil(2)
    _, w1 = _fd.central_stencil(1)
    w0 = (offs == 0).astype(float)
    # per-axis factor weights, shape (N, len(offs)): x w2/h^2 + w1/h - x/4 w0
    factors = [
        pts[:, [i]] * w2 / h[:, [i]] ** 2 + w1 / h[:, [i]] - pts[:, [i]] / 4.0 * w0
        for i in range(d)
    ]
    total = np.zeros(len(pts))
    for combo in product(range(len(offs)), repeat=d):
        weight = np.ones(len(pts))
        for i, j in enumerate(combo):
            weight = weight * factors[i][:, j]
        shift = offs[list(combo)] * h
        total += weight * np.asarray(f(pts + shift), dtype=float)
    return float(total[0]) if single else total


def E_function(f: FunctionHandle, *, step: float | None = None) -> FunctionHandle:
    """Handle for ``E f`` evaluated with :func:`apply_E_pointwise`."""
    return FunctionHandle(lambda p: apply_E_pointwise(f, p, step=step), f.dims)


def self_adjointness_residual(f: FunctionHandle, g: FunctionHandle, rule: QuadratureRule) -> float:
    """``|⟨Ef, g⟩ - ⟨f, Eg⟩|`` with inner products by the tensor quadrature rule."""
    if f.dims != g.dims:
        raise DimensionMismatchError("f and g have different dimension")
    pts, w = tensor_nodes(rule, f.dims)
    fv = np.asarray(f(pts), dtype=float)
    gv = np.asarray(g(pts), dtype=float)
    efv = apply_E_pointwise(f, pts)
    egv = efv if g is f else apply_E_pointwise(g, pts)
    return abs(float(np.sum(w * efv * gv)) - float(np.sum(w * fv * egv)))
