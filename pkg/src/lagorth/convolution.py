"""Convolution on the orthant computed on Laguerre coefficients.

From ``ℒ_n(x+y) = sum_{k<=n} ℒ_{n-k}(x) ℒ_k(y) - sum_{k<=n-1} ℒ_{n-1-k}(x) ℒ_k(y)``
per axis, the coefficients of ``f * g`` are an inclusion-exclusion over unit
shifts of the discrete (Cauchy) convolution of the coefficient arrays.
"""

from __future__ import annotations

from itertools import product

import numpy as np
from scipy.signal import convolve

from .core import DimensionMismatchError
from .transform import CoefficientTensor, FunctionHandle

__all__ = ["convolve_coeff", "convolve_direct", "convolution_function"]


def _cauchy(a: np.ndarray, b: np.ndarray, bounds) -> np.ndarray:
    full = convolve(a, b, mode="full", method="direct")
    return full[tuple(slice(0, n) for n in bounds)]


def convolve_coeff(a: CoefficientTensor, b: CoefficientTensor) -> CoefficientTensor:
    """Laguerre coefficients of ``f * g`` from those of ``f`` and ``g``.

    ``c_n = sum_{e in {0,1}^d} (-1)^|e| sum_{k <= n-e} a_{n-e-k} b_k`` with
    out-of-range indices contributing zero. The output bounds are the
    componentwise minimum of the input bounds; every output entry depends
    only on inputs with index ``<= n`` and is therefore exact.
    ``meta["exact_bounds"]`` records that region.
    """
    if a.dims != b.dims:
        raise DimensionMismatchError(f"cannot convolve {a.dims}-d with {b.dims}-d coefficients")
    bounds = tuple(min(x, y) for x, y in zip(a.degree_bounds, b.degree_bounds))
    av = a.values[tuple(slice(0, n) for n in bounds)]
    bv = b.values[tuple(slice(0, n) for n in bounds)]
    cauchy = _cauchy(av, bv, bounds)

    out = np.zeros(bounds)
    for eps in product((0, 1), repeat=a.dims):
        shifted = np.zeros(bounds)
        dst = tuple(slice(e, n) for e, n in zip(eps, bounds))
        src = tuple(slice(0, n - e) for e, n in zip(eps, bounds))
        shifted[dst] = cauchy[src]
        out += (-1) ** sum(eps) * shifted
    return CoefficientTensor(out, meta={"exact_bounds": list(bounds)})


def convolve_direct(f: FunctionHandle, g: FunctionHandle, t, order: int = 32):
    """``(f * g)(t) = ∫_{0<=x<=t} f(x) g(t-x) dx`` by tensor Gauss-Legendre on the box.

    ``t`` is one point or a batch ``(N, d)``. Oracle quality only: ``order``
    nodes per axis integrate polynomial integrands of degree ``2*order-1``
    exactly.
    """
    if f.dims != g.dims:
        raise DimensionMismatchError("f and g have different dimension")
    d = f.dims
    pts = np.asarray(t, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[-1] != d:
        raise DimensionMismatchError(f"points of shape {pts.shape} for a {d}-d convolution")
    if np.any(pts < 0):
        raise ValueError("convolution is evaluated on the closed orthant only")

    u, w = np.polynomial.legendre.leggauss(order)
    u = 0.5 * (u + 1.0)
    w = 0.5 * w
    grids = np.meshgrid(*([u] * d), indexing="ij")
    unit = np.stack([gr.ravel() for gr in grids], axis=-1)  # (q^d, d) in [0,1]^d
    wgrids = np.meshgrid(*([w] * d), indexing="ij")
    wunit = np.prod(np.stack([gr.ravel() for gr in wgrids], axis=-1), axis=-1)

    x = pts[:, None, :] * unit[None, :, :]
    y = pts[:, None, :] - x
    fv = np.asarray(f(x.reshape(-1, d)), dtype=float).reshape(len(pts), -1)
    gv = np.asarray(g(y.reshape(-1, d)), dtype=float).reshape(len(pts), -1)
    vol = np.prod(pts, axis=1)
    out = vol * np.sum(wunit * fv * gv, axis=1)
    return float(out[0]) if single else out


def convolution_function(f: FunctionHandle, g: FunctionHandle, order: int = 32) -> FunctionHandle:
    """Handle for ``t ↦ (f * g)(t)`` via :func:`convolve_direct`."""
    return FunctionHandle(lambda p: convolve_direct(f, g, p, order), f.dims)
