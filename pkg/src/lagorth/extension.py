"""Finite-order reflection extension from the orthant to all of R^d.

Along one axis, ``g(x) = f(x)`` for ``x >= 0`` and

    g(x) = chi(x / width) * sum_k c_k f(-b_k x),    x < 0,

with ``b_k = k`` and ``sum_k c_k (-b_k)^j = 1`` for ``j < N``, so the one-sided
derivatives of order ``< N`` agree at 0. ``chi`` is a smooth cutoff equal to 1
on ``[-1/2, 0]`` and 0 below ``-1``. The d-dimensional operator applies the
1-d construction to axes 1, ..., d in turn.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _fd
from .core import DimensionMismatchError, exp
from .transform import FunctionHandle, schwartz_seminorm

__all__ = [
    "ConditioningError",
    "ExtensionWeights",
    "ExtensionQuality",
    "vandermonde_dual_solve",
    "seeley_weights",
    "cutoff",
    "extend_axis",
    "extend_1d",
    "extend_nd",
    "extension_quality",
]

MAX_ORDER = 12


class ConditioningError(ValueError):
    """Requested extension order is beyond what the weight system can resolve."""


def vandermonde_dual_solve(nodes, rhs) -> np.ndarray:
    """Solve ``sum_k z_k nodes_k^i = rhs_i`` (i = 0..n) by Björck-Pereyra elimination.

    O(n^2) and far more accurate than Gaussian elimination for ordered
    nodes. Works with any field type supporting ``+ - * /`` (e.g. Fraction).
    """
    x = list(nodes)
    b = list(rhs)
    n = len(x) - 1
    if len(b) != len(x):
        raise ValueError("nodes and right-hand side differ in length")
    if len(set(x)) != len(x):
        raise ValueError("Vandermonde nodes must be distinct")
    for k in range(n):
        for i in range(n, k, -1):
            b[i] = b[i] - x[k] * b[i - 1]
    for k in range(n - 1, -1, -1):
        for i in range(k + 1, n + 1):
            b[i] = b[i] / (x[i] - x[i - k - 1])
        for i in range(k, n):
            b[i] = b[i] - b[i + 1]
    if all(isinstance(v, (int, float, np.integer, np.floating)) for v in [*x, *rhs]):
        return np.array(b, dtype=float)
    return b


@dataclass(frozen=True)
class ExtensionWeights:
    order: int
    scales: tuple[float, ...]
    coefficients: tuple[float, ...]
    cutoff_width: float = 1.0

    def __post_init__(self):
        if len(self.scales) != self.order or len(self.coefficients) != self.order:
            raise ValueError("need one scale and one coefficient per order")
        if any(b2 <= b1 for b1, b2 in zip(self.scales, self.scales[1:])) or self.scales[0] <= 0:
            raise ValueError("reflection scales must be positive and strictly increasing")
        if self.cutoff_width <= 0:
            raise ValueError("cutoff width must be positive")

    def residuals(self) -> np.ndarray:
        """``sum_k c_k (-b_k)^j - 1`` for ``j = 0..N-1``."""
        b = -np.asarray(self.scales, dtype=float)
        c = np.asarray(self.coefficients, dtype=float)
        return np.array([np.dot(c, b**j) - 1.0 for j in range(self.order)])


def seeley_weights(N: int, cutoff_width: float = 1.0) -> ExtensionWeights:
    """Reflection weights matching derivatives of order ``< N`` (``b_k = k``)."""
    if not 1 <= N <= MAX_ORDER:
        raise ConditioningError(
            f"order {N} outside 1..{MAX_ORDER}: the reflection Vandermonde system "
            "is too ill-conditioned beyond that"
        )
    scales = tuple(float(k) for k in range(1, N + 1))
    c = vandermonde_dual_solve([-s for s in scales], [1.0] * N)
    w = ExtensionWeights(N, scales, tuple(float(v) for v in c), float(cutoff_width))
    if np.max(np.abs(w.residuals())) >= 1e-8:
        raise ConditioningError(f"weight residual {np.max(np.abs(w.residuals())):.3g} too large")
    return w


def _psi(t):
    return exp(-1 / t)


def cutoff(u):
    """Smooth cutoff: 1 for ``u >= -1/2``, 0 for ``u <= -1``, C-infinity in between."""
    u = np.asarray(u) if not isinstance(u, np.ndarray) else u
    obj = u.dtype == object
    out = np.empty(u.shape, dtype=object if obj else float)
    upper = np.asarray(u >= -0.5, dtype=bool)
    lower = np.asarray(u <= -1.0, dtype=bool)
    mid = ~(upper | lower)
    out[upper] = 1
    out[lower] = 0
    if mid.any():
        s = 2 * u[mid] + 2
        a = _psi(s)
        out[mid] = a / (a + _psi(1 - s))
    return out


def extend_axis(h: FunctionHandle, axis: int, w: ExtensionWeights, *, final: bool = True) -> FunctionHandle:
    """Extend ``h`` across the hyperplane ``x_axis = 0``."""
    scales = w.scales
    coefs = w.coefficients
    width = w.cutoff_width

    def ev(p):
        obj = p.dtype == object
        out = np.empty(len(p), dtype=object if obj else float)
        neg = np.asarray(p[:, axis] < 0, dtype=bool)
        if (~neg).any():
            out[~neg] = h.evaluator(p[~neg])
        if neg.any():
            q = p[neg]
            chi = cutoff(q[:, axis] / width)
            vals = np.zeros(len(q), dtype=out.dtype)
            live = np.asarray(chi != 0, dtype=bool)
            if live.any():
                ql = q[live]
                s = ql[:, axis]
                acc = None
                for b, c in zip(scales, coefs):
                    r = ql.copy()
                    r[:, axis] = -b * s
                    term = c * h.evaluator(r)
                    acc = term if acc is None else acc + term
                vals[live] = chi[live] * acc
            out[neg] = vals
        return out

    return FunctionHandle(ev, h.dims, "full" if final else h.domain)


def extend_1d(f: FunctionHandle, w: ExtensionWeights) -> FunctionHandle:
    if f.dims != 1:
        raise DimensionMismatchError("extend_1d takes a function of one variable")
    return extend_axis(f, 0, w)


def extend_nd(f: FunctionHandle, w: ExtensionWeights) -> FunctionHandle:
    """Axis-by-axis extension, axis 1 first; the restriction to the orthant is ``f``."""
    g = f
    for axis in range(f.dims):
        g = extend_axis(g, axis, w, final=axis == f.dims - 1)
    return g


@dataclass(frozen=True)
class ExtensionQuality:
    """``mismatches[j]``: max over boundary points of ``|∂^j g(0-) - ∂^j f(0+)|``."""

    mismatches: np.ndarray
    seminorms: dict
    orthant_seminorms: dict
    growth_factor: float
    high_precision: bool


def _boundary_points(grid: np.ndarray, dims: int, limit: int = 16):
    if dims == 1:
        return [(np.zeros(1), 0)]
    inside = grid[np.all(grid >= 0, axis=1)]
    found = []
    for axis in range(dims):
        pts = inside.copy()
        pts[:, axis] = 0.0
        uniq = np.unique(pts, axis=0)
        if len(uniq) > limit:
            uniq = uniq[np.linspace(0, len(uniq) - 1, limit).astype(int)]
        found.extend((p, axis) for p in uniq)
    return found


def extension_quality(f: FunctionHandle, g: FunctionHandle, order: int, grid, *,
                      boundary=None, seminorm_orders=(2, 2), dps: int = 60) -> ExtensionQuality:
    """Derivative mismatch across the boundary and full-space seminorms of ``g``.

    One-sided derivatives use high-precision finite differences when the
    handles accept mpmath input. ``boundary`` is a list of ``(point, axis)``
    pairs; by default it is derived from ``grid``.
    """
    pts = np.atleast_2d(np.asarray(grid, dtype=float))
    if pts.shape[-1] != f.dims or g.dims != f.dims:
        raise DimensionMismatchError("grid, f and g must share a dimension")
    if boundary is None:
        boundary = _boundary_points(pts, f.dims)
    mism = np.zeros(order + 1)
    high = True
    for point, axis in boundary:
        left, hp_l = _fd.one_sided_derivatives(g, point, axis, order, -1, dps=dps)
        right, hp_r = _fd.one_sided_derivatives(f, point, axis, order, +1, dps=dps)
        high = high and hp_l and hp_r
        mism = np.maximum(mism, np.abs(left - right))

    j, l = seminorm_orders
    semi = {(j, l): schwartz_seminorm(g, j, l, pts)}
    inside = pts[np.all(pts >= 0, axis=1)]
    fsemi = {(j, l): schwartz_seminorm(f, j, l, inside)} if len(inside) else {}
    base = fsemi.get((j, l), 0.0)
    growth = semi[(j, l)] / base if base > 0 else float("inf") if semi[(j, l)] > 0 else 1.0
    return ExtensionQuality(mism, semi, fsemi, growth, high)
