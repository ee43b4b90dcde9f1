"""Finite-difference machinery shared by the operator, seminorm and extension code."""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import product

import mpmath
import numpy as np

EPS = np.finfo(float).eps

# accuracy order of every stencil built here
ORDER = 4


def fornberg_weights(offsets, p: int, zero=0.0, one=1.0):
    """Weights ``w`` with ``sum_i w_i f(x0 + offsets_i) ≈ f^(p)(x0)`` for unit spacing.

    Fornberg's recursion; works for float or mpmath arithmetic via ``zero``/``one``.
    """
    n = len(offsets)
    if p >= n:
        raise ValueError("need more stencil points than the derivative order")
    c = [[[zero] * n for _ in range(n)] for _ in range(p + 1)]
    c[0][0][0] = one
    c1 = one
    c4 = offsets[0]
    for i in range(1, n):
        mn = min(i, p)
        c2 = one
        c5 = c4
        c4 = offsets[i]
        for j in range(i):
            c3 = offsets[i] - offsets[j]
            c2 = c2 * c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[k][i][i] = c1 * (k * c[k - 1][i - 1][i - 1] - c5 * c[k][i - 1][i - 1]) / c2
                c[0][i][i] = -c1 * c5 * c[0][i - 1][i - 1] / c2
            for k in range(mn, 0, -1):
                c[k][i][j] = (c4 * c[k][i - 1][j] - k * c[k - 1][i - 1][j]) / c3
            c[0][i][j] = c4 * c[0][i - 1][j] / c3
        c1 = c2
    return [c[p][n - 1][j] for j in range(n)]


@lru_cache(maxsize=None)
def central_stencil(p: int) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric stencil of accuracy ``ORDER`` for the ``p``-th derivative."""
    if p == 0:
        return np.array([0.0]), np.array([1.0])
    r = (p - 1) // 2 + ORDER // 2
    offs = np.arange(-r, r + 1, dtype=float)
    return offs, np.array(fornberg_weights(list(offs), p))


@lru_cache(maxsize=None)
def one_sided_stencil(p: int, direction: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Stencil on ``0, direction, 2*direction, ...`` of accuracy ``ORDER``."""
    if p == 0:
        return np.array([0.0]), np.array([1.0])
    offs = direction * np.arange(p + ORDER, dtype=float)
    return offs, np.array(fornberg_weights(list(offs), p))


def default_step(total_order: int) -> float:
    """Step balancing ``h^ORDER`` truncation against ``eps / h^total_order`` roundoff."""
    return EPS ** (1.0 / (total_order + ORDER))


def partial_derivative(func, points, p, *, orthant: bool = False, base_step: float | None = None):
    """Mixed partial ``D^p func`` at each row of ``points`` (shape ``(N, d)``).

    The d-dimensional stencil is the tensor product of 1-d stencils. When
    ``orthant`` is set, an axis whose central stencil would leave the closed
    orthant switches to a forward stencil. Steps are
    ``base_step * max(1, |x_i|)``.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    npts, d = pts.shape
    p = tuple(int(v) for v in p)
    if len(p) != d:
        raise ValueError("derivative order dimension does not match points")
    if sum(p) == 0:
        return np.asarray(func(pts), dtype=float)
    h0 = default_step(sum(p)) if base_step is None else base_step
    steps = h0 * np.maximum(1.0, np.abs(pts))

    # per axis: 0 = central, 1 = forward
    kinds = np.zeros((npts, d), dtype=int)
    if orthant:
        for i in range(d):
            if p[i] > 0:
                reach = central_stencil(p[i])[0].max()
                kinds[:, i] = pts[:, i] - reach * steps[:, i] < 0
    out = np.empty(npts)
    for pattern in {tuple(row) for row in kinds}:
        sel = np.all(kinds == pattern, axis=1)
        stencils = [
            one_sided_stencil(p[i]) if pattern[i] else central_stencil(p[i]) for i in range(d)
        ]
        sub = pts[sel]
        h = steps[sel]
        total = np.zeros(len(sub))
        for combo in product(*(range(len(s[0])) for s in stencils)):
            shift = np.array([stencils[i][0][combo[i]] for i in range(d)])
            weight = np.prod([stencils[i][1][combo[i]] for i in range(d)])
            total += weight * np.asarray(func(sub + shift * h), dtype=float)
        out[sel] = total / np.prod(h ** np.array(p), axis=1)
    return out


def one_sided_derivatives(func, point, axis: int, max_order: int, side: int, *,
                          dps: int = 60, step: str = "1e-6"):
    """One-sided derivatives of orders ``0..max_order`` along ``axis`` at ``point``.

    ``side = -1`` samples ``point - k h e_axis`` (left limit), ``+1`` the right.
    The stencil is evaluated with ``dps`` digits beyond those lost to cancellation, which requires
    ``func`` to accept object arrays of ``mpmath.mpf``; if it does not, the
    computation falls back to float64 with an order-dependent step (much less
    accurate for high orders). Returns ``(derivatives, high_precision_used)``.
    """
    point = [float(v) for v in point]
    d = len(point)
    # the order-p stencil cancels about p*|log10 h| digits; keep dps on top of that
    lost = int(math.ceil(max_order * -math.log10(float(step))))
    with mpmath.workdps(dps + max(lost, 0)):
        h = mpmath.mpf(step)
        npts = max_order + ORDER + 4
        offsets = [mpmath.mpf(side * k) for k in range(npts)]
        rows = np.empty((npts, d), dtype=object)
        for k in range(npts):
            for i in range(d):
                rows[k, i] = mpmath.mpf(point[i])
            rows[k, axis] = rows[k, axis] + offsets[k] * h
        try:
            vals = np.asarray(func(rows), dtype=object).reshape(npts)
            vals = [mpmath.mpf(v) for v in vals]
        except (TypeError, AttributeError):
            vals = None
        if vals is not None:
            derivs = []
            for order in range(max_order + 1):
                w = fornberg_weights(offsets, order, mpmath.mpf(0), mpmath.mpf(1))
                derivs.append(float(mpmath.fsum(wi * vi for wi, vi in zip(w, vals)) / h**order))
            return np.array(derivs), True

    derivs = []
    for order in range(max_order + 1):
        offs, w = one_sided_stencil(order, side)
        hf = default_step(order) * max(1.0, abs(point[axis]))
        rows = np.tile(np.asarray(point, dtype=float), (len(offs), 1))
        rows[:, axis] += offs * hf
        derivs.append(float(np.dot(w, np.asarray(func(rows), dtype=float)) / hf**order))
    return np.array(derivs), False
