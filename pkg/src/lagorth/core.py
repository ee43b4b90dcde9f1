"""Laguerre polynomials and Laguerre functions on the half line and the orthant.

The Laguerre functions are ``ℒ_n(x) = L_n(x) exp(-x/2)``. Everything here is
evaluated by three-term recurrences. The weighted functions are recursed on
directly, so ``L_n(x)`` itself is never formed for the ``ℒ_n`` family and no
overflow occurs at large ``x`` or ``n``.

Inputs may be Python scalars, float arrays, or object arrays of
``mpmath.mpf``; the last case runs the same recurrences in arbitrary
precision, which the finite-difference oracles rely on.
"""

from __future__ import annotations

from math import comb
from typing import Sequence

import mpmath
import numpy as np

__all__ = [
    "DimensionMismatchError",
    "as_multi_index",
    "multi_index_leq",
    "exp",
    "laguerre_poly",
    "laguerre1_poly",
    "laguerre_fn",
    "laguerre_fn_table",
    "laguerre_fn_deriv",
    "laguerre_fn_deriv_table",
    "laguerre_fn_multi",
]

# ℒ_0 = exp(-x/2) underflows past this; beyond it the recurrence carries a log scale.
_UNDERFLOW_X = 1400.0
_RESCALE_AT = 2.0**400


class DimensionMismatchError(ValueError):
    """Raised when multi-indices, points or tensors disagree on dimension."""


def as_multi_index(n, dims: int | None = None) -> tuple[int, ...]:
    """Normalize an int or a sequence of ints to a multi-index tuple.

    A bare int is broadcast to ``dims`` entries (or a 1-tuple when ``dims``
    is None).
    """
    if np.ndim(n) == 0:
        entries = (int(n),) * (dims if dims is not None else 1)
    else:
        entries = tuple(int(v) for v in n)
    if len(entries) < 1:
        raise ValueError("multi-index must have at least one entry")
    if any(v < 0 for v in entries):
        raise ValueError(f"multi-index entries must be nonnegative, got {entries}")
    if dims is not None and len(entries) != dims:
        raise DimensionMismatchError(
            f"multi-index {entries} has dimension {len(entries)}, expected {dims}"
        )
    return entries


def multi_index_leq(k: Sequence[int], n: Sequence[int]) -> bool:
    """Componentwise partial order ``k <= n``."""
    if len(k) != len(n):
        raise DimensionMismatchError("multi-indices of different dimension")
    return all(a <= b for a, b in zip(k, n))


def _is_mp(x) -> bool:
    return isinstance(x, mpmath.mpf) or (isinstance(x, np.ndarray) and x.dtype == object)


_mp_exp = np.frompyfunc(mpmath.exp, 1, 1)


def exp(x):
    """``exp`` that also accepts mpmath scalars and object arrays."""
    if isinstance(x, mpmath.mpf):
        return mpmath.exp(x)
    if isinstance(x, np.ndarray) and x.dtype == object:
        return _mp_exp(x)
    return np.exp(x)


def _asarray(x):
    if _is_mp(x):
        return np.asarray(x, dtype=object)
    return np.asarray(x, dtype=float)


def _unwrap(values, like):
    if np.ndim(like) == 0 and not isinstance(like, np.ndarray):
        return values[()] if isinstance(values, np.ndarray) else values
    return values


def _poly_recurrence(n: int, alpha: int, x):
    x = _asarray(x)
    prev = np.zeros_like(x) if x.dtype != object else x * 0
    cur = np.ones_like(x) if x.dtype != object else x * 0 + 1
    for k in range(n):
        prev, cur = cur, ((2 * k + 1 + alpha - x) * cur - (k + alpha) * prev) / (k + 1)
    return cur


def laguerre_poly(n: int, x):
    """Laguerre polynomial ``L_n(x)``.

    Uses ``(k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}`` with ``L_0 = 1``.
    Defined for every finite real ``x``.
    """
    if n < 0:
        raise ValueError("degree must be nonnegative")
    return _unwrap(_poly_recurrence(n, 0, x), x)


def laguerre1_poly(n: int, x):
    """Generalized Laguerre polynomial of order one, ``L^1_n(x)``.

    Equals ``sum_k binom(n+1, n-k) (-x)^k / k!``.
    """
    if n < 0:
        raise ValueError("degree must be nonnegative")
    return _unwrap(_poly_recurrence(n, 1, x), x)


def _weighted_table(nmax: int, alpha: int, x):
    """Rows ``e^{-x/2} L^{(alpha)}_k(x)`` for ``k = 0..nmax``, shape ``(nmax+1,) + x.shape``."""
    x = _asarray(x)
    if x.dtype == object:
        out = np.empty((nmax + 1,) + x.shape, dtype=object)
        prev = x * 0
        cur = exp(-x / 2)
        out[0] = cur
        for k in range(nmax):
            prev, cur = cur, ((2 * k + 1 + alpha - x) * cur - (k + alpha) * prev) / (k + 1)
            out[k + 1] = cur
        return out

    out = np.empty((nmax + 1,) + x.shape)
    far = x > _UNDERFLOW_X
    log_scale = np.where(far, -0.5 * x, 0.0)
    prev = np.zeros_like(x)
    cur = np.where(far, 1.0, np.exp(-0.5 * np.where(far, 0.0, x)))
    out[0] = cur if not far.any() else cur * np.exp(log_scale)
    rescaled = far.any()
    for k in range(nmax):
        prev, cur = cur, ((2 * k + 1 + alpha - x) * cur - (k + alpha) * prev) / (k + 1)
        big = np.abs(cur) > _RESCALE_AT
        if big.any():
            s = np.where(big, np.abs(cur), 1.0)
            cur = cur / s
            prev = prev / s
            log_scale = log_scale + np.log(s)
            rescaled = True
        out[k + 1] = cur * np.exp(log_scale) if rescaled else cur
    return out


def laguerre_fn_table(nmax: int, x):
    """All Laguerre functions ``ℒ_0..ℒ_nmax`` at ``x``; shape ``(nmax+1,) + shape(x)``."""
    if nmax < 0:
        raise ValueError("nmax must be nonnegative")
    return _weighted_table(nmax, 0, x)


def laguerre_fn(n: int, x):
    """Laguerre function ``ℒ_n(x) = L_n(x) exp(-x/2)``."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    return _unwrap(_weighted_table(n, 0, x)[n], x)


def laguerre_fn_deriv_table(nmax: int, p: int, x):
    """``(d/dx)^p ℒ_k(x)`` for ``k = 0..nmax``.

    Repeating ``d/dx ℒ^{(a)}_k = -ℒ^{(a)}_k / 2 - ℒ^{(a+1)}_{k-1}`` (weighted
    generalized Laguerre functions) gives

        D^p ℒ_n = sum_j binom(p, j) (-1/2)^(p-j) (-1)^j ℒ^{(j)}_{n-j}.
    """
    if p < 0 or nmax < 0:
        raise ValueError("order and nmax must be nonnegative")
    x = _asarray(x)
    if p == 0:
        return _weighted_table(nmax, 0, x)
    out = np.zeros((nmax + 1,) + x.shape, dtype=x.dtype)
    if x.dtype == object:
        out[...] = mpmath.mpf(0)
    half = mpmath.mpf(1) / 2 if x.dtype == object else 0.5
    for j in range(min(p, nmax) + 1):
        coef = comb(p, j) * (-half) ** (p - j) * (-1) ** j
        rows = _weighted_table(nmax - j, j, x)
        out[j:] = out[j:] + coef * rows
    return out


def laguerre_fn_deriv(n: int, p: int, x):
    """``(d/dx)^p ℒ_n(x)``, analytic."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    return _unwrap(laguerre_fn_deriv_table(n, p, x)[n], x)


def laguerre_fn_multi(n, x):
    """Product basis ``ℒ_n(x) = prod_i ℒ_{n_i}(x_i)``.

    ``x`` is a single point of shape ``(d,)`` or a batch of shape ``(..., d)``.
    """
    n = as_multi_index(n)
    pts = _asarray(x)
    if pts.ndim == 0 or pts.shape[-1] != len(n):
        raise DimensionMismatchError(
            f"index of dimension {len(n)} incompatible with point shape {pts.shape}"
        )
    result = None
    for axis, ni in enumerate(n):
        factor = _weighted_table(ni, 0, pts[..., axis])[ni]
        result = factor if result is None else result * factor
    if pts.ndim == 1:
        return result[()] if isinstance(result, np.ndarray) else result
    return result
