"""Kernels on a product orthant as Laguerre coefficient matrices.

A kernel ``K(x, y)`` with ``x`` in m variables and ``y`` in n variables has
coefficients ``b_{p,q} = ∫∫ K ℒ_p(x) ℒ_q(y)``; the operator ``f ↦ ∫ K(·, y) f(y) dy``
then acts on coefficient vectors as the matrix ``B``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DimensionMismatchError, as_multi_index
from .transform import (
    CoefficientTensor,
    FunctionHandle,
    QuadratureRule,
    analyze,
    tensor_nodes,
)

__all__ = [
    "KernelMatrix",
    "kernel_from_function",
    "kernel_apply",
    "tensor_coeff",
    "kernel_action",
]


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    """Dense matrix with x-side multi-indices as rows and y-side ones as columns.

    Both index sets are flattened row-major.
    """

    row_bounds: tuple[int, ...]
    col_bounds: tuple[int, ...]
    entries: np.ndarray

    def __post_init__(self):
        rb = as_multi_index(self.row_bounds)
        cb = as_multi_index(self.col_bounds)
        e = np.array(self.entries, dtype=float, copy=True)
        if e.size != math.prod(rb) * math.prod(cb):
            raise ValueError(
                f"{e.size} entries do not match bounds {rb} x {cb}"
            )
        if not np.all(np.isfinite(e)):
            raise ValueError("kernel entries must be finite")
        e = e.reshape(math.prod(rb), math.prod(cb))
        e.setflags(write=False)
        object.__setattr__(self, "row_bounds", rb)
        object.__setattr__(self, "col_bounds", cb)
        object.__setattr__(self, "entries", e)

    @property
    def m(self) -> int:
        return len(self.row_bounds)

    @property
    def n(self) -> int:
        return len(self.col_bounds)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "row_bounds": list(self.row_bounds),
            "col_bounds": list(self.col_bounds),
            "entries": [float(v) for v in self.entries.ravel()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "KernelMatrix":
        try:
            m, n = int(data["m"]), int(data["n"])
            rb, cb = data["row_bounds"], data["col_bounds"]
            entries = data["entries"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed kernel matrix object: {exc}") from exc
        if len(rb) != m or len(cb) != n:
            raise DimensionMismatchError("m/n disagree with the bound lists")
        return cls(tuple(rb), tuple(cb), np.asarray(entries, dtype=float))


def kernel_from_function(K: FunctionHandle, row_bounds, col_bounds,
                         rule: QuadratureRule) -> KernelMatrix:
    """Coefficient matrix of the kernel ``K`` (first ``len(row_bounds)`` variables are x)."""
    rb = as_multi_index(row_bounds)
    cb = as_multi_index(col_bounds)
    if len(rb) + len(cb) != K.dims:
        raise DimensionMismatchError(
            f"bounds describe {len(rb)}+{len(cb)} variables, kernel has {K.dims}"
        )
    coeffs = analyze(K, rb + cb, rule)
    return KernelMatrix(rb, cb, coeffs.values.reshape(math.prod(rb), math.prod(cb)))


def kernel_apply(B: KernelMatrix, a: CoefficientTensor) -> CoefficientTensor:
    """``out_p = sum_q B_{p,q} a_q``; ``a`` is zero-padded up to the column bounds."""
    if a.dims != B.n:
        raise DimensionMismatchError(f"kernel takes {B.n}-d coefficients, got {a.dims}-d")
    if any(x > y for x, y in zip(a.degree_bounds, B.col_bounds)):
        raise ValueError(
            f"coefficient bounds {a.degree_bounds} exceed kernel column bounds {B.col_bounds}"
        )
    vec = a.padded(B.col_bounds).flat()
    return CoefficientTensor((B.entries @ vec).reshape(B.row_bounds))


def tensor_coeff(u: CoefficientTensor, v: CoefficientTensor) -> KernelMatrix:
    """Matrix of ``u ⊗ v``: ``B_{p,q} = u_p v_q``."""
    return KernelMatrix(u.degree_bounds, v.degree_bounds, np.outer(u.flat(), v.flat()))


def kernel_action(K: FunctionHandle, f: FunctionHandle, rule: QuadratureRule) -> FunctionHandle:
    """Handle for ``x ↦ ∫ K(x, y) f(y) dy``, the inner integral by quadrature."""
    n = f.dims
    m = K.dims - n
    if m < 1:
        raise DimensionMismatchError("kernel must have more variables than f")
    ypts, yw = tensor_nodes(rule, n)
    fy = np.asarray(f(ypts), dtype=float)

    def ev(x):
        x = np.asarray(x, dtype=float)
        full = np.concatenate(
            [np.repeat(x, len(ypts), axis=0), np.tile(ypts, (len(x), 1))], axis=1
        )
        kv = np.asarray(K(full), dtype=float).reshape(len(x), len(ypts))
        return kv @ (yw * fy)

    return FunctionHandle(ev, m)
