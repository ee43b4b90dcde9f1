"""Analysis and synthesis in the d-dimensional Laguerre basis.

A function on the open orthant is represented by a :class:`FunctionHandle`;
its expansion ``f = sum_n a_n ℒ_n`` by a :class:`CoefficientTensor`.
Coefficient tensors with slowly growing entries double as the representation
of distributions, paired with test functions through :func:`pairing`.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Callable

import numpy as np
from scipy.linalg import eigh_tridiagonal

from . import _fd
from .core import (
    DimensionMismatchError,
    as_multi_index,
    exp,
    laguerre_fn_deriv_table,
    laguerre_fn_table,
)

logger = logging.getLogger(__name__)

__all__ = [
    "AliasingError",
    "QuadratureRule",
    "CoefficientTensor",
    "FunctionHandle",
    "DecayReport",
    "gauss_laguerre_rule",
    "tensor_nodes",
    "integrate",
    "analyze",
    "synthesize",
    "pairing",
    "seminorm_sequence",
    "schwartz_seminorm",
    "decay_report",
    "basis_function",
    "series_function",
    "expdecay",
    "gaussian",
    "zero_function",
    "tensor_function",
]


class AliasingError(ValueError):
    """Quadrature rule too small for the requested degree bounds."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


# ---------------------------------------------------------------------------
# quadrature


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Gauss-Laguerre rule reweighted for plain ``dx`` integrals on ``(0, inf)``.

    ``weights`` satisfy ``sum w_i h(x_i) ≈ ∫ h dx``; ``raw_weights`` are the
    classical weights for ``∫ e^{-x} h dx``.
    """

    nodes: np.ndarray
    weights: np.ndarray
    raw_weights: np.ndarray

    def __post_init__(self):
        for name in ("nodes", "weights", "raw_weights"):
            object.__setattr__(self, name, _readonly(getattr(self, name)))
        if not (len(self.nodes) == len(self.weights) == len(self.raw_weights)):
            raise ValueError("nodes and weights must have equal length")

    @property
    def count(self) -> int:
        return len(self.nodes)

    @property
    def exactness_degree(self) -> int:
        return 2 * self.count - 1


def gauss_laguerre_rule(m: int) -> QuadratureRule:
    """m-point Gauss-Laguerre rule.

    Nodes are eigenvalues of the Jacobi matrix (diagonal ``2k+1``,
    off-diagonal ``k``), polished by one Newton step on ``ℒ_m``. Weights come
    from the Christoffel formula ``x_i / ((m+1) ℒ_{m+1}(x_i))^2``, evaluated on
    the weighted functions: for large ``m`` the eigenvector components that
    carry the classical weights underflow long before ``e^{x_i}`` overflows.
    """
    if m < 1:
        raise ValueError(f"rule size must be >= 1, got {m}")
    diag = 2.0 * np.arange(m) + 1.0
    off = np.arange(1, m, dtype=float)
    x = eigh_tridiagonal(diag, off, eigvals_only=True) if m > 1 else diag.copy()
    vals = laguerre_fn_table(m, x)
    dvals = laguerre_fn_deriv_table(m, 1, x)
    x = x - vals[m] / dvals[m]
    x = np.sort(x)
    lm1 = laguerre_fn_table(m + 1, x)[m + 1]
    weights = x / ((m + 1) * lm1) ** 2
    return QuadratureRule(nodes=x, weights=weights, raw_weights=weights * np.exp(-x))


def tensor_nodes(rule: QuadratureRule, dims: int) -> tuple[np.ndarray, np.ndarray]:
    """Tensor grid of ``rule`` in ``dims`` dimensions.

    Returns points of shape ``(m**dims, dims)`` (row-major, first axis slowest)
    and their product weights.
    """
    grids = np.meshgrid(*([rule.nodes] * dims), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    wgrids = np.meshgrid(*([rule.weights] * dims), indexing="ij")
    w = np.prod(np.stack([g.ravel() for g in wgrids], axis=-1), axis=-1)
    return pts, w


# ---------------------------------------------------------------------------
# coefficient tensors


@dataclass(frozen=True, eq=False)
class CoefficientTensor:
    """Dense Laguerre coefficients ``a_n`` for ``n < degree_bounds`` (componentwise).

    ``values`` has shape ``degree_bounds``; its row-major flattening is the
    serialized order. ``meta`` carries auxiliary annotations and is not
    serialized.
    """

    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.array(self.values, dtype=float, copy=True)
        if v.ndim < 1 or v.size == 0:
            raise ValueError("coefficient tensor needs dims >= 1 and nonzero bounds")
        if not np.all(np.isfinite(v)):
            raise ValueError("coefficient tensor entries must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def dims(self) -> int:
        return self.values.ndim

    @property
    def degree_bounds(self) -> tuple[int, ...]:
        return tuple(self.values.shape)

    @classmethod
    def zeros(cls, bounds) -> "CoefficientTensor":
        return cls(np.zeros(as_multi_index(bounds)))

    @classmethod
    def unit(cls, n, bounds) -> "CoefficientTensor":
        n = as_multi_index(n)
        bounds = as_multi_index(bounds, len(n))
        v = np.zeros(bounds)
        v[n] = 1.0
        return cls(v)

    @classmethod
    def from_flat(cls, bounds, flat) -> "CoefficientTensor":
        bounds = as_multi_index(bounds)
        flat = np.asarray(flat, dtype=float)
        if flat.size != math.prod(bounds):
            raise ValueError(
                f"{flat.size} values do not fill degree bounds {bounds}"
            )
        return cls(flat.reshape(bounds))

    def flat(self) -> np.ndarray:
        return self.values.ravel()

    def offset(self, n) -> int:
        return int(np.ravel_multi_index(as_multi_index(n, self.dims), self.degree_bounds))

    def multi_index(self, offset: int) -> tuple[int, ...]:
        return tuple(int(i) for i in np.unravel_index(offset, self.degree_bounds))

    def __getitem__(self, n) -> float:
        return float(self.values[as_multi_index(n, self.dims)])

    def truncate(self, bounds) -> "CoefficientTensor":
        bounds = as_multi_index(bounds, self.dims)
        return CoefficientTensor(self.values[tuple(slice(0, b) for b in bounds)])

    def padded(self, bounds) -> "CoefficientTensor":
        """Zero-extend to ``bounds`` (must be componentwise >= current)."""
        bounds = as_multi_index(bounds, self.dims)
        if any(b < s for b, s in zip(bounds, self.degree_bounds)):
            raise ValueError("padded bounds must not shrink the tensor")
        v = np.zeros(bounds)
        v[tuple(slice(0, s) for s in self.degree_bounds)] = self.values
        return CoefficientTensor(v)

    def _coerce(self, other):
        if not isinstance(other, CoefficientTensor):
            return NotImplemented
        if other.dims != self.dims:
            raise DimensionMismatchError("tensors of different dimension")
        bounds = tuple(max(a, b) for a, b in zip(self.degree_bounds, other.degree_bounds))
        return self.padded(bounds).values, other.padded(bounds).values

    def __add__(self, other):
        pair = self._coerce(other)
        if pair is NotImplemented:
            return pair
        return CoefficientTensor(pair[0] + pair[1])

    def __sub__(self, other):
        pair = self._coerce(other)
        if pair is NotImplemented:
            return pair
        return CoefficientTensor(pair[0] - pair[1])

    def __mul__(self, scalar):
        if isinstance(scalar, CoefficientTensor):
            return NotImplemented
        return CoefficientTensor(self.values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return CoefficientTensor(-self.values)

    def to_dict(self) -> dict:
        return {
            "dims": self.dims,
            "degree_bounds": list(self.degree_bounds),
            "values": [float(v) for v in self.flat()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CoefficientTensor":
        try:
            dims = int(data["dims"])
            bounds = as_multi_index(data["degree_bounds"])
            values = data["values"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed coefficient tensor object: {exc}") from exc
        if len(bounds) != dims:
            raise DimensionMismatchError(
                f"dims={dims} but degree_bounds has {len(bounds)} entries"
            )
        return cls.from_flat(bounds, values)


# ---------------------------------------------------------------------------
# function handles


def _as_points(x, dims: int):
    if isinstance(x, np.ndarray) and x.dtype == object:
        pts = x
    else:
        pts = np.asarray(x, dtype=float)
    if pts.ndim == 0 or pts.shape[-1] != dims:
        raise DimensionMismatchError(f"points of shape {pts.shape} for a {dims}-d function")
    return pts


@dataclass(frozen=True, eq=False)
class FunctionHandle:
    """A function of ``dims`` variables with a vectorized evaluator.

    ``evaluator`` maps an array of points, shape ``(N, dims)``, to an array of
    ``N`` values. It is called from worker threads when :func:`analyze` runs
    with ``threads > 1`` and must be safe for concurrent calls. Evaluators
    built in this package also accept object arrays of ``mpmath.mpf``.
    ``domain`` is ``"orthant"`` or ``"full"``.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    dims: int
    domain: str = "orthant"

    def __post_init__(self):
        if self.dims < 1:
            raise ValueError("dims must be >= 1")
        if self.domain not in ("orthant", "full"):
            raise ValueError(f"unknown domain {self.domain!r}")

    def __call__(self, x):
        pts = _as_points(x, self.dims)
        flat = pts.reshape(-1, self.dims)
        vals = np.asarray(self.evaluator(flat))
        if vals.dtype != object:
            vals = vals.astype(float, copy=False)
        vals = vals.reshape(pts.shape[:-1])
        if pts.ndim == 1:
            return vals[()]
        return vals

    def _combine(self, other, op):
        if isinstance(other, FunctionHandle):
            if other.dims != self.dims:
                raise DimensionMismatchError("cannot combine functions of different dimension")
            domain = "full" if self.domain == other.domain == "full" else "orthant"
            return FunctionHandle(lambda p: op(self.evaluator(p), other.evaluator(p)), self.dims, domain)
        return NotImplemented

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __mul__(self, scalar):
        if isinstance(scalar, FunctionHandle):
            return self._combine(scalar, lambda a, b: a * b)
        s = float(scalar)
        return FunctionHandle(lambda p: s * self.evaluator(p), self.dims, self.domain)

    __rmul__ = __mul__

    def __neg__(self):
        return -1.0 * self


def basis_function(n) -> FunctionHandle:
    """Handle for the product Laguerre function ``ℒ_n``."""
    n = as_multi_index(n)

    def ev(p):
        out = None
        for axis, ni in enumerate(n):
            f = laguerre_fn_table(ni, p[:, axis])[ni]
            out = f if out is None else out * f
        return out

    return FunctionHandle(ev, len(n))


def series_function(c: CoefficientTensor) -> FunctionHandle:
    """Handle evaluating the truncated series ``sum_n c_n ℒ_n``."""
    return FunctionHandle(lambda p: synthesize(c, p), c.dims)


def expdecay(alpha: float, dims: int = 1) -> FunctionHandle:
    """``exp(-alpha * sum_i x_i)``."""
    alpha = float(alpha)
    return FunctionHandle(lambda p: exp(-alpha * p.sum(axis=1)), dims)


def gaussian(dims: int = 1) -> FunctionHandle:
    """``exp(-|x|^2)``."""
    return FunctionHandle(lambda p: exp(-(p * p).sum(axis=1)), dims)


def zero_function(dims: int = 1, domain: str = "orthant") -> FunctionHandle:
    return FunctionHandle(lambda p: p[:, 0] * 0, dims, domain)


def tensor_function(u: FunctionHandle, v: FunctionHandle) -> FunctionHandle:
    """``(x, y) ↦ u(x) v(y)`` on ``dims(u) + dims(v)`` variables."""
    m = u.dims
    domain = "full" if u.domain == v.domain == "full" else "orthant"
    return FunctionHandle(
        lambda p: u.evaluator(p[:, :m]) * v.evaluator(p[:, m:]), m + v.dims, domain
    )


# ---------------------------------------------------------------------------
# analysis / synthesis


def _evaluate_on(f: FunctionHandle, pts: np.ndarray, threads: int | None) -> np.ndarray:
    if not threads or threads <= 1 or len(pts) < 2 * threads:
        return np.asarray(f(pts), dtype=float)
    chunks = np.array_split(pts, threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda c: np.asarray(f(c), dtype=float), chunks))
    return np.concatenate(parts)


def integrate(f: FunctionHandle, rule: QuadratureRule) -> float:
    """``∫_{orthant} f dx`` by the tensorized rule."""
    pts, w = tensor_nodes(rule, f.dims)
    return float(np.dot(w, np.asarray(f(pts), dtype=float)))


def _contract(values: np.ndarray, matrices) -> np.ndarray:
    # apply matrices[i] (shape (b_i, m)) along axis i
    out = values
    for axis, mat in enumerate(matrices):
        out = np.moveaxis(np.tensordot(mat, out, axes=([1], [axis])), 0, axis)
    return out


def analyze(f: FunctionHandle, degree_bounds, rule: QuadratureRule, *,
            threads: int | None = None) -> CoefficientTensor:
    """Coefficients ``a_n(f) = ∫ f ℒ_n dx`` for all ``n < degree_bounds``.

    Raises :class:`AliasingError` when the rule has fewer nodes than the
    largest degree bound.
    """
    bounds = as_multi_index(degree_bounds, f.dims)
    if rule.count < max(bounds):
        raise AliasingError(
            f"rule with {rule.count} nodes cannot resolve degree bound {max(bounds)}"
        )
    pts, _ = tensor_nodes(rule, f.dims)
    vals = _evaluate_on(f, pts, threads).reshape((rule.count,) * f.dims)
    table = laguerre_fn_table(max(bounds) - 1, rule.nodes) * rule.weights
    return CoefficientTensor(_contract(vals, [table[:b] for b in bounds]))


def analyze_samples(values: np.ndarray, degree_bounds, rule: QuadratureRule) -> CoefficientTensor:
    """Same as :func:`analyze` but from samples already taken on the tensor nodes.

    ``values`` has shape ``(m,) * d`` (or is flat in row-major node order).
    """
    bounds = as_multi_index(degree_bounds)
    d = len(bounds)
    vals = np.asarray(values, dtype=float).reshape((rule.count,) * d)
    if rule.count < max(bounds):
        raise AliasingError(
            f"rule with {rule.count} nodes cannot resolve degree bound {max(bounds)}"
        )
    table = laguerre_fn_table(max(bounds) - 1, rule.nodes) * rule.weights
    return CoefficientTensor(_contract(vals, [table[:b] for b in bounds]))


def synthesize(c: CoefficientTensor, x):
    """Truncated series ``sum_{n < bounds} c_n ℒ_n(x)`` at one point or a batch."""
    pts = _as_points(x, c.dims)
    flat = pts.reshape(-1, c.dims).astype(float)
    tables = [laguerre_fn_table(b - 1, flat[:, i]) for i, b in enumerate(c.degree_bounds)]
    # contract axis 0 first, carrying the point index in front
    out = np.tensordot(tables[0], c.values, axes=([0], [0]))  # (N, b2, ..., bd)
    for t in tables[1:]:
        out = np.einsum("nj...,jn->n...", out, t)
    out = out.reshape(pts.shape[:-1])
    return float(out) if pts.ndim == 1 else out


def pairing(b: CoefficientTensor, a: CoefficientTensor) -> float:
    """``⟨T, f⟩ = sum_n b_n(T) a_n(f)`` over the common index range."""
    if a.dims != b.dims:
        raise DimensionMismatchError("pairing tensors of different dimension")
    common = tuple(slice(0, min(x, y)) for x, y in zip(a.degree_bounds, b.degree_bounds))
    return float(np.sum(a.values[common] * b.values[common]))


def _index_weights(bounds, k: float) -> np.ndarray:
    w = np.ones(bounds)
    for axis, b in enumerate(bounds):
        shape = [1] * len(bounds)
        shape[axis] = b
        w = w * ((np.arange(b) + 0.5) ** (2 * k)).reshape(shape)
    return w


def seminorm_sequence(c: CoefficientTensor, k: int) -> float:
    """``sum_n |c_n|^2 prod_i (n_i + 1/2)^(2k)``; negative ``k`` gives the dual weights."""
    return float(np.sum(c.values**2 * _index_weights(c.degree_bounds, k)))


def _multi_indices_upto(total: int, dims: int):
    return [k for k in product(range(total + 1), repeat=dims) if sum(k) <= total]


def schwartz_seminorm(f: FunctionHandle, j: int, l: int, grid) -> float:
    """Grid lower bound of ``max_{|k|<=j, |p|<=l} sup_x |x^k D^p f(x)|``.

    Derivatives are 4th-order finite differences; for orthant-domain
    functions, stencils that would cross the boundary become one-sided.
    """
    pts = np.atleast_2d(np.asarray(grid, dtype=float))
    if pts.size == 0:
        raise ValueError("seminorm grid must be nonempty")
    if pts.shape[-1] != f.dims:
        raise DimensionMismatchError("grid dimension does not match the function")
    if f.domain == "orthant" and np.any(pts < 0):
        raise ValueError("grid points must lie in the closed orthant")
    best = 0.0
    derivs = {}
    for p in _multi_indices_upto(l, f.dims):
        derivs[p] = np.abs(
            _fd.partial_derivative(f, pts, p, orthant=f.domain == "orthant")
        )
    for k in _multi_indices_upto(j, f.dims):
        mono = np.prod(np.abs(pts) ** np.array(k), axis=1)
        for vals in derivs.values():
            best = max(best, float(np.max(mono * vals)))
    return best


# ---------------------------------------------------------------------------
# decay classification


@dataclass(frozen=True)
class DecayReport:
    """Empirical membership test of a coefficient tensor in ``s`` or ``s'``.

    ``sums[k]`` is :func:`seminorm_sequence` at weight ``k`` (negative ``k``
    are the dual weights). ``exponent`` is the least-squares slope of
    ``log max_{|n|=s} |c_n|`` against ``log(s+1)``; ``tail_exponent`` the
    same over the upper half of the occupied shells.
    """

    sums: dict
    exponent: float
    tail_exponent: float
    finitely_supported: bool
    classification: str
    k_max: int


def _slope(s: np.ndarray, env: np.ndarray) -> float:
    if len(s) < 2:
        return -math.inf
    return float(np.polyfit(np.log(s + 1.0), np.log(env), 1)[0])


def decay_report(c: CoefficientTensor, k_max: int = 4, *, growth_cutoff: float = 8.0,
                 zero_tol: float = 1e-14) -> DecayReport:
    """Classify ``c`` as ``"rapid"`` (s), ``"slow"`` (s') or ``"divergent"``.

    The asymptotic conditions are not decidable from finite data, so the
    classification is heuristic:

    * rapid: the highest total-degree shell is empty (entries below
      ``zero_tol`` times the largest are treated as zero) or the tail
      exponent is below ``-k_max``;
    * divergent: some weighted sum overflows or the tail exponent exceeds
      ``growth_cutoff``;
    * slow otherwise.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    sums = {k: seminorm_sequence(c, k) for k in range(-k_max, k_max + 1)}
    mag = np.abs(c.values)
    peak = float(mag.max())
    if peak == 0.0:
        return DecayReport(sums, -math.inf, -math.inf, True, "rapid", k_max)

    shells = np.indices(c.degree_bounds).sum(axis=0)
    top = int(shells.max())
    env = np.zeros(top + 1)
    np.maximum.at(env, shells.ravel(), mag.ravel())
    occupied = np.nonzero(env > zero_tol * peak)[0]
    finite_support = occupied.max() < top
    exponent = _slope(occupied.astype(float), env[occupied])
    tail = occupied[occupied >= occupied.max() / 2]
    tail_exponent = _slope(tail.astype(float), env[tail]) if len(tail) >= 2 else exponent

    if not all(math.isfinite(v) for v in sums.values()) or tail_exponent > growth_cutoff:
        label = "divergent"
    elif finite_support or tail_exponent < -k_max:
        label = "rapid"
    else:
        label = "slow"
    logger.debug("decay report: exponent %.3g tail %.3g -> %s", exponent, tail_exponent, label)
    return DecayReport(sums, exponent, tail_exponent, bool(finite_support), label, k_max)
