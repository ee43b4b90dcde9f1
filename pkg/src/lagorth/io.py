"""File formats: coefficient/kernel JSON and sampled-function CSV.

JSON floats are written with Python's shortest round-trip representation,
so a write/read cycle reproduces every value bit for bit.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .kernel import KernelMatrix
from .transform import CoefficientTensor, QuadratureRule, tensor_nodes

__all__ = [
    "InputFormatError",
    "dump_tensor",
    "load_tensor",
    "dump_kernel",
    "load_kernel",
    "write_samples_csv",
    "read_samples_csv",
    "samples_on_nodes",
]


class InputFormatError(Exception):
    """An input file could not be parsed."""


def _dump(obj: dict, path) -> None:
    Path(path).write_text(json.dumps(obj, allow_nan=False) + "\n")


def _load(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise InputFormatError(f"{path}: expected a JSON object")
    return data


def dump_tensor(c: CoefficientTensor, path) -> None:
    _dump(c.to_dict(), path)


def load_tensor(path) -> CoefficientTensor:
    data = _load(path)
    try:
        return CoefficientTensor.from_dict(data)
    except ValueError as exc:
        raise InputFormatError(f"{path}: {exc}") from exc


def dump_kernel(B: KernelMatrix, path) -> None:
    _dump(B.to_dict(), path)


def load_kernel(path) -> KernelMatrix:
    data = _load(path)
    try:
        return KernelMatrix.from_dict(data)
    except ValueError as exc:
        raise InputFormatError(f"{path}: {exc}") from exc


def write_samples_csv(path, points, values=None) -> None:
    """CSV with header ``x1..xd`` (and ``f`` when values are given)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    d = pts.shape[1]
    header = [f"x{i + 1}" for i in range(d)] + (["f"] if values is not None else [])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        vals = None if values is None else np.asarray(values, dtype=float).ravel()
        for i, row in enumerate(pts):
            cells = [repr(float(v)) for v in row]
            if vals is not None:
                cells.append(repr(float(vals[i])))
            w.writerow(cells)


def read_samples_csv(path, *, require_values: bool = True):
    """Read a sample CSV; returns ``(points (N, d), values (N,) or None)``."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise InputFormatError(f"{path}: {exc}") from exc
    if not rows:
        raise InputFormatError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    coords = [h for h in header if h != "f"]
    expected = [f"x{i + 1}" for i in range(len(coords))]
    if coords != expected or not coords:
        raise InputFormatError(f"{path}: header must be x1..xd[,f], got {header}")
    has_f = "f" in header
    if has_f and header[-1] != "f":
        raise InputFormatError(f"{path}: value column f must come last")
    if require_values and not has_f:
        raise InputFormatError(f"{path}: missing value column f")
    data = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise InputFormatError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            data.append([float(v) for v in row])
        except ValueError as exc:
            raise InputFormatError(f"{path}:{lineno}: {exc}") from exc
    arr = np.array(data, dtype=float).reshape(-1, len(header))
    if has_f:
        return arr[:, :-1], arr[:, -1]
    return arr, None


def samples_on_nodes(points, values, rule: QuadratureRule, *, rtol: float = 1e-9) -> np.ndarray:
    """Arrange samples taken at the tensor quadrature nodes into node order.

    Every node must appear among ``points`` (matched to relative tolerance
    ``rtol``); no interpolation is attempted.
    """
    pts = np.asarray(points, dtype=float)
    d = pts.shape[1]
    nodes, _ = tensor_nodes(rule, d)
    idx = np.empty((len(pts), d), dtype=int)
    for axis in range(d):
        col = pts[:, axis]
        pos = np.clip(np.searchsorted(rule.nodes, col), 1, rule.count - 1)
        left = rule.nodes[pos - 1]
        right = rule.nodes[pos]
        pick = np.where(np.abs(col - left) <= np.abs(col - right), pos - 1, pos)
        if rule.count == 1:
            pick = np.zeros(len(col), dtype=int)
        err = np.abs(rule.nodes[pick] - col)
        if np.any(err > rtol * np.maximum(1.0, np.abs(col))):
            bad = int(np.argmax(err))
            raise InputFormatError(
                f"sample point {pts[bad].tolist()} is not a quadrature node of the "
                f"{rule.count}-point rule (use the `nodes` subcommand)"
            )
        idx[:, axis] = pick
    flat = np.ravel_multi_index(tuple(idx.T), (rule.count,) * d)
    out = np.full(len(nodes), np.nan)
    out[flat] = values
    if np.isnan(out).any():
        raise InputFormatError(
            f"samples cover {int((~np.isnan(out)).sum())} of {len(nodes)} quadrature nodes"
        )
    return out
