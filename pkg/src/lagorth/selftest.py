"""Quick numerical self-checks run by ``lagorth selftest``."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .convolution import convolution_function, convolve_coeff
from .core import laguerre_fn_table
from .operators import apply_E_pointwise
from .transform import CoefficientTensor, analyze, basis_function, gauss_laguerre_rule


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float
    seconds: float


def check_orthonormality() -> tuple[float, float]:
    rule = gauss_laguerre_rule(128)
    table = laguerre_fn_table(32, rule.nodes)
    gram = (table * rule.weights) @ table.T
    return float(np.max(np.abs(gram - np.eye(33)))), 1e-10


def check_eigenvalues() -> tuple[float, float]:
    x = np.linspace(0.5, 10.0, 40)[:, None]
    worst = 0.0
    for n in range(9):
        f = basis_function(n)
        fx = f(x)
        err = np.abs(apply_E_pointwise(f, x) + (n + 0.5) * fx) / np.maximum(1.0, np.abs(fx))
        worst = max(worst, float(err.max()))
    return worst, 1e-4


def check_convolution() -> tuple[float, float]:
    rule = gauss_laguerre_rule(24)
    bounds = 16
    worst = 0.0
    unit0 = CoefficientTensor.unit(0, bounds)
    expected = np.zeros(bounds)
    expected[:2] = [1.0, -1.0]
    worst = float(np.max(np.abs(convolve_coeff(unit0, unit0).values - expected)))
    for i in range(7):
        for j in range(7):
            a = CoefficientTensor.unit(i, bounds)
            b = CoefficientTensor.unit(j, bounds)
            formula = convolve_coeff(a, b).values
            direct = analyze(
                convolution_function(basis_function(i), basis_function(j), order=16), bounds, rule
            ).values
            worst = max(worst, float(np.max(np.abs(formula - direct)[: bounds - 1])))
    return worst, 1e-6


CHECKS = {
    "orthonormality": check_orthonormality,
    "eigenvalue relation": check_eigenvalues,
    "convolution oracle": check_convolution,
}


def run_selftest() -> list[CheckResult]:
    results = []
    for name, check in CHECKS.items():
        start = time.perf_counter()
        value, tol = check()
        results.append(CheckResult(name, value < tol, value, tol, time.perf_counter() - start))
    return results


def format_table(results) -> str:
    lines = [f"{'check':<22} {'status':<6} {'max error':>12} {'tolerance':>10} {'time':>8}"]
    for r in results:
        lines.append(
            f"{r.name:<22} {'PASS' if r.passed else 'FAIL':<6} {r.value:>12.3e} "
            f"{r.tolerance:>10.0e} {r.seconds:>7.2f}s"
        )
    return "\n".join(lines)
