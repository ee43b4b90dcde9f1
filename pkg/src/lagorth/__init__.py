"""Laguerre spectral analysis on the positive orthant.

Coefficient analysis and synthesis in the product Laguerre basis, the
Laguerre eigen-operator, coefficient-space convolution, kernel matrices and
a finite-order reflection extension to all of R^d.
"""

from .core import (
    DimensionMismatchError,
    as_multi_index,
    laguerre1_poly,
    laguerre_fn,
    laguerre_fn_deriv,
    laguerre_fn_multi,
    laguerre_fn_table,
    laguerre_poly,
)
from .transform import (
    AliasingError,
    CoefficientTensor,
    DecayReport,
    FunctionHandle,
    QuadratureRule,
    analyze,
    basis_function,
    decay_report,
    expdecay,
    gauss_laguerre_rule,
    gaussian,
    integrate,
    pairing,
    schwartz_seminorm,
    seminorm_sequence,
    series_function,
    synthesize,
    tensor_function,
    zero_function,
)
from .operators import apply_E_coeff, apply_E_pointwise, E_function, self_adjointness_residual
from .convolution import convolve_coeff, convolve_direct, convolution_function
from .extension import (
    ConditioningError,
    ExtensionWeights,
    extend_1d,
    extend_nd,
    extension_quality,
    seeley_weights,
)
from .kernel import KernelMatrix, kernel_action, kernel_apply, kernel_from_function, tensor_coeff

__version__ = "0.1.0"

__all__ = [
    "DimensionMismatchError",
    "as_multi_index",
    "laguerre1_poly",
    "laguerre_fn",
    "laguerre_fn_deriv",
    "laguerre_fn_multi",
    "laguerre_fn_table",
    "laguerre_poly",
    "AliasingError",
    "CoefficientTensor",
    "DecayReport",
    "FunctionHandle",
    "QuadratureRule",
    "analyze",
    "basis_function",
    "decay_report",
    "expdecay",
    "gauss_laguerre_rule",
    "gaussian",
    "integrate",
    "pairing",
    "schwartz_seminorm",
    "seminorm_sequence",
    "series_function",
    "synthesize",
    "tensor_function",
    "zero_function",
    "apply_E_coeff",
    "apply_E_pointwise",
    "E_function",
    "self_adjointness_residual",
    "convolve_coeff",
    "convolve_direct",
    "convolution_function",
    "ConditioningError",
    "ExtensionWeights",
    "extend_1d",
    "extend_nd",
    "extension_quality",
    "seeley_weights",
    "KernelMatrix",
    "kernel_action",
    "kernel_apply",
    "kernel_from_function",
    "tensor_coeff",
]
