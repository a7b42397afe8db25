"""Spectral toolkit for the Gauss-Kuzmin-Wirsing transfer operator.

Exact golden-ratio field arithmetic, the layered eigenvalue series with its
fixed-point summation, trace-formula decomposition checks, and an
independent matrix-truncation oracle.
"""

from .errors import (
    ConsistencyError,
    ConvergenceError,
    DomainError,
    GKWError,
    PrecisionError,
    TruncationError,
)
from .numerics import (
    PHI,
    SQRT5,
    BigFloat,
    ComplexBigFloat,
    QuadraticNumber,
    Rational,
    golden_pow,
    quad_compare,
    quad_to_float,
)
from .kernel import KernelTable, jacobi_eval, k_coeff, k_window
from .spectral import (
    EigenvalueResult,
    GFunction,
    LayerState,
    SpectralOptions,
    advance_layer,
    eigenfunction_eval,
    eigenvalue,
    eigenvalue_omega,
    functional_equation_residual,
    g_transform,
    gfunction_from_result,
    gfunction_from_state,
    gfunction_reference,
    init_layers,
)
from .oracle import (
    TruncatedOperator,
    build_matrix,
    hurwitz_zeta,
    oracle_eigenvalues,
    stable_eigenvalues,
)
from .traces import (
    FixedPoint,
    TraceReport,
    column_identity,
    omega_trace_identity,
    pair_identity,
    trace_power,
    xi_pair_product,
    xi_single,
)
from .analysis import AsymptoticsRow, asympt_c, fit_d, ratio_test

__version__ = "0.1.0"

__all__ = [
    "BigFloat",
    "ComplexBigFloat",
    "QuadraticNumber",
    "Rational",
    "PHI",
    "SQRT5",
    "golden_pow",
    "quad_compare",
    "quad_to_float",
    "KernelTable",
    "jacobi_eval",
    "k_coeff",
    "k_window",
    "SpectralOptions",
    "LayerState",
    "EigenvalueResult",
    "GFunction",
    "init_layers",
    "advance_layer",
    "eigenvalue",
    "eigenvalue_omega",
    "eigenfunction_eval",
    "functional_equation_residual",
    "g_transform",
    "gfunction_from_result",
    "gfunction_from_state",
    "gfunction_reference",
    "TruncatedOperator",
    "hurwitz_zeta",
    "build_matrix",
    "oracle_eigenvalues",
    "stable_eigenvalues",
    "FixedPoint",
    "TraceReport",
    "xi_single",
    "xi_pair_product",
    "trace_power",
    "column_identity",
    "pair_identity",
    "omega_trace_identity",
    "AsymptoticsRow",
    "asympt_c",
    "ratio_test",
    "fit_d",
    "GKWError",
    "DomainError",
    "TruncationError",
    "PrecisionError",
    "ConvergenceError",
    "ConsistencyError",
]
