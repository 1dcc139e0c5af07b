"""High-precision finite differences, Newton series and Euler acceleration.

Direct binomial sums and Pascal tables run in exact rational arithmetic
whenever the samples allow it, and otherwise at a precision that grows with
the order. Laplace and Fourier integral oracles recompute the same
differences from transform data as an independent check.
"""

__version__ = "0.1.0"

from .differences import (
    AsymptoticReport,
    DifferenceTable,
    asymptotic_profile,
    backward_difference,
    binomial_sum,
    central_difference,
    difference_table,
    forward_difference,
    leading_differences,
    modulate,
)
from .euler import AccelerationReport, acceleration_report, euler_transform
from .functions import (
    FunctionHandle,
    PartialFractions,
    PoleError,
    RationalFunction,
    abs_convergence_abscissa,
    catalog,
    inverse_laplace_rational,
    lookup,
    parse_rational,
    partial_fractions,
    poles,
)
from .newton import (
    EvalDiagnostics,
    NewtonSeries,
    binomial_majorant,
    build_newton_series,
    rational_newton_series,
    eval_newton_series,
)
from .numerics import PrecisionPolicy, Scalar, binomial_exact, compensated_sum, generalized_binomial
from .oracles import (
    RegionError,
    RegionVerdict,
    fourier_central_oracle,
    fourier_forward_oracle,
    laplace_difference_oracle,
    region_membership,
)
from .quadrature import QuadratureResult, quadrature_semiinfinite

__all__ = [
    "AccelerationReport",
    "AsymptoticReport",
    "DifferenceTable",
    "EvalDiagnostics",
    "FunctionHandle",
    "NewtonSeries",
    "PartialFractions",
    "PoleError",
    "PrecisionPolicy",
    "QuadratureResult",
    "RationalFunction",
    "RegionError",
    "RegionVerdict",
    "Scalar",
    "abs_convergence_abscissa",
    "acceleration_report",
    "asymptotic_profile",
    "backward_difference",
    "binomial_exact",
    "binomial_majorant",
    "binomial_sum",
    "build_newton_series",
    "catalog",
    "central_difference",
    "compensated_sum",
    "rational_newton_series",
    "difference_table",
    "euler_transform",
    "eval_newton_series",
    "forward_difference",
    "fourier_central_oracle",
    "fourier_forward_oracle",
    "generalized_binomial",
    "inverse_laplace_rational",
    "laplace_difference_oracle",
    "leading_differences",
    "lookup",
    "modulate",
    "parse_rational",
    "partial_fractions",
    "poles",
    "quadrature_semiinfinite",
    "region_membership",
]
