"""Function algebra: rational functions, decompositions, transforms, catalog."""

from .decomposition import PartialFractions, RootFindingError, partial_fractions, poles
from .handles import (
    CAUCHY_PAIR,
    GAUSSIAN_PAIR,
    FourierPair,
    FunctionHandle,
    MissingSignalError,
    UnknownFunctionError,
    abs_convergence_abscissa,
    catalog,
    lookup,
    rational_handle,
)
from .laplace import (
    DeltaImageTerm,
    ExpPolySignal,
    ImproperFunctionError,
    SignalTerm,
    inverse_laplace_rational,
    polynomial_delta_terms,
)
from .polynomial import Polynomial
from .rational import ExpressionError, PoleError, RationalFunction, format_rational, parse_rational

__all__ = [
    "CAUCHY_PAIR",
    "DeltaImageTerm",
    "ExpPolySignal",
    "ExpressionError",
    "FourierPair",
    "FunctionHandle",
    "GAUSSIAN_PAIR",
    "ImproperFunctionError",
    "MissingSignalError",
    "PartialFractions",
    "PoleError",
    "Polynomial",
    "RationalFunction",
    "RootFindingError",
    "SignalTerm",
    "UnknownFunctionError",
    "abs_convergence_abscissa",
    "catalog",
    "format_rational",
    "inverse_laplace_rational",
    "lookup",
    "parse_rational",
    "partial_fractions",
    "poles",
    "polynomial_delta_terms",
    "rational_handle",
]
