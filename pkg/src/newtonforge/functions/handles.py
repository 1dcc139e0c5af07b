"""Function handles: an evaluator plus whatever transform data is known.

A handle bundles ``f`` with, when available, its inverse Laplace transform
(an exponential-polynomial signal plus delta images), the boundary of its
region of absolute Laplace convergence, and a numerical inverse Fourier
transform. Rational handles build the Laplace data lazily from the exact
partial fraction decomposition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import mpmath
import numpy as np
from mpmath import libmp

from ..numerics import DEFAULT_PRECISION, Scalar, as_scalar
from .decomposition import poles
from .laplace import DeltaImageTerm, ExpPolySignal, inverse_laplace_rational, polynomial_delta_terms
from .rational import ExpressionError, PoleError, RationalFunction, parse_rational


class MissingSignalError(LookupError):
    """The handle carries no inverse Laplace transform."""


class UnknownFunctionError(KeyError):
    pass


@dataclass(frozen=True)
class FourierPair:
    """Numerical inverse Fourier transform ``g = F^{-1} f`` of a catalog entry.

    ``inverse`` is vectorised over real numpy arrays. ``cutoff(eps)`` returns
    ``X`` with ``int_{|x|>X} |g| < eps`` for rapidly decaying pairs.
    ``periodized(x, L)`` is the closed form of ``sum_j g(x + jL)`` for pairs
    with slow (algebraic) decay; ``strip`` is the half-width of the strip in
    which ``g`` is analytic, which sets the trapezoid sample count.
    """

    name: str
    inverse: Callable[[np.ndarray], np.ndarray]
    cutoff: Callable[[float], float] | None = None
    periodized: Callable[[np.ndarray, int], np.ndarray] | None = None
    strip: float = 1.0

    def __call__(self, x):
        return self.inverse(x)


class FunctionHandle:
    """A complex function plus optional transform data.

    ``evaluator(z, prec)`` maps a :class:`Scalar` to a :class:`Scalar`; ``prec``
    is the precision to use whenever the result cannot be exact. When
    ``exact`` is set, exact inputs give exact outputs; otherwise exact inputs
    are rounded to ``prec`` before the evaluator sees them.
    """

    def __init__(self, name: str, evaluator: Callable[[Scalar, int], Scalar], *, exact: bool = False,
                 laplace_signal: tuple[ExpPolySignal, tuple[DeltaImageTerm, ...]] | None = None,
                 abs_abscissa: Scalar | None = None, fourier_pair: FourierPair | None = None,
                 rational: RationalFunction | None = None):
        if laplace_signal is not None and abs_abscissa is None:
            raise ValueError("a handle with a Laplace signal needs its abscissa")
        self.name = name
        self.evaluator = evaluator
        self.exact = exact
        self._signal = laplace_signal
        self._abscissa = abs_abscissa
        self.fourier_pair = fourier_pair
        self.rational = rational

    def __call__(self, z, prec: int | None = None) -> Scalar:
        z = as_scalar(z)
        prec = prec or z.precision_bits or DEFAULT_PRECISION
        if z.is_exact and not self.exact:
            z = z.to_precision(prec)
        return self.evaluator(z, prec)

    def __repr__(self) -> str:
        return f"FunctionHandle({self.name!r})"

    @cached_property
    def laplace_signal(self) -> tuple[ExpPolySignal, tuple[DeltaImageTerm, ...]] | None:
        if self._signal is not None or self.rational is None:
            return self._signal
        r = self.rational
        poly_part, rem = divmod(r.numerator, r.denominator)
        proper = RationalFunction(rem, r.denominator)
        return inverse_laplace_rational(proper), polynomial_delta_terms(poly_part)

    @cached_property
    def abs_abscissa(self) -> Scalar | None:
        if self._abscissa is not None or self.rational is None:
            return self._abscissa
        out = Scalar.exact(0)
        for sigma, _ in self.pole_list:
            if sigma.real > out:
                out = sigma.real
        return out

    @cached_property
    def pole_list(self) -> list[tuple[Scalar, int]]:
        if self.rational is None:
            return []
        return poles(self.rational, prec=256)


def abs_convergence_abscissa(handle: FunctionHandle) -> Scalar:
    """Boundary of the region of absolute Laplace convergence.

    For rational handles this is ``max{0, Re(pole)}``; ``z`` lies in the
    region exactly when ``Re(z)`` is strictly larger.
    """
    if handle.laplace_signal is None:
        raise MissingSignalError(f"{handle.name} has no inverse Laplace transform")
    return handle.abs_abscissa


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def _pi(prec: int) -> Scalar:
    return Scalar(libmp.mpf_pi(prec), libmp.fzero, prec)


def rational_handle(r: RationalFunction | str, name: str | None = None) -> FunctionHandle:
    if isinstance(r, str):
        r = parse_rational(r)
    handle: FunctionHandle

    def evaluate(z: Scalar, prec: int) -> Scalar:
        if z.is_exact:
            return r(z)
        den = r.denominator(z)
        if r.denominator.degree > 0:
            tol = mpmath.mpf(2) ** (-(prec // 2))
            for sigma, _ in handle.pole_list:
                if (z - sigma).magnitude() <= tol:
                    raise PoleError(f"z = {z} is within 2^-{prec // 2} of the pole {sigma} of {r}", z)
        if den.is_zero():
            raise PoleError(f"pole of {r} at z = {z}", z)
        return r.numerator(z) / den

    handle = FunctionHandle(name or str(r), evaluate, exact=True, rational=r)
    return handle


def _bessel_recip_sqrt(z: Scalar, prec: int) -> Scalar:
    return 1 / (1 + z * z).sqrt()


def _gaussian(z: Scalar, prec: int) -> Scalar:
    return (-(_pi(prec) * z * z)).exp()


def _real_abs(y: Scalar) -> Scalar:
    if not y.is_real():
        raise ValueError("two_sided_exponential is defined for real arguments only")
    return -y if y < 0 else y


def _two_sided_exponential(y: Scalar, prec: int) -> Scalar:
    return (-(2 * _pi(prec) * _real_abs(y))).exp()


def _gaussian_cutoff(eps: float) -> float:
    return math.sqrt(max(math.log(1 / eps), 1.0) / math.pi) + 0.5


_PI_DIGITS = "3.14159265358979323846264338327950288"


def _pi_like(x: np.ndarray):
    # pi at the precision of x's dtype (np.pi alone would cap long doubles at 53 bits)
    return np.asarray(_PI_DIGITS, dtype=np.longdouble).astype(x.dtype if x.dtype.kind == "f" else np.float64)


def _gaussian_inverse(x):
    x = np.asarray(x)
    return np.exp(-_pi_like(x) * x * x)


def _cauchy_inverse(x):
    x = np.asarray(x)
    return (1 / _pi_like(x)) / (1 + x * x)


def _cauchy_periodized(x, period):
    # Poisson summation of (1/pi)/(1+x^2) over shifts by `period`
    x = np.asarray(x)
    pi = _pi_like(x)
    r = np.exp(-2 * pi / period)
    theta = 2 * pi * x / period
    return (1 - r * r) / (1 - 2 * r * np.cos(theta) + r * r) / period


GAUSSIAN_PAIR = FourierPair("gaussian", _gaussian_inverse, cutoff=_gaussian_cutoff)
CAUCHY_PAIR = FourierPair("two_sided_exponential", _cauchy_inverse,
                          periodized=_cauchy_periodized, strip=1.0)


def catalog() -> dict[str, FunctionHandle]:
    """Named handles. Any rational expression is also accepted by :func:`lookup`."""
    return {
        "bessel_recip_sqrt": FunctionHandle("bessel_recip_sqrt", _bessel_recip_sqrt),
        "gaussian": FunctionHandle("gaussian", _gaussian, fourier_pair=GAUSSIAN_PAIR),
        "two_sided_exponential": FunctionHandle("two_sided_exponential", _two_sided_exponential,
                                                fourier_pair=CAUCHY_PAIR),
        "reciprocal": rational_handle("1/(z+1)", name="reciprocal"),
        "two_pole": rational_handle("1/((z+1)*(z+2))", name="two_pole"),
        "double_pole": rational_handle("(z+3)/(z+1)^2", name="double_pole"),
    }


def lookup(name: str) -> FunctionHandle:
    """Catalog entry by name, or a rational handle parsed from an expression."""
    entries = catalog()
    if name in entries:
        return entries[name]
    try:
        return rational_handle(name)
    except ExpressionError as exc:
        raise UnknownFunctionError(
            f"{name!r} is neither a catalog name ({', '.join(sorted(entries))}) "
            f"nor a rational expression: {exc}") from exc
