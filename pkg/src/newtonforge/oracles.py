"""Integral oracles for finite differences.

These recompute differences from transform data instead of from samples of
``f``, so agreement with the direct sums is an independent check.

Laplace route, for ``Re z`` right of the signal's abscissa::

    Delta_h^n f(z) = int_0^inf exp(-z t) (exp(-h t) - 1)^n  L^{-1}f(t) dt

Fourier routes, for ``g = F^{-1} f`` integrable on the line::

    Delta_h^n f(y) = int (exp(-2 pi i h x) - 1)^n exp(-2 pi i y x) g(x) dx
    delta_h^n f(y) = int (1 - exp(2 pi i h x))^n exp(-i pi h x n) exp(-2 pi i y x) g(x) dx
                   = (-2i)^n int sin(pi h x)^n exp(-2 pi i y x) g(x) dx
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .functions.handles import FourierPair, FunctionHandle, MissingSignalError
from .functions.laplace import DeltaImageTerm, ExpPolySignal
from .numerics import DEFAULT_PRECISION, Scalar, as_scalar, compensated_sum
from .quadrature import (
    DEFAULT_BUDGET,
    QuadratureResult,
    adaptive_gauss,
    periodic_trapezoid,
    quadrature_semiinfinite,
)

__all__ = [
    "RegionError",
    "RegionVerdict",
    "fourier_central_oracle",
    "fourier_forward_oracle",
    "laplace_difference_oracle",
    "region_membership",
]


class RegionError(ValueError):
    """A point lies outside the half-plane where a result is guaranteed."""


# ---------------------------------------------------------------------------
# Laplace
# ---------------------------------------------------------------------------

def laplace_difference_oracle(signal: ExpPolySignal, deltas, z, h, n: int, *, tol: float = 1e-12,
                              budget: int = DEFAULT_BUDGET) -> QuadratureResult:
    """``Delta_h^n f(z)`` from the inverse Laplace transform of ``f``.

    The signal part is integrated numerically; each delta image contributes
    its closed-form difference. ``(exp(-h t) - 1)^n`` is formed as
    ``(-1)^n (-expm1(-h t))^n`` so small ``t`` keeps its accuracy.
    """
    z, h = as_scalar(z), as_scalar(h)
    if not (h.is_real() and h > 0):
        raise ValueError("step h must be a positive real number")
    if n < 0:
        raise ValueError("order n must be non-negative")
    zc, hf = complex(z), float(h)
    closed = compensated_sum([d.forward_difference(z, h, n, DEFAULT_PRECISION) for d in deltas])
    delta_part = QuadratureResult(closed if not closed.is_exact else closed.to_precision(53), 0.0, 0)
    if not signal.terms:
        return delta_part
    abscissa = float(signal.abscissa)
    if not zc.real > abscissa:
        raise RegionError(f"Re(z) = {zc.real} is not right of the signal abscissa {abscissa}")
    terms = [(complex(t.c), t.m, float(t.a), float(t.b), t.phase) for t in signal.terms]
    sign = (-1) ** n

    def integrand(t):
        factor = sign * (-np.expm1(-hf * t)) ** n
        total = np.zeros(t.shape, dtype=np.complex128)
        for c, m, a, b, phase in terms:
            osc = np.cos(b * t) if phase == "cos" else np.sin(b * t)
            total += c * t ** m * np.exp((a - zc) * t) * osc
        return factor * total

    part = quadrature_semiinfinite(integrand, zc.real - abscissa, tol, budget=budget)
    return part + delta_part


# ---------------------------------------------------------------------------
# Fourier
# ---------------------------------------------------------------------------

_LD = np.longdouble
_PI = _LD("3.14159265358979323846264338327950288")
_TWO_PI = 2 * _PI


def _pair(pair) -> FourierPair:
    if isinstance(pair, FunctionHandle):
        if pair.fourier_pair is None:
            raise MissingSignalError(f"{pair.name} has no inverse Fourier transform")
        return pair.fourier_pair
    return pair


def _exact_rational(x, what: str) -> Fraction:
    x = as_scalar(x)
    if not x.is_real():
        raise ValueError(f"{what} must be real")
    q = x.as_fractions()[0]
    return q


def _sin_pi(hx):
    return np.sin(_PI * hx)


def _forward_kernel(h, y, n):
    # exp(-2 pi i h x) - 1 = -2 sin^2(pi h x) - i sin(2 pi h x)
    def kernel(x):
        s = _sin_pi(h * x)
        base = -2 * s * s - 1j * np.sin(_TWO_PI * h * x)
        return base ** n * np.exp(-1j * _TWO_PI * y * x)
    return kernel


def _central_product_kernel(h, y, n):
    # 1 - exp(2 pi i h x) = 2 sin^2(pi h x) - i sin(2 pi h x)
    def kernel(x):
        s = _sin_pi(h * x)
        base = 2 * s * s - 1j * np.sin(_TWO_PI * h * x)
        return base ** n * np.exp(-1j * _PI * h * x * n) * np.exp(-1j * _TWO_PI * y * x)
    return kernel


def _central_sine_kernel(h, y, n):
    scale = (-2j) ** n

    def kernel(x):
        return scale * _sin_pi(h * x) ** n * np.exp(-1j * _TWO_PI * y * x)
    return kernel


def _line_integral(pair: FourierPair, kernel, frequency: float, n: int, period_unit: Fraction | None,
                   tol: float, budget: int) -> QuadratureResult:
    """``int_R kernel(x) g(x) dx`` for a kernel bounded by ``2^n``.

    ``frequency`` bounds the kernel's oscillation in cycles per unit length.
    Rapidly decaying pairs are cut off where the tail is below
    ``tol / 2^n`` and integrated on panels no wider than half a period.
    Algebraically decaying pairs are periodized over ``period_unit`` (the
    kernel's period) and integrated with the trapezoid rule.
    """
    # the kernel reaches 2^n, so rounding alone leaves about 2^n * eps
    tol = max(tol, 2.0 ** n * float(np.finfo(_LD).eps) * 16)
    if pair.cutoff is not None:
        cutoff = pair.cutoff(tol / 2 ** (n + 2))
        width = 0.5 / frequency if frequency > 0 else None

        def integrand(x):
            return kernel(x) * pair.inverse(x)

        left = adaptive_gauss(integrand, -cutoff, 0.0, tol / 2, dtype=_LD, max_width=width, budget=budget)
        right = adaptive_gauss(integrand, 0.0, cutoff, tol / 2, dtype=_LD, max_width=width,
                               budget=budget - left.evaluations)
        return left + right
    if pair.periodized is None:
        raise ValueError(f"pair {pair.name} has neither a cutoff nor a periodization")
    if period_unit is None:
        raise ValueError(f"pair {pair.name} needs rational h and y")
    period = period_unit.denominator
    margin = math.ceil(period * (n * math.log(2) + math.log(1 / tol)) / (2 * math.pi * pair.strip)) + 16
    points = math.ceil(frequency * period) + margin

    def integrand(x):
        return kernel(x) * pair.periodized(x, period)

    return periodic_trapezoid(integrand, period, points, dtype=_LD, budget=budget)


def _common_unit(*qs: Fraction) -> Fraction:
    den = 1
    for q in qs:
        den = math.lcm(den, q.denominator)
    return Fraction(1, den)


def fourier_forward_oracle(pair, y, h, n: int, *, tol: float = 1e-12,
                           budget: int = DEFAULT_BUDGET) -> QuadratureResult:
    """``Delta_h^n f(y)`` from ``g = F^{-1} f`` on the real line."""
    pair = _pair(pair)
    yq, hq = _exact_rational(y, "y"), _exact_rational(h, "h")
    if hq <= 0:
        raise ValueError("step h must be positive")
    kernel = _forward_kernel(_LD(float(hq)), _LD(float(yq)), n)
    freq = n * float(hq) + abs(float(yq))
    return _line_integral(pair, kernel, freq, n, _common_unit(hq, yq), tol, budget)


@dataclass(frozen=True)
class CentralOracleResult:
    """Both central forms; ``value`` is the sine form."""

    sine_form: QuadratureResult
    product_form: QuadratureResult

    @property
    def value(self) -> Scalar:
        return self.sine_form.value

    @property
    def est_error(self) -> float:
        return self.sine_form.est_error

    @property
    def evaluations(self) -> int:
        return self.sine_form.evaluations + self.product_form.evaluations

    @property
    def discrepancy(self) -> float:
        return float((self.sine_form.value - self.product_form.value).magnitude())


def fourier_central_oracle(pair, y, h, n: int, *, tol: float = 1e-12,
                           budget: int = DEFAULT_BUDGET) -> CentralOracleResult:
    """``delta_h^n f(y)`` by the sine form, with the product form alongside."""
    pair = _pair(pair)
    yq, hq = _exact_rational(y, "y"), _exact_rational(h, "h")
    if hq <= 0:
        raise ValueError("step h must be positive")
    h_ld, y_ld = _LD(float(hq)), _LD(float(yq))
    freq = n * float(hq) / 2 + abs(float(yq))
    unit = _common_unit(hq / 2, yq)
    sine = _line_integral(pair, _central_sine_kernel(h_ld, y_ld, n), freq, n, unit, tol, budget)
    product = _line_integral(pair, _central_product_kernel(h_ld, y_ld, n), freq, n, unit, tol, budget)
    return CentralOracleResult(sine, product)


# ---------------------------------------------------------------------------
# regions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegionVerdict:
    membership: str
    abscissa_used: Scalar

    @property
    def absolute(self) -> bool:
        return self.membership == "absolute"


def region_membership(handle: FunctionHandle, z) -> RegionVerdict:
    """``absolute`` when ``Re z`` is strictly right of the abscissa.

    Anything else is ``conditional_unknown``: conditional convergence is
    never claimed.
    """
    if handle.laplace_signal is None:
        raise MissingSignalError(f"{handle.name} has no inverse Laplace transform")
    abscissa = handle.abs_abscissa
    re = as_scalar(z).real
    membership = "absolute" if re > abscissa else "conditional_unknown"
    return RegionVerdict(membership, abscissa)
