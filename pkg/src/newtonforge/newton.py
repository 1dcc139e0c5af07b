"""Newton forward-difference series of functions with Laplace data.

``f(z) = sum_k C(z - z0, k) Delta^k f(z0)`` with unit step. The series is
built only at centers strictly right of the abscissa of absolute Laplace
convergence, and evaluated only strictly right of the center.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath

from .differences import as_handle, leading_differences
from .functions.decomposition import partial_fractions, poles
from .functions.handles import FunctionHandle, MissingSignalError, rational_handle
from .functions.rational import RationalFunction, parse_rational
from .numerics import DEFAULT_PRECISION, PrecisionPolicy, Scalar, as_scalar, generalized_binomial
from .oracles import RegionError

__all__ = [
    "EvalDiagnostics",
    "MajorantReport",
    "NewtonSeries",
    "binomial_majorant",
    "build_newton_series",
    "rational_newton_series",
    "eval_newton_series",
    "newton_partial_sum",
    "signal_weight",
]

MIN_TERMS = 8


@dataclass(frozen=True)
class NewtonSeries:
    f: FunctionHandle
    z0: Scalar
    coeffs: tuple[Scalar, ...]
    abscissa: Scalar
    max_terms: int
    #: number of leading coefficients that can be nonzero (polynomials only)
    exact_length: int | None = None

    @property
    def precision_bits(self) -> int | None:
        precs = [c.precision_bits for c in self.coeffs if not c.is_exact]
        return min(precs) if precs else None


@dataclass(frozen=True)
class EvalDiagnostics:
    terms_used: int
    last_term_mag: float
    threshold: float
    converged: bool
    majorant_tail: float | None = None
    majorant_verdict: str = "not_computed"
    #: the stopping rule is a heuristic, not a proven remainder bound
    heuristic: bool = True

    def as_dict(self) -> dict:
        return {
            "terms_used": self.terms_used,
            "last_term_mag": self.last_term_mag,
            "threshold": self.threshold,
            "converged": self.converged,
            "majorant_tail": self.majorant_tail,
            "majorant_verdict": self.majorant_verdict,
            "heuristic_stop": self.heuristic,
        }


def _polynomial_length(f: FunctionHandle) -> int | None:
    r = f.rational
    if r is not None and r.is_polynomial:
        return max(r.numerator.degree + 1, 1)
    return None


def build_newton_series(f, z0, max_terms: int = 500,
                        policy: PrecisionPolicy | None = None) -> NewtonSeries:
    """Coefficients ``Delta^k f(z0)`` for ``k < max_terms`` at unit step.

    >>> s = build_newton_series("z^2", 0, 5)
    >>> [str(c) for c in s.coeffs]
    ['0', '1', '2', '0', '0']
    """
    f = as_handle(f)
    if max_terms < 1:
        raise ValueError("max_terms must be positive")
    z0 = as_scalar(z0)
    if f.laplace_signal is None:
        raise MissingSignalError(f"{f.name} has no inverse Laplace transform; "
                                 "its Newton series cannot be validated")
    abscissa = f.abs_abscissa
    # an empty signal (pure polynomial) converges absolutely on the whole plane
    if f.laplace_signal[0].terms and not z0.real > abscissa:
        raise RegionError(f"center Re(z0) = {z0.real} must be strictly greater than "
                          f"the abscissa {abscissa} of {f.name}")
    coeffs = leading_differences(f, z0, 1, max_terms - 1, policy)
    return NewtonSeries(f, z0, tuple(coeffs), abscissa, max_terms, _polynomial_length(f))


def newton_partial_sum(s: NewtonSeries, z, n: int) -> Scalar:
    """Degree-``n`` partial sum; exact for exact ``z`` and coefficients."""
    if n >= len(s.coeffs):
        raise ValueError(f"series has only {len(s.coeffs)} coefficients")
    w = as_scalar(z) - s.z0
    total = Scalar.exact(0)
    b = Scalar.exact(1)
    for k in range(n + 1):
        total = total + b * s.coeffs[k]
        b = b * (w - k) / (k + 1)
    return total


@dataclass(frozen=True)
class MajorantReport:
    """Partial sums of ``T(z, z0) = sum_k |C(z - z0, k)|``."""

    partial_sums: tuple[float, ...]
    verdict: str
    decay_exponent: float | None = None
    tail_estimates: tuple[float, ...] = field(default=(), repr=False)

    def tail(self, k: int) -> float:
        """Estimated ``sum_{j >= k} |C(z - z0, j)|``."""
        if self.verdict != "converging":
            return math.inf
        if k < len(self.tail_estimates):
            return self.tail_estimates[k]
        return 0.0 if not self.tail_estimates else self.tail_estimates[-1]


def binomial_majorant(z, z0, k_max: int = 2000) -> MajorantReport:
    """Partial sums of the binomial majorant and a convergence verdict.

    The terms behave like ``k^(-1 - Re(z - z0))``; the verdict comes from
    the decay exponent fitted over the last quarter of the terms, or is
    ``converging`` outright when ``z - z0`` is a non-negative integer and the
    series is finite.
    """
    w = as_scalar(z) - as_scalar(z0)
    wc = complex(w)
    mags = []
    b = complex(1)
    for k in range(k_max):
        mags.append(abs(b))
        b = b * (wc - k) / (k + 1)
    partials = []
    acc = 0.0
    for m in mags:
        acc += m
        partials.append(acc)
    finite = w.is_exact and w.is_real() and w.as_fractions()[0].denominator == 1 \
        and w.as_fractions()[0] >= 0
    if finite:
        tails = [partials[-1] - (partials[k - 1] if k else 0.0) for k in range(k_max)]
        return MajorantReport(tuple(partials), "converging", None, tuple(tails))
    lo = max(2, 3 * k_max // 4)
    xs = [math.log(k) for k in range(lo, k_max) if mags[k] > 0]
    ys = [math.log(mags[k]) for k in range(lo, k_max) if mags[k] > 0]
    if len(xs) < 2:
        return MajorantReport(tuple(partials), "inconclusive")
    mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
    slope = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sum((x - mx) ** 2 for x in xs)
    exponent = -slope - 1
    if exponent > 0.02:
        verdict = "converging"
    elif exponent < -0.02:
        verdict = "diverging"
    else:
        verdict = "inconclusive"
    tails: tuple[float, ...] = ()
    if verdict == "converging":
        # sum_{j>=k} c j^(-1-e) ~ mags[k] * k / e beyond the computed range
        beyond = mags[-1] * k_max / exponent
        out = [0.0] * k_max
        running = beyond
        for k in range(k_max - 1, -1, -1):
            running += mags[k]
            out[k] = running
        tails = tuple(out)
    return MajorantReport(tuple(partials), verdict, exponent, tails)


def signal_weight(f: FunctionHandle, z0) -> float:
    """Upper bound on ``int_0^inf |exp(-z0 t) m(t)| dt`` for the signal ``m`` of ``f``."""
    sig = f.laplace_signal
    if sig is None:
        raise MissingSignalError(f"{f.name} has no inverse Laplace transform")
    x0 = float(as_scalar(z0).real)
    total = 0.0
    for t in sig[0].terms:
        gap = x0 - float(t.a)
        if gap <= 0:
            return math.inf
        total += abs(complex(t.c)) * math.factorial(t.m) / gap ** (t.m + 1)
    return total


def eval_newton_series(s: NewtonSeries, z, tol: float = 1e-10,
                       prec: int | None = None) -> tuple[Scalar, EvalDiagnostics]:
    """Sum the series at ``z`` (``Re z > Re z0`` strictly).

    Stops at the first ``K >= 8`` for which terms ``K`` and ``K - 1`` are both
    below ``tol * (1 + |partial sum|)``; a polynomial or an integer offset
    ``z - z0`` stops as soon as every remaining term is exactly zero, and is
    summed exactly when the coefficients are exact. If the
    coefficients run out first, the best partial sum is returned with
    ``converged = False``.
    """
    z = as_scalar(z)
    if not z.real > s.z0.real:
        raise RegionError(f"Re(z) = {z.real} must be strictly greater than Re(z0) = {s.z0.real}")
    w = z - s.z0
    integer_offset = w.is_exact and w.is_real() and w.as_fractions()[0].denominator == 1
    # a finite sum of exact terms needs no rounding
    finite = integer_offset or s.exact_length is not None
    exact = finite and w.is_exact and all(c.is_exact for c in s.coeffs)
    if not exact:
        prec = prec or max(s.precision_bits or 0, DEFAULT_PRECISION)
        w = w.to_precision(prec)
    stop_at = s.exact_length
    if integer_offset:
        m = int(w.as_fractions()[0]) + 1
        stop_at = m if stop_at is None else min(stop_at, m)
    total = Scalar.exact(0)
    b = Scalar.exact(1) if exact else Scalar.floating(1, prec)
    prev_small = False
    used, last_mag, threshold, converged = 0, math.inf, math.inf, False
    for k, c in enumerate(s.coeffs):
        term = b * c
        total = total + term
        used = k + 1
        last_mag = float(term.magnitude())
        threshold = tol * (1 + float(total.magnitude()))
        if stop_at is not None and used >= stop_at:
            last_mag, converged = 0.0, True
            break
        small = last_mag < threshold
        if k >= MIN_TERMS and small and prev_small:
            converged = True
            break
        prev_small = small
        b = b * (w - k) / (k + 1)
    tail, verdict = None, "not_computed"
    if s.f.laplace_signal is not None:
        report = binomial_majorant(z, s.z0, max(2000, 2 * used))
        verdict = report.verdict
        if verdict == "converging":
            tail = report.tail(used) * signal_weight(s.f, s.z0)
    return total, EvalDiagnostics(used, last_mag, threshold, converged, tail, verdict)


def rational_newton_series(r, z0, max_terms: int = 500,
                        policy: PrecisionPolicy | None = None) -> NewtonSeries:
    """Validate the center against every pole, then build the series of ``r``.

    The center must satisfy ``Re z0 > max(0, Re pole)`` for the poles of each
    proper term of the partial fraction decomposition; the first offending
    pole is named in the error.
    """
    if isinstance(r, str):
        r = parse_rational(r)
    if not isinstance(r, RationalFunction):
        raise TypeError("rational_newton_series takes a rational function")
    z0 = as_scalar(z0)
    x0 = z0.real
    if not x0 > 0:
        raise RegionError(f"center Re(z0) = {x0} must be strictly greater than 0")
    decomposition = partial_fractions(r)
    for p, q in decomposition.proper_terms:
        for sigma, _ in poles(RationalFunction(p, q)):
            if not sigma.real < x0:
                raise RegionError(f"pole {sigma} of {r} has Re = {sigma.real} >= Re(z0) = {x0}")
    return build_newton_series(rational_handle(r), z0, max_terms, policy)
