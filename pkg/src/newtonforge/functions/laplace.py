"""Closed-form inverse Laplace transforms of rational functions.

A proper rational function with real coefficients inverts to a finite sum
of ``c * t**m * exp(a t) * cos(b t)`` / ``sin(b t)`` terms whose exponents
``a`` are pole real parts and frequencies ``b`` pole imaginary parts. A
polynomial part inverts to Dirac-delta derivatives at ``t = 0``, which are
carried through their Laplace images ``b * exp(-c z) * z**m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import mpmath
import numpy as np

from ..numerics import DEFAULT_PRECISION, Scalar, as_scalar, binomial_exact, compensated_sum
from .decomposition import poles
from .polynomial import Polynomial
from .rational import RationalFunction


class ImproperFunctionError(ValueError):
    """The operation needs a proper rational function (deg num < deg den)."""


@dataclass(frozen=True)
class SignalTerm:
    c: Scalar
    m: int
    a: Scalar
    b: Scalar
    phase: str = "cos"

    def __post_init__(self):
        if self.phase not in ("cos", "sin"):
            raise ValueError("phase must be 'cos' or 'sin'")
        if self.m < 0:
            raise ValueError("power of t must be non-negative")

    def key(self, digits: int = 30):
        return (self.m, mpmath.nstr(self.a.to_mpf(), digits), mpmath.nstr(self.b.to_mpf(), digits),
                self.phase)


@dataclass(frozen=True)
class ExpPolySignal:
    """Finite sum of ``c t^m e^{a t} cos|sin(b t)`` terms."""

    terms: tuple[SignalTerm, ...] = ()

    def __add__(self, other: "ExpPolySignal") -> "ExpPolySignal":
        return ExpPolySignal(self.terms + other.terms)

    def scaled(self, k) -> "ExpPolySignal":
        k = as_scalar(k)
        return ExpPolySignal(tuple(SignalTerm(t.c * k, t.m, t.a, t.b, t.phase) for t in self.terms))

    @property
    def abscissa(self) -> Scalar | None:
        """Largest exponent ``a``; ``None`` for the empty signal."""
        if not self.terms:
            return None
        return max((t.a for t in self.terms), key=lambda a: a.as_fractions()[0])

    def merged(self) -> "ExpPolySignal":
        """Combine terms sharing ``(m, a, b, phase)`` and drop zero terms."""
        groups: dict = {}
        for t in self.terms:
            groups.setdefault(t.key(), []).append(t)
        out = []
        for ts in groups.values():
            c = compensated_sum([t.c for t in ts])
            if not c.is_zero():
                t0 = ts[0]
                out.append(SignalTerm(c, t0.m, t0.a, t0.b, t0.phase))
        out.sort(key=lambda t: t.key())
        return ExpPolySignal(tuple(out))

    def _numpy_terms(self):
        return [(complex(t.c), t.m, float(t.a), float(t.b), t.phase) for t in self.terms]

    def __call__(self, t, dtype=np.float64):
        """Vectorised evaluation at real ``t >= 0``."""
        t = np.asarray(t, dtype=dtype)
        cdtype = np.result_type(dtype, np.complex64)
        out = np.zeros(t.shape, dtype=cdtype)
        for c, m, a, b, phase in self._numpy_terms():
            osc = np.cos(b * t) if phase == "cos" else np.sin(b * t)
            out += c * t ** m * np.exp(a * t) * osc
        return out

    def evaluate(self, t, prec: int = DEFAULT_PRECISION) -> Scalar:
        """Evaluate at one point with mpmath at ``prec`` bits."""
        with mpmath.workprec(prec):
            t = mpmath.mpf(as_scalar(t).to_mpf())
            total = mpmath.mpc(0)
            for term in self.terms:
                osc = mpmath.cos(term.b.to_mpf() * t) if term.phase == "cos" else \
                    mpmath.sin(term.b.to_mpf() * t)
                total += term.c.to_mpc() * t ** term.m * mpmath.exp(term.a.to_mpf() * t) * osc
            return Scalar.floating(total, prec)

    def laplace(self, z, prec: int = DEFAULT_PRECISION) -> Scalar:
        """Closed-form Laplace transform at ``z`` (needs Re z > abscissa)."""
        z = as_scalar(z).to_precision(prec)
        total = Scalar.floating(0, prec)
        for t in self.terms:
            sigma = t.a.to_precision(prec) + t.b.to_precision(prec) * Scalar.exact(0, 1)
            sigma_bar = sigma.conjugate()
            k = math.factorial(t.m)
            p = (z - sigma) ** (-(t.m + 1))
            q = (z - sigma_bar) ** (-(t.m + 1))
            if t.phase == "cos":
                piece = (p + q) * Fraction(k, 2)
            else:
                piece = (p - q) * Fraction(k, 2) / Scalar.exact(0, 1)
            total = total + t.c * piece
        return total

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for t in self.terms:
            bits = [f"({t.c})"]
            if t.m:
                bits.append("t" if t.m == 1 else f"t^{t.m}")
            if not t.a.is_zero():
                bits.append(f"exp({t.a}*t)")
            if not t.b.is_zero() or t.phase == "sin":
                bits.append(f"{t.phase}({t.b}*t)")
            parts.append("*".join(bits))
        return " + ".join(parts)


@lru_cache(maxsize=None)
def _stirling2(n: int, k: int) -> int:
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * _stirling2(n - 1, k) + _stirling2(n - 1, k - 1)


@dataclass(frozen=True)
class DeltaImageTerm:
    """Laplace image ``b * exp(-c z) * z**m`` of ``b * delta^(m)(t - c)``."""

    b: Scalar
    c: Scalar = field(default_factory=lambda: Scalar.exact(0))
    m: int = 0

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("derivative order must be non-negative")
        if self.c < 0:
            raise ValueError("delta shift must be non-negative")

    def _shift_factor(self, z: Scalar, prec: int) -> Scalar:
        if self.c.is_zero():
            return Scalar.exact(1)
        return (-(self.c * z)).exp(prec)

    def laplace_value(self, z, prec: int = DEFAULT_PRECISION) -> Scalar:
        z = as_scalar(z)
        return self.b * self._shift_factor(z, prec) * z ** self.m

    def forward_difference(self, z, h, n: int, prec: int = DEFAULT_PRECISION) -> Scalar:
        """Closed-form ``Delta_h^n`` of the image at ``z``.

        Expands ``(z + kh)^m`` binomially and uses
        ``sum_k C(n,k)(-1)^(n-k) e^{-ckh}(kh)^j
        = h^j sum_r C(n,r) r! S(j,r) (e^{-ch}-1)^(n-r) e^{-chr}``
        with Stirling numbers of the second kind, so no alternating sum over
        ``k`` is formed. Exact when ``c = 0`` and ``z``, ``h`` are exact.
        """
        z, h = as_scalar(z), as_scalar(h)
        if self.c.is_zero():
            a_base, b_base = Scalar.exact(0), Scalar.exact(1)
        else:
            b_base = (-(self.c * h)).exp(prec)
            a_base = b_base - 1
        total = Scalar.exact(0)
        for j in range(self.m + 1):
            s_j = Scalar.exact(0)
            for r in range(min(j, n) + 1):
                st = _stirling2(j, r)
                if not st or n - r < 0:
                    continue
                if a_base.is_zero() and n - r > 0:
                    continue
                weight = binomial_exact(n, r) * math.factorial(r) * st
                s_j = s_j + (a_base ** (n - r)) * (b_base ** r) * weight
            total = total + binomial_exact(self.m, j) * z ** (self.m - j) * h ** j * s_j
        return self.b * self._shift_factor(z, prec) * total


def _taylor_shift(coeffs: Sequence, sigma) -> list:
    """Coefficients of p(sigma + u) in u, ascending (mpmath arithmetic)."""
    cs = list(coeffs)
    n = len(cs)
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            cs[j] += sigma * cs[j + 1]
    return cs


def _laurent_head(ns: Sequence, ds: Sequence, mult: int) -> list:
    """First ``mult`` coefficients of the series ns/ds (ds[0] != 0)."""
    g = []
    for k in range(mult):
        acc = ns[k] if k < len(ns) else 0 * ds[0]
        for j in range(1, k + 1):
            if j < len(ds):
                acc = acc - ds[j] * g[k - j]
        g.append(acc / ds[0])
    return g


def _exact_pole_terms(r: RationalFunction, sigma: Scalar, mult: int) -> list[SignalTerm]:
    s = sigma.as_fractions()[0]
    ns = list(r.numerator.shift(s).coeffs)
    ds = list(r.denominator.shift(s).coeffs)[mult:]
    g = _laurent_head(ns, ds, mult)
    zero = Scalar.exact(0)
    return [SignalTerm(Scalar.exact(g[mult - j] / math.factorial(j - 1)), j - 1, sigma, zero, "cos")
            for j in range(1, mult + 1) if g[mult - j] != 0]


def inverse_laplace_rational(r: RationalFunction, prec: int = DEFAULT_PRECISION) -> ExpPolySignal:
    """Inverse Laplace transform of a proper rational function.

    Each pole ``s`` of multiplicity ``m`` contributes
    ``sum_j A_j t^(j-1) e^{s t} / (j-1)!`` where ``A_j`` are the Laurent
    coefficients at ``s``; conjugate pairs fold into real cos/sin terms.
    """
    if not r.is_proper:
        raise ImproperFunctionError(f"{r} is not proper")
    if r.numerator.is_zero():
        return ExpPolySignal()
    work = prec + 32
    terms: list[SignalTerm] = []
    with mpmath.workprec(work):
        num = [mpmath.mpf(c.numerator) / c.denominator for c in r.numerator.coeffs]
        den = [mpmath.mpf(c.numerator) / c.denominator for c in r.denominator.coeffs]
        for sigma_s, mult in poles(r, prec=work):
            if sigma_s.is_exact:
                terms.extend(_exact_pole_terms(r, sigma_s, mult))
                continue
            sigma = sigma_s.to_mpc()
            if sigma.imag < 0:
                continue
            ns = _taylor_shift([mpmath.mpc(c) for c in num], sigma)
            ds = _taylor_shift([mpmath.mpc(c) for c in den], sigma)[mult:]
            g = _laurent_head(ns, ds, mult)
            a = Scalar.floating(sigma.real, prec)
            b = Scalar.floating(sigma.imag, prec) if sigma.imag != 0 else Scalar.exact(0)
            negligible = max(abs(c) for c in g) * mpmath.mpf(2) ** (-prec)
            for j in range(1, mult + 1):
                coeff = g[mult - j] / math.factorial(j - 1)
                if abs(coeff.real) <= negligible:
                    coeff = mpmath.mpc(0, coeff.imag)
                if abs(coeff.imag) <= negligible:
                    coeff = mpmath.mpc(coeff.real, 0)
                if sigma.imag == 0:
                    if coeff.real:
                        terms.append(SignalTerm(Scalar.floating(coeff.real, prec), j - 1, a, b, "cos"))
                    continue
                if coeff.real:
                    terms.append(SignalTerm(Scalar.floating(2 * coeff.real, prec), j - 1, a, b, "cos"))
                if coeff.imag:
                    terms.append(SignalTerm(Scalar.floating(-2 * coeff.imag, prec), j - 1, a, b, "sin"))
    return ExpPolySignal(tuple(terms))


def polynomial_delta_terms(p: Polynomial) -> tuple[DeltaImageTerm, ...]:
    """``p(z) = sum b_m z^m`` as images of ``b_m delta^(m)(t)``."""
    return tuple(DeltaImageTerm(Scalar.exact(c), Scalar.exact(0), m)
                 for m, c in enumerate(p.coeffs) if c)
