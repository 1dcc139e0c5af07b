"""Poles and partial fraction decomposition of rational functions.

Denominators are factored over the rationals first (exact), so rational
poles come out exact and multiplicities are known without numerics. Each
remaining irreducible factor of degree two or more is solved numerically
at the requested precision and its roots are polished with Newton steps.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

from ..numerics import DEFAULT_PRECISION, Scalar
from .polynomial import Polynomial, poly_xgcd
from .rational import RationalFunction


class RootFindingError(ArithmeticError):
    """Numerical root isolation failed for one irreducible factor."""

    def __init__(self, factor: Polynomial, reason: str):
        self.factor = factor
        super().__init__(f"root finding failed for factor {factor}: {reason}")


@lru_cache(maxsize=256)
def factor_rational(p: Polynomial) -> tuple[tuple[Polynomial, int], ...]:
    """Monic irreducible factors over Q with multiplicities.

    The constant content is dropped: the product of ``q**e`` is ``p.monic()``.
    """
    if p.degree <= 0:
        return ()
    if p.degree == 1:
        return ((p.monic(), 1),)
    import sympy

    z = sympy.Symbol("z")
    expr = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(p.coeffs)],
                      z, domain=sympy.QQ)
    _, factors = expr.factor_list()
    out = []
    for f, e in factors:
        cs = [Fraction(int(c.p), int(c.q)) for c in reversed(f.all_coeffs())]
        out.append((Polynomial(cs).monic(), int(e)))
    out.sort(key=lambda fe: (fe[0].degree, fe[0].coeffs))
    return tuple(out)


def _isolate_roots(q: Polynomial, prec: int) -> list[Scalar]:
    """All complex roots of an irreducible (hence squarefree) factor."""
    tol = mpmath.mpf(2) ** (-(prec - 16))
    with mpmath.workprec(prec + 32):
        coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in q.to_mpmath()]
        try:
            roots = mpmath.polyroots(coeffs, maxsteps=200 + 20 * q.degree,
                                     extraprec=2 * prec, error=False)
        except mpmath.libmp.NoConvergence as exc:
            raise RootFindingError(q, str(exc)) from exc
        dq = q.derivative()
        dcoeffs = [mpmath.mpf(c.numerator) / c.denominator for c in dq.to_mpmath()]
        polished = []
        for r in roots:
            r = mpmath.mpc(r)
            for _ in range(8):
                step = mpmath.polyval(coeffs, r) / mpmath.polyval(dcoeffs, r)
                r -= step
                if abs(step) <= tol * max(1, abs(r)):
                    break
            else:
                raise RootFindingError(q, "Newton polish did not settle")
            polished.append(r)
        # real coefficients: snap near-real roots and enforce conjugate symmetry
        out: list[Scalar] = []
        reals = [r for r in polished if abs(r.imag) <= tol * max(1, abs(r))]
        upper = [r for r in polished if r.imag > tol * max(1, abs(r))]
        if len(reals) + 2 * len(upper) != q.degree:
            raise RootFindingError(q, "roots are not conjugate-symmetric")
        for r in sorted(reals, key=lambda r: r.real):
            out.append(Scalar.floating(r.real, prec))
        for r in sorted(upper, key=lambda r: (r.real, r.imag)):
            out.append(Scalar.floating(r, prec))
            out.append(Scalar.floating(mpmath.conj(r), prec))
    return out


def poles(r: RationalFunction, prec: int = DEFAULT_PRECISION) -> list[tuple[Scalar, int]]:
    """Roots of the reduced denominator with multiplicities.

    Rational poles are exact; the others are floating at ``prec`` bits.
    """
    result: list[tuple[Scalar, int]] = []
    for q, e in factor_rational(r.denominator):
        if q.degree == 1:
            result.append((Scalar.exact(-q.coeffs[0]), e))
        else:
            result.extend((root, e) for root in _isolate_roots(q, prec))
    return result


@dataclass(frozen=True)
class PartialFractions:
    """``polynomial_part + sum(P_k / Q_k)`` with each ``Q_k`` a power of one
    irreducible factor and ``deg P_k < deg Q_k``."""

    polynomial_part: Polynomial
    proper_terms: tuple[tuple[Polynomial, Polynomial], ...]

    def recombine(self) -> RationalFunction:
        total = RationalFunction.from_polynomial(self.polynomial_part)
        for p, q in self.proper_terms:
            total = total + RationalFunction(p, q)
        return total

    def __str__(self) -> str:
        parts = [str(self.polynomial_part)] if not self.polynomial_part.is_zero() else []
        parts += [f"({p})/({q})" for p, q in self.proper_terms]
        return " + ".join(parts) if parts else "0"


def partial_fractions(r: RationalFunction) -> PartialFractions:
    """Exact decomposition over the rationals.

    >>> from newtonforge.functions.rational import parse_rational
    >>> str(partial_fractions(parse_rational("(z^2+2)/(z+1)")))
    'z - 1 + (3)/(z + 1)'
    """
    poly_part, rem = divmod(r.numerator, r.denominator)
    terms: list[tuple[Polynomial, Polynomial]] = []
    if rem.is_zero():
        return PartialFractions(poly_part, ())
    factors = factor_rational(r.denominator)
    den = r.denominator
    for q, e in factors:
        qe = q ** e
        cofactor = den // qe
        # rem/den = A/q^e + B/cofactor with A = rem * cofactor^{-1} mod q^e
        g, s, _ = poly_xgcd(cofactor, qe)
        if g.degree != 0:
            raise ArithmeticError("denominator factors are not coprime")
        a = (rem * s) % qe
        # q-adic expansion: a = c0 + c1 q + ... gives sum c_i / q^(e-i)
        digits = []
        for _ in range(e):
            a, c = divmod(a, q)
            digits.append(c)
        for i, c in enumerate(digits):
            if not c.is_zero():
                terms.append((c, q ** (e - i)))
    return PartialFractions(poly_part, tuple(terms))
