"""Dense univariate polynomials with exact rational coefficients."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from ..numerics import Scalar, as_scalar


class Polynomial:
    """Polynomial in ``z`` with :class:`Fraction` coefficients, ascending degree.

    Trailing zeros are stripped, so the leading coefficient is nonzero unless
    the polynomial is identically zero (empty coefficient tuple, degree -1).
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [c if isinstance(c, Fraction) else Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def constant(cls, c) -> "Polynomial":
        return cls([c])

    @classmethod
    def z(cls) -> "Polynomial":
        return cls([0, 1])

    @classmethod
    def from_roots(cls, roots: Iterable) -> "Polynomial":
        p = cls([1])
        for r in roots:
            p = p * cls([-Fraction(r), 1])
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial([other])
        return isinstance(other, Polynomial) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    # ring operations ----------------------------------------------------
    @staticmethod
    def _lift(other) -> "Polynomial":
        return other if isinstance(other, Polynomial) else Polynomial([other])

    def __add__(self, other) -> "Polynomial":
        other = self._lift(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return Polynomial([x + (b[i] if i < len(b) else 0) for i, x in enumerate(a)])

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial([-c for c in self.coeffs])

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._lift(other) - self

    def __mul__(self, other) -> "Polynomial":
        other = self._lift(other)
        if not self.coeffs or not other.coeffs:
            return Polynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative polynomial power")
        result, base = Polynomial([1]), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __divmod__(self, other) -> tuple["Polynomial", "Polynomial"]:
        other = self._lift(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lead = other.leading
        quot = [Fraction(0)] * max(len(rem) - dq, 0)
        for i in range(len(rem) - 1, dq - 1, -1):
            c = rem[i] / lead
            if c:
                quot[i - dq] = c
                for j, b in enumerate(other.coeffs):
                    rem[i - dq + j] -= c * b
        return Polynomial(quot), Polynomial(rem[:dq] if dq > 0 else [])

    def __floordiv__(self, other) -> "Polynomial":
        return divmod(self, other)[0]

    def __mod__(self, other) -> "Polynomial":
        return divmod(self, other)[1]

    def monic(self) -> "Polynomial":
        if self.is_zero():
            return self
        lead = self.leading
        return Polynomial([c / lead for c in self.coeffs])

    def derivative(self) -> "Polynomial":
        return Polynomial([i * c for i, c in enumerate(self.coeffs)][1:])

    def shift(self, a) -> "Polynomial":
        """p(z + a) by repeated synthetic division (Taylor shift)."""
        a = Fraction(a)
        cs = list(self.coeffs)
        n = len(cs)
        for i in range(n):
            for j in range(n - 2, i - 1, -1):
                cs[j] += a * cs[j + 1]
        return Polynomial(cs)

    # evaluation ---------------------------------------------------------
    def __call__(self, z):
        """Horner evaluation at a Fraction, int or :class:`Scalar`."""
        if isinstance(z, (int, Fraction)):
            acc = Fraction(0)
            for c in reversed(self.coeffs):
                acc = acc * z + c
            return acc
        z = as_scalar(z)
        if z.is_exact and z.is_real():
            return Scalar.exact(self(z.as_fractions()[0]))
        acc = Scalar.exact(0)
        for c in reversed(self.coeffs):
            acc = acc * z + Scalar.exact(c)
        return acc

    def to_mpmath(self):
        """Coefficients in descending order, as used by mpmath.polyroots."""
        return list(reversed(self.coeffs))

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            mag = abs(c)
            if i == 0:
                body = str(mag)
            else:
                mono = "z" if i == 1 else f"z^{i}"
                if mag == 1:
                    body = mono
                elif mag.denominator == 1:
                    body = f"{mag}*{mono}"
                else:
                    body = f"({mag})*{mono}"
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
        return "".join(parts)

    def __repr__(self) -> str:
        return f"Polynomial([{', '.join(str(c) for c in self.coeffs)}])"


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic greatest common divisor (zero only when both inputs are zero)."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def poly_xgcd(a: Polynomial, b: Polynomial) -> tuple[Polynomial, Polynomial, Polynomial]:
    """(g, s, t) with s*a + t*b = g, g monic."""
    r0, r1 = a, b
    s0, s1 = Polynomial([1]), Polynomial()
    t0, t1 = Polynomial(), Polynomial([1])
    while not r1.is_zero():
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    lead = r0.leading
    if lead == 0:
        return r0, s0, t0
    return r0.monic(), s0 * (1 / lead), t0 * (1 / lead)
