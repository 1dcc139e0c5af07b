"""Exact and adaptive-precision scalar arithmetic.

Every numeric value in the package is a :class:`Scalar`. A scalar is either
an exact Gaussian rational (a pair of :class:`fractions.Fraction`) or a
floating complex number carried as a pair of raw mpmath ``mpf`` tuples
together with the precision, in bits, at which it was produced. Floating
arithmetic goes through :mod:`mpmath.libmp` with an explicit precision per
operation, so no global context is touched.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from numbers import Rational
from typing import Iterable, Sequence

import mpmath
from mpmath import libmp

__all__ = [
    "DEFAULT_PRECISION",
    "PrecisionError",
    "PrecisionPolicy",
    "Scalar",
    "as_scalar",
    "binomial_exact",
    "compensated_sum",
    "generalized_binomial",
]

RND = libmp.round_nearest

#: precision used when a non-exact value has to be produced and nobody said how
DEFAULT_PRECISION = 113

ENV_PRECISION = "NEWTONFORGE_PRECISION"


class PrecisionError(ValueError):
    """An exact result was demanded but the computation cannot stay exact."""


def _raw_from_fraction(q: Fraction, prec: int):
    return libmp.from_rational(q.numerator, q.denominator, prec, RND)


def _raw_to_fraction(x) -> Fraction:
    if x in (libmp.finf, libmp.fninf, libmp.fnan):
        raise ValueError("non-finite value has no rational form")
    sign, man, exp, _ = x
    man = int(man)
    if sign:
        man = -man
    if exp >= 0:
        return Fraction(man << exp)
    return Fraction(man, 1 << -exp)


def _to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot read {value!r} as an exact rational")


class Scalar:
    """Immutable complex number, exact or floating.

    Construct with :meth:`exact`, :meth:`floating` or :func:`as_scalar`.
    Combining two exact scalars stays exact; combining with a floating
    scalar yields a floating result at the smaller of the precisions
    involved.
    """

    __slots__ = ("_re", "_im", "_prec")

    def __init__(self, re, im, prec: int | None):
        self._re = re
        self._im = im
        self._prec = prec

    # construction -----------------------------------------------------
    @classmethod
    def exact(cls, re=0, im=0) -> "Scalar":
        return cls(_to_fraction(re), _to_fraction(im), None)

    @classmethod
    def floating(cls, value, prec: int = DEFAULT_PRECISION) -> "Scalar":
        """Round ``value`` (number, mpmath value or Scalar) to ``prec`` bits."""
        if prec < 2:
            raise ValueError("precision must be at least 2 bits")
        if isinstance(value, Scalar):
            return value.to_precision(prec)
        if isinstance(value, (int, Fraction)) or isinstance(value, Rational):
            q = _to_fraction(value)
            return cls(_raw_from_fraction(q, prec), libmp.fzero, prec)
        if isinstance(value, mpmath.mpc):
            re_, im_ = value._mpc_
            return cls(libmp.normalize(*re_, prec, RND) if re_[1] else re_,
                       libmp.normalize(*im_, prec, RND) if im_[1] else im_, prec)
        if isinstance(value, mpmath.mpf):
            x = value._mpf_
            return cls(libmp.normalize(*x, prec, RND) if x[1] else x, libmp.fzero, prec)
        if isinstance(value, complex):
            return cls(libmp.from_float(value.real, prec, RND),
                       libmp.from_float(value.imag, prec, RND), prec)
        if isinstance(value, float):
            return cls(libmp.from_float(value, prec, RND), libmp.fzero, prec)
        raise TypeError(f"cannot convert {value!r} to Scalar")

    @classmethod
    def _raw(cls, z, prec: int) -> "Scalar":
        return cls(z[0], z[1], prec)

    @classmethod
    def parse(cls, text: str) -> "Scalar":
        """Read ``"3/4"``, ``"-0.25"``, ``"1+2i"``, ``"1/2-3/4i"`` or ``"i"`` exactly."""
        s = text.strip().replace(" ", "").replace("j", "i")
        if not s:
            raise ValueError("empty number")
        if not s.endswith("i"):
            return cls.exact(Fraction(s))
        body = s[:-1]
        # split at the last sign that is not the leading one or an exponent sign
        cut = None
        for pos in range(len(body) - 1, 0, -1):
            if body[pos] in "+-" and body[pos - 1] not in "eE":
                cut = pos
                break
        if cut is None:
            real, imag = "0", body
        else:
            real, imag = body[:cut], body[cut:]
        if imag in ("", "+"):
            imag = "1"
        elif imag == "-":
            imag = "-1"
        return cls.exact(Fraction(real), Fraction(imag))

    # inspection -------------------------------------------------------
    @property
    def is_exact(self) -> bool:
        return self._prec is None

    @property
    def precision_bits(self) -> int | None:
        return self._prec

    @property
    def real(self) -> "Scalar":
        if self._prec is None:
            return Scalar(self._re, Fraction(0), None)
        return Scalar(self._re, libmp.fzero, self._prec)

    @property
    def imag(self) -> "Scalar":
        if self._prec is None:
            return Scalar(self._im, Fraction(0), None)
        return Scalar(self._im, libmp.fzero, self._prec)

    def as_fractions(self) -> tuple[Fraction, Fraction]:
        """Exact (real, imaginary) parts; floating values convert without rounding."""
        if self._prec is None:
            return self._re, self._im
        return _raw_to_fraction(self._re), _raw_to_fraction(self._im)

    def is_real(self) -> bool:
        return (self._im == 0) if self._prec is None else (self._im == libmp.fzero)

    def is_zero(self) -> bool:
        if self._prec is None:
            return self._re == 0 and self._im == 0
        return self._re == libmp.fzero and self._im == libmp.fzero

    def _mp_parts(self, prec: int):
        if self._prec is None:
            return _raw_from_fraction(self._re, prec), _raw_from_fraction(self._im, prec)
        return self._re, self._im

    def to_mpc(self) -> mpmath.mpc:
        prec = self._prec or DEFAULT_PRECISION
        return mpmath.mp.make_mpc(self._mp_parts(prec))

    def to_mpf(self) -> mpmath.mpf:
        """Real part as an mpmath number (rounded to the scalar's precision)."""
        prec = self._prec or DEFAULT_PRECISION
        return mpmath.mp.make_mpf(self._mp_parts(prec)[0])

    def __complex__(self) -> complex:
        if self._prec is None:
            return complex(float(self._re), float(self._im))
        return complex(libmp.to_float(self._re), libmp.to_float(self._im))

    def __float__(self) -> float:
        if not self.is_real():
            raise TypeError("complex Scalar has no float value")
        if self._prec is None:
            return float(self._re)
        return libmp.to_float(self._re)

    def to_precision(self, prec: int) -> "Scalar":
        if self._prec is None:
            return Scalar(_raw_from_fraction(self._re, prec), _raw_from_fraction(self._im, prec), prec)
        re_, im_ = self._re, self._im
        return Scalar(libmp.normalize(*re_, prec, RND) if re_[1] else re_,
                      libmp.normalize(*im_, prec, RND) if im_[1] else im_, prec)

    def magnitude(self) -> mpmath.mpf:
        """|z| as an mpmath number; exponent range is unbounded, unlike float."""
        if self._prec is None:
            if self._im == 0:
                q = abs(self._re)
                return mpmath.mp.make_mpf(_raw_from_fraction(q, DEFAULT_PRECISION))
            prec = DEFAULT_PRECISION
        else:
            prec = self._prec
        return mpmath.mp.make_mpf(libmp.mpc_abs(self._mp_parts(prec), prec, RND))

    __abs__ = magnitude

    # arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            return other
        return as_scalar(other)

    def _pair(self, other: "Scalar"):
        if self._prec is None:
            prec = other._prec
        elif other._prec is None:
            prec = self._prec
        else:
            prec = min(self._prec, other._prec)
        return self._mp_parts(prec), other._mp_parts(prec), prec

    def __add__(self, other) -> "Scalar":
        other = self._coerce(other)
        if self._prec is None and other._prec is None:
            return Scalar(self._re + other._re, self._im + other._im, None)
        a, b, prec = self._pair(other)
        return Scalar._raw(libmp.mpc_add(a, b, prec, RND), prec)

    __radd__ = __add__

    def __sub__(self, other) -> "Scalar":
        other = self._coerce(other)
        if self._prec is None and other._prec is None:
            return Scalar(self._re - other._re, self._im - other._im, None)
        a, b, prec = self._pair(other)
        return Scalar._raw(libmp.mpc_sub(a, b, prec, RND), prec)

    def __rsub__(self, other) -> "Scalar":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Scalar":
        other = self._coerce(other)
        if self._prec is None and other._prec is None:
            a, b, c, d = self._re, self._im, other._re, other._im
            if b == 0 and d == 0:
                return Scalar(a * c, Fraction(0), None)
            return Scalar(a * c - b * d, a * d + b * c, None)
        x, y, prec = self._pair(other)
        return Scalar._raw(libmp.mpc_mul(x, y, prec, RND), prec)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Scalar":
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero Scalar")
        if self._prec is None and other._prec is None:
            a, b, c, d = self._re, self._im, other._re, other._im
            if d == 0:
                return Scalar(a / c, b / c, None)
            den = c * c + d * d
            return Scalar((a * c + b * d) / den, (b * c - a * d) / den, None)
        x, y, prec = self._pair(other)
        return Scalar._raw(libmp.mpc_div(x, y, prec, RND), prec)

    def __rtruediv__(self, other) -> "Scalar":
        return self._coerce(other) / self

    def __neg__(self) -> "Scalar":
        if self._prec is None:
            return Scalar(-self._re, -self._im, None)
        return Scalar(libmp.mpf_neg(self._re), libmp.mpf_neg(self._im), self._prec)

    def __pos__(self) -> "Scalar":
        return self

    def __pow__(self, k: int) -> "Scalar":
        if not isinstance(k, int):
            raise TypeError("Scalar powers are integer only")
        if self._prec is None:
            if k < 0:
                return Scalar.exact(1) / (self ** (-k))
            result = Scalar.exact(1)
            base = self
            while k:
                if k & 1:
                    result = result * base
                base = base * base
                k >>= 1
            return result
        return Scalar._raw(libmp.mpc_pow_int((self._re, self._im), k, self._prec, RND), self._prec)

    def conjugate(self) -> "Scalar":
        if self._prec is None:
            return Scalar(self._re, -self._im, None)
        return Scalar(self._re, libmp.mpf_neg(self._im), self._prec)

    def scale2(self, k: int) -> "Scalar":
        """Multiply by ``2**k`` exactly."""
        if self._prec is None:
            f = Fraction(2) ** k
            return Scalar(self._re * f, self._im * f, None)
        return Scalar(libmp.mpf_shift(self._re, k), libmp.mpf_shift(self._im, k), self._prec)

    # transcendental helpers (always floating) --------------------------
    def _float_parts(self, prec: int | None):
        prec = prec or self._prec or DEFAULT_PRECISION
        return self._mp_parts(prec), prec

    def exp(self, prec: int | None = None) -> "Scalar":
        if self.is_zero():
            return Scalar.exact(1) if self._prec is None else Scalar.floating(1, self._prec)
        z, prec = self._float_parts(prec)
        return Scalar._raw(libmp.mpc_exp(z, prec, RND), prec)

    def sqrt(self, prec: int | None = None) -> "Scalar":
        z, prec = self._float_parts(prec)
        return Scalar._raw(libmp.mpc_sqrt(z, prec, RND), prec)

    # comparison -------------------------------------------------------
    def __eq__(self, other) -> bool:
        if not isinstance(other, Scalar):
            try:
                other = as_scalar(other)
            except TypeError:
                return NotImplemented
        if self._prec is None and other._prec is None:
            return self._re == other._re and self._im == other._im
        return self.as_fractions() == other.as_fractions()

    def __hash__(self) -> int:
        return hash(self.as_fractions())

    def _real_key(self):
        if not self.is_real():
            raise TypeError("ordering is defined for real Scalars only")
        return self.as_fractions()[0]

    def __lt__(self, other) -> bool:
        return self._real_key() < self._coerce(other)._real_key()

    def __le__(self, other) -> bool:
        return self._real_key() <= self._coerce(other)._real_key()

    def __gt__(self, other) -> bool:
        return self._real_key() > self._coerce(other)._real_key()

    def __ge__(self, other) -> bool:
        return self._real_key() >= self._coerce(other)._real_key()

    # formatting -------------------------------------------------------
    def __str__(self) -> str:
        if self._prec is None:
            re_, im_ = self._re, self._im
            if im_ == 0:
                return str(re_)
            sign = "-" if im_ < 0 else "+"
            mag = abs(im_)
            imag = "i" if mag == 1 else f"{mag}i"
            if re_ == 0:
                return ("-" if im_ < 0 else "") + imag
            return f"{re_}{sign}{imag}"
        digits = max(1, int(self._prec * 0.30103))
        re_s = libmp.to_str(self._re, digits)
        if self._im == libmp.fzero:
            return re_s
        im_raw = self._im
        sign = "+"
        if im_raw[0]:
            sign, im_raw = "-", libmp.mpf_neg(im_raw)
        return f"{re_s}{sign}{libmp.to_str(im_raw, digits)}i"

    def __repr__(self) -> str:
        if self._prec is None:
            return f"Scalar.exact({self})" if self.is_real() else f"Scalar.exact('{self}')"
        return f"Scalar('{self}', prec={self._prec})"


def as_scalar(value, prec: int | None = None) -> Scalar:
    """Coerce numbers and strings to :class:`Scalar`.

    Integers, fractions and numeric strings become exact. Python floats and
    complex numbers become floating scalars at 53 bits (their native
    precision) unless ``prec`` is given.
    """
    if isinstance(value, Scalar):
        return value if prec is None else value.to_precision(prec)
    if isinstance(value, bool):
        value = int(value)
    if isinstance(value, (int, Fraction)) or isinstance(value, Rational):
        s = Scalar.exact(value)
        return s if prec is None else s.to_precision(prec)
    if isinstance(value, str):
        s = Scalar.parse(value)
        return s if prec is None else s.to_precision(prec)
    if isinstance(value, (float, complex)):
        return Scalar.floating(value, prec or 53)
    if isinstance(value, (mpmath.mpf, mpmath.mpc)):
        return Scalar.floating(value, prec or mpmath.mp.prec)
    raise TypeError(f"cannot convert {value!r} to Scalar")


# ---------------------------------------------------------------------------
# precision policy
# ---------------------------------------------------------------------------

_POLICY_RE = re.compile(r"^(auto|exact|fixed|\d+)(?::(\d+))?$")


@dataclass(frozen=True)
class PrecisionPolicy:
    """How much precision an order-n computation gets.

    ``auto`` runs an order-``n`` difference at ``n + guard_bits`` bits (the
    binomial weights reach ``2**n`` while interesting answers are O(1)) and
    stays exact whenever every sampled value is exact. ``exact`` refuses to
    round. ``fixed`` always rounds to ``bits``.
    """

    mode: str = "auto"
    bits: int | None = None
    guard_bits: int = 64

    def __post_init__(self):
        if self.mode not in ("auto", "exact", "fixed"):
            raise ValueError(f"unknown precision mode {self.mode!r}")
        if self.mode == "fixed" and (self.bits is None or self.bits < 2):
            raise ValueError("fixed precision needs bits >= 2")
        if self.guard_bits < 0:
            raise ValueError("guard_bits must be non-negative")

    @classmethod
    def parse(cls, text: str) -> "PrecisionPolicy":
        """``auto``, ``auto:96`` (guard bits), ``exact`` or a bit count like ``256``."""
        m = _POLICY_RE.match(text.strip().lower())
        if not m:
            raise ValueError(f"bad precision policy {text!r}")
        head, extra = m.groups()
        if head == "auto":
            return cls("auto", guard_bits=int(extra) if extra else 64)
        if head == "exact":
            return cls("exact")
        if head == "fixed":
            if not extra:
                raise ValueError("fixed precision needs a bit count, e.g. fixed:256")
            return cls("fixed", bits=int(extra))
        return cls("fixed", bits=int(head))

    @classmethod
    def default(cls) -> "PrecisionPolicy":
        env = os.environ.get(ENV_PRECISION)
        return cls.parse(env) if env else cls()

    def working_bits(self, n: int) -> int:
        if self.mode == "fixed":
            return self.bits
        return max(max(n, 0) + self.guard_bits, 53)

    @property
    def allows_exact(self) -> bool:
        return self.mode in ("auto", "exact")

    def __str__(self) -> str:
        if self.mode == "fixed":
            return str(self.bits)
        if self.mode == "auto" and self.guard_bits != 64:
            return f"auto:{self.guard_bits}"
        return self.mode


# ---------------------------------------------------------------------------
# binomials and summation
# ---------------------------------------------------------------------------

def binomial_exact(n: int, k: int) -> int:
    """C(n, k) for non-negative integers; zero when ``k > n``."""
    if n < 0 or k < 0:
        raise ValueError("binomial_exact takes non-negative arguments")
    if k > n:
        return 0
    return math.comb(n, k)


def generalized_binomial(z, k: int) -> Scalar:
    """z(z-1)...(z-k+1)/k! by the product recurrence; exact for exact ``z``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    z = as_scalar(z)
    if z.is_exact and z.is_real():
        zq = z.as_fractions()[0]
        acc = Fraction(1)
        for j in range(k):
            acc = acc * (zq - j) / (j + 1)
        return Scalar.exact(acc)
    acc = Scalar.exact(1) if z.is_exact else Scalar.floating(1, z.precision_bits)
    for j in range(k):
        acc = acc * (z - j) / (j + 1)
    return acc


def _lcm(values: Iterable[int]) -> int:
    return reduce(math.lcm, values, 1)


def _exact_sum(terms: Sequence[Scalar]) -> Scalar:
    # one reduction over the common denominator instead of pairwise gcds
    re_parts = [t._re for t in terms]
    im_parts = [t._im for t in terms]

    def total(parts):
        den = _lcm(q.denominator for q in parts)
        return Fraction(sum(q.numerator * (den // q.denominator) for q in parts), den)

    return Scalar(total(re_parts), total(im_parts), None)


def _fixed_components(x):
    """(signed mantissa, exponent) of a finite raw mpf."""
    if x == libmp.fzero:
        return 0, 0
    if x in (libmp.finf, libmp.fninf, libmp.fnan):
        raise ValueError("cannot sum non-finite values")
    sign, man, exp, _ = x
    man = int(man)
    return (-man if sign else man), exp


def _exact_float_total(parts) -> tuple[int, int]:
    comps = [_fixed_components(x) for x in parts]
    comps = [c for c in comps if c[0]]
    if not comps:
        return 0, 0
    low = min(e for _, e in comps)
    return sum(m << (e - low) for m, e in comps), low


def compensated_sum(terms: Sequence[Scalar], prec: int | None = None) -> Scalar:
    """Sum scalars with a single final rounding.

    Exact inputs give the exact sum. Floating inputs are accumulated exactly
    as big integers and rounded once to ``prec`` (default: the smallest input
    precision), so the result does not depend on term order.
    """
    terms = [as_scalar(t) for t in terms]
    if not terms:
        return Scalar.exact(0)
    if all(t.is_exact for t in terms):
        return _exact_sum(terms)
    precs = [t.precision_bits for t in terms if not t.is_exact]
    if prec is None:
        prec = min(precs)
    parts = [t if not t.is_exact else t.to_precision(max(precs) + 64) for t in terms]
    re_man, re_exp = _exact_float_total([t._re for t in parts])
    im_man, im_exp = _exact_float_total([t._im for t in parts])
    return Scalar(libmp.from_man_exp(re_man, re_exp, prec, RND),
                  libmp.from_man_exp(im_man, im_exp, prec, RND), prec)


# ---------------------------------------------------------------------------
# fixed-point blocks used by difference tables
# ---------------------------------------------------------------------------

class FixedBlock:
    """A list of scalars rescaled to integers over one common scale.

    Exact scalars share their least common denominator; floating scalars are
    aligned to a common binary exponent ``prec`` bits below the largest
    magnitude. Integer differences of such blocks are exact, so a Pascal
    table built on them only carries the rounding of its inputs.
    """

    __slots__ = ("re", "im", "denominator", "exponent", "prec")

    def __init__(self, values: Sequence[Scalar], prec: int | None):
        if prec is None:
            self.prec = None
            self.exponent = 0
            den = _lcm(q.denominator for v in values for q in (v._re, v._im))
            self.denominator = den
            self.re = [v._re.numerator * (den // v._re.denominator) for v in values]
            self.im = [v._im.numerator * (den // v._im.denominator) for v in values]
            return
        self.prec = prec
        self.denominator = 1
        comps = [(_fixed_components(v._re), _fixed_components(v._im)) for v in values]
        top = None
        for (mr, er), (mi, ei) in comps:
            for m, e in ((mr, er), (mi, ei)):
                if m:
                    t = e + abs(m).bit_length()
                    top = t if top is None else max(top, t)
        low = (top if top is not None else 0) - prec - 8
        self.exponent = low

        def align(m, e):
            if not m:
                return 0
            shift = e - low
            if shift >= 0:
                return m << shift
            # round half away from zero; inputs already carry prec bits
            q, r = divmod(abs(m), 1 << -shift)
            if 2 * r >= (1 << -shift):
                q += 1
            return q if m > 0 else -q

        self.re = [align(*c[0]) for c in comps]
        self.im = [align(*c[1]) for c in comps]

    def scalar(self, re_int: int, im_int: int) -> Scalar:
        if self.prec is None:
            return Scalar(Fraction(re_int, self.denominator), Fraction(im_int, self.denominator), None)
        return Scalar(libmp.from_man_exp(re_int, self.exponent, self.prec, RND),
                      libmp.from_man_exp(im_int, self.exponent, self.prec, RND), self.prec)

    @property
    def has_imaginary(self) -> bool:
        return any(self.im)
