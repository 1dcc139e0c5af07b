"""Rational functions with exact coefficients, and a small expression parser.

Grammar (ASCII, whitespace ignored)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := ('+' | '-') factor | base ('^' uint)?
    base   := 'z' | number | '(' expr ')'

Numbers are integers or decimals (``2.5`` reads as exactly 5/2). A fraction
literal such as ``3/4`` is simply a division, so ``2/3^2`` is ``2/9``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..numerics import as_scalar
from .polynomial import Polynomial, poly_gcd


class ExpressionError(ValueError):
    """Malformed expression; ``position`` is the 0-based character offset."""

    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class PoleError(ZeroDivisionError):
    """A rational function was evaluated at (or numerically on top of) a pole."""

    def __init__(self, message: str, node=None):
        self.node = node
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class RationalFunction:
    """``numerator / denominator`` in lowest terms with a monic denominator."""

    numerator: Polynomial
    denominator: Polynomial

    def __post_init__(self):
        num, den = self.numerator, self.denominator
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        g = poly_gcd(num, den)
        if g.degree > 0:
            num, den = num // g, den // g
        lead = den.leading
        if lead != 1:
            num = num * (1 / lead)
            den = den.monic()
        if num.is_zero():
            den = Polynomial([1])
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "denominator", den)

    @classmethod
    def from_polynomial(cls, p: Polynomial) -> "RationalFunction":
        return cls(p, Polynomial([1]))

    @classmethod
    def lift(cls, x) -> "RationalFunction":
        if isinstance(x, RationalFunction):
            return x
        if isinstance(x, Polynomial):
            return cls.from_polynomial(x)
        return cls(Polynomial([Fraction(x)]), Polynomial([1]))

    @property
    def is_polynomial(self) -> bool:
        return self.denominator.degree == 0

    @property
    def is_proper(self) -> bool:
        return self.numerator.degree < self.denominator.degree

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalFunction):
            try:
                other = RationalFunction.lift(other)
            except (TypeError, ValueError):
                return NotImplemented
        return (self.numerator == other.numerator
                and self.denominator == other.denominator)

    def __hash__(self) -> int:
        return hash((self.numerator, self.denominator))

    def __add__(self, other) -> "RationalFunction":
        o = RationalFunction.lift(other)
        return RationalFunction(self.numerator * o.denominator + o.numerator * self.denominator,
                                self.denominator * o.denominator)

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.numerator, self.denominator)

    def __sub__(self, other) -> "RationalFunction":
        return self + (-RationalFunction.lift(other))

    def __rsub__(self, other) -> "RationalFunction":
        return RationalFunction.lift(other) - self

    def __mul__(self, other) -> "RationalFunction":
        o = RationalFunction.lift(other)
        return RationalFunction(self.numerator * o.numerator, self.denominator * o.denominator)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalFunction":
        o = RationalFunction.lift(other)
        if o.numerator.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.numerator * o.denominator, self.denominator * o.numerator)

    def __rtruediv__(self, other) -> "RationalFunction":
        return RationalFunction.lift(other) / self

    def __pow__(self, k: int) -> "RationalFunction":
        if k < 0:
            return RationalFunction.lift(1) / (self ** (-k))
        return RationalFunction(self.numerator ** k, self.denominator ** k)

    def __call__(self, z):
        """Evaluate at a number or :class:`Scalar`; exact input gives exact output."""
        if isinstance(z, (int, Fraction)):
            d = self.denominator(z)
            if d == 0:
                raise PoleError(f"pole of {self} at z = {z}", z)
            return self.numerator(z) / d
        z = as_scalar(z)
        d = self.denominator(z)
        if d.is_zero():
            raise PoleError(f"pole of {self} at z = {z}", z)
        return self.numerator(z) / d

    def __str__(self) -> str:
        return format_rational(self)

    def __repr__(self) -> str:
        return f"RationalFunction({format_rational(self)!r})"


def format_rational(r: RationalFunction) -> str:
    num = str(r.numerator)
    if r.is_polynomial:
        return num
    den = str(r.denominator)
    if len(r.numerator.coeffs) > 1 or r.numerator.leading < 0:
        num = f"({num})"
    return f"{num}/({den})"


# ---------------------------------------------------------------------------
# recursive-descent parser
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str, pos: int | None = None) -> ExpressionError:
        return ExpressionError(message, self.pos if pos is None else pos, self.text)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> RationalFunction:
        if not self.text.strip():
            raise self.error("empty expression", 0)
        value = self.expr()
        if self.peek():
            raise self.error(f"unexpected character {self.peek()!r}")
        return value

    def expr(self) -> RationalFunction:
        value = self.term()
        while self.peek() in ("+", "-") and self.peek():
            op = self.text[self.pos]
            self.pos += 1
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> RationalFunction:
        value = self.factor()
        while self.peek() in ("*", "/") and self.peek():
            op = self.text[self.pos]
            at = self.pos
            self.pos += 1
            rhs = self.factor()
            if op == "*":
                value = value * rhs
            else:
                if rhs.numerator.is_zero():
                    raise self.error("division by zero", at)
                value = value / rhs
        return value

    def factor(self) -> RationalFunction:
        c = self.peek()
        if c in ("+", "-") and c:
            self.pos += 1
            inner = self.factor()
            return -inner if c == "-" else inner
        value = self.base()
        if self.peek() == "^":
            self.pos += 1
            self.skip()
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            if start == self.pos:
                raise self.error("expected a non-negative integer exponent")
            exp = int(self.text[start:self.pos])
            if exp > 0 or not value.numerator.is_zero():
                value = value ** exp
            else:
                value = RationalFunction.lift(1)
        return value

    def base(self) -> RationalFunction:
        c = self.peek()
        if c == "z":
            self.pos += 1
            return RationalFunction.from_polynomial(Polynomial.z())
        if c == "(":
            open_at = self.pos
            self.pos += 1
            value = self.expr()
            if self.peek() != ")":
                raise self.error(f"unbalanced parenthesis opened at {open_at}")
            self.pos += 1
            return value
        if c.isdigit() or c == ".":
            return RationalFunction.lift(self.number())
        if not c:
            raise self.error("unexpected end of expression")
        raise self.error(f"unexpected character {c!r}")

    def number(self) -> Fraction:
        start = self.pos
        text = self.text
        while self.pos < len(text) and text[self.pos].isdigit():
            self.pos += 1
        if self.pos < len(text) and text[self.pos] == ".":
            self.pos += 1
            while self.pos < len(text) and text[self.pos].isdigit():
                self.pos += 1
        literal = text[start:self.pos]
        if literal == ".":
            raise self.error("malformed number", start)
        return Fraction(literal)


def parse_rational(text: str) -> RationalFunction:
    """Parse an expression in ``z`` into a reduced :class:`RationalFunction`.

    >>> parse_rational("(z^2-1)/(z-1)")
    RationalFunction('z + 1')
    """
    return _Parser(text).parse()

