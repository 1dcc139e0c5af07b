"""Forward, backward and central differences, binomial sums and tables.

Every operator samples ``f`` at its nodes under a :class:`PrecisionPolicy`.
If all samples are exact (rational functions at rational nodes) the result
is exact; otherwise the samples are produced at the policy's working
precision, which in ``auto`` mode is ``n + 64`` bits so that the ``2**n``
scale binomial weights cannot eat the answer.

Two routes compute the same numbers. The direct operators form the
binomial sum once with exact weights and a single rounding at the end.
:class:`DifferenceTable` and :func:`leading_differences` instead run the
Pascal recurrence on integers (see :class:`~newtonforge.numerics.FixedBlock`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
from mpmath import libmp

from .functions.handles import FourierPair, FunctionHandle, lookup, rational_handle
from .functions.rational import PoleError, RationalFunction
from .numerics import (
    DEFAULT_PRECISION,
    FixedBlock,
    PrecisionError,
    PrecisionPolicy,
    Scalar,
    as_scalar,
    binomial_exact,
    compensated_sum,
)

__all__ = [
    "AsymptoticReport",
    "DifferenceTable",
    "ProfileTooShortError",
    "as_handle",
    "asymptotic_profile",
    "backward_difference",
    "binomial_sum",
    "central_difference",
    "difference_table",
    "forward_difference",
    "leading_differences",
    "modulate",
]

VARIANTS = ("forward", "backward", "central")


class ProfileTooShortError(ValueError):
    pass


def as_handle(f) -> FunctionHandle:
    """Accept a handle, a catalog name or expression, a RationalFunction, or a callable."""
    if isinstance(f, FunctionHandle):
        return f
    if isinstance(f, str):
        return lookup(f)
    if isinstance(f, RationalFunction):
        return rational_handle(f)
    if callable(f):
        name = getattr(f, "__name__", "callable")
        return FunctionHandle(name, lambda z, prec: as_scalar(f(z)), exact=True)
    raise TypeError(f"cannot use {f!r} as a function")


def _step(h) -> Scalar:
    h = as_scalar(h)
    if not h.is_real() or not h > 0:
        raise ValueError(f"step h must be a positive real number, got {h}")
    return h


def _check_order(n: int) -> int:
    if not isinstance(n, int) or n < 0:
        raise ValueError(f"order n must be a non-negative integer, got {n!r}")
    return n


def sample(f: FunctionHandle, nodes: Sequence[Scalar], order: int,
           policy: PrecisionPolicy | None = None) -> tuple[list[Scalar], int | None]:
    """Evaluate ``f`` at ``nodes`` for an order-``order`` computation.

    Returns the values and the working precision (``None`` when every value
    is exact and the policy allows it).
    """
    policy = policy or PrecisionPolicy.default()
    prec = policy.working_bits(order)
    if policy.mode == "fixed":
        nodes = [x.to_precision(prec) for x in nodes]
    values = []
    for x in nodes:
        try:
            values.append(f(x, prec))
        except PoleError as exc:
            raise PoleError(f"cannot evaluate {f.name} at node {x}: {exc}", x) from exc
    if all(v.is_exact for v in values):
        if policy.allows_exact:
            return values, None
        return [v.to_precision(prec) for v in values], prec
    if policy.mode == "exact":
        raise PrecisionError(f"{f.name} does not give exact values at the requested nodes")
    return [v if not v.is_exact else v.to_precision(prec) for v in values], prec


def _base_point(z, order: int, policy: PrecisionPolicy | None) -> Scalar:
    z = as_scalar(z)
    if not z.is_exact:
        # widen (exactly) so that node arithmetic runs at working precision
        z = z.to_precision((policy or PrecisionPolicy.default()).working_bits(order))
    return z


def _nodes(z: Scalar, h: Scalar, offsets: Sequence[Fraction]) -> list[Scalar]:
    return [z + h * Scalar.exact(o) for o in offsets]


def _signed_sum(f, z, h, n, offsets, signs, policy) -> Scalar:
    f = as_handle(f)
    n = _check_order(n)
    h = _step(h)
    z = _base_point(z, n, policy)
    values, prec = sample(f, _nodes(z, h, offsets), n, policy)
    terms = [v * (binomial_exact(n, k) * s) for k, (v, s) in enumerate(zip(values, signs))]
    return compensated_sum(terms, prec)


def forward_difference(f, z, h, n: int, policy: PrecisionPolicy | None = None) -> Scalar:
    """``sum_k C(n,k) (-1)^(n-k) f(z + k h)``.

    >>> str(forward_difference("1/(z+1)", 0, 1, 3))
    '-1/4'
    """
    return _signed_sum(f, z, h, n, [Fraction(k) for k in range(n + 1)],
                       [(-1) ** (n - k) for k in range(n + 1)], policy)


def backward_difference(f, z, h, n: int, policy: PrecisionPolicy | None = None) -> Scalar:
    """``sum_k C(n,k) (-1)^k f(z - k h)``."""
    return _signed_sum(f, z, h, n, [Fraction(-k) for k in range(n + 1)],
                       [(-1) ** k for k in range(n + 1)], policy)


def central_difference(f, z, h, n: int, policy: PrecisionPolicy | None = None) -> Scalar:
    """``sum_k C(n,k) (-1)^k f(z + (n/2 - k) h)``; odd ``n`` samples half steps."""
    return _signed_sum(f, z, h, n, [Fraction(n, 2) - k for k in range(n + 1)],
                       [(-1) ** k for k in range(n + 1)], policy)


def binomial_sum(f, y, h, n: int, variant: str = "forward",
                 policy: PrecisionPolicy | None = None) -> Scalar:
    """Plus-sign sum ``sum_k C(n,k) f(node_k)`` with the nodes of ``variant``.

    >>> str(binomial_sum("1/(z+1)", 0, 1, 3))
    '15/4'
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    if variant == "forward":
        offsets = [Fraction(k) for k in range(n + 1)]
    elif variant == "backward":
        offsets = [Fraction(-k) for k in range(n + 1)]
    else:
        offsets = [Fraction(n, 2) - k for k in range(n + 1)]
    return _signed_sum(f, y, h, n, offsets, [1] * (n + 1), policy)


# ---------------------------------------------------------------------------
# Pascal tables
# ---------------------------------------------------------------------------

def _pascal_leading(ints: list[int]) -> list[int]:
    out = []
    row = ints
    while row:
        out.append(row[0])
        row = [b - a for a, b in zip(row, row[1:])]
    return out


class DifferenceTable:
    """Triangle ``rows[n][j] = Delta_h^n f(z + j h)`` for ``n + j <= n_max``.

    Built with the Pascal recurrence on integers, so in exact mode each entry
    is exact and in floating mode only the rounding of the samples remains.
    """

    def __init__(self, f: FunctionHandle, z: Scalar, h: Scalar, n_max: int,
                 policy: PrecisionPolicy | None = None):
        self.f = f
        self.z = z
        self.h = h
        self.n_max = n_max
        nodes = _nodes(z, h, [Fraction(j) for j in range(n_max + 1)])
        values, self.precision_bits = sample(f, nodes, n_max, policy)
        block = FixedBlock(values, self.precision_bits)
        self._block = block
        self._re = self._triangle(block.re)
        self._im = self._triangle(block.im) if block.has_imaginary else None

    @staticmethod
    def _triangle(row: list[int]) -> list[list[int]]:
        rows = [row]
        while len(row) > 1:
            row = [b - a for a, b in zip(row, row[1:])]
            rows.append(row)
        return rows

    @property
    def exact(self) -> bool:
        return self.precision_bits is None

    def __getitem__(self, index: tuple[int, int]) -> Scalar:
        n, j = index
        if n < 0 or j < 0 or n + j > self.n_max:
            raise IndexError(f"({n}, {j}) is outside the table (n + j <= {self.n_max})")
        im = self._im[n][j] if self._im is not None else 0
        return self._block.scalar(self._re[n][j], im)

    def row(self, n: int) -> list[Scalar]:
        return [self[n, j] for j in range(self.n_max - n + 1)]

    @property
    def rows(self) -> list[list[Scalar]]:
        return [self.row(n) for n in range(self.n_max + 1)]

    def leading(self) -> list[Scalar]:
        """``Delta_h^n f(z)`` for ``n = 0..n_max``."""
        return [self[n, 0] for n in range(self.n_max + 1)]


def difference_table(f, z, h, n_max: int, policy: PrecisionPolicy | None = None) -> DifferenceTable:
    f = as_handle(f)
    n_max = _check_order(n_max)
    return DifferenceTable(f, _base_point(z, n_max, policy), _step(h), n_max, policy)


def leading_differences(f, z, h, n_max: int,
                        policy: PrecisionPolicy | None = None) -> list[Scalar]:
    """``[Delta_h^n f(z) for n in 0..n_max]`` without storing the whole table."""
    f = as_handle(f)
    n_max = _check_order(n_max)
    h = _step(h)
    z = _base_point(z, n_max, policy)
    values, prec = sample(f, _nodes(z, h, [Fraction(j) for j in range(n_max + 1)]), n_max, policy)
    block = FixedBlock(values, prec)
    re = _pascal_leading(block.re)
    im = _pascal_leading(block.im) if block.has_imaginary else [0] * len(re)
    return [block.scalar(a, b) for a, b in zip(re, im)]


# ---------------------------------------------------------------------------
# modulation
# ---------------------------------------------------------------------------

_I_POWERS = [Scalar.exact(1), Scalar.exact(0, 1), Scalar.exact(-1), Scalar.exact(0, -1)]


def unit_phase(t: Scalar, prec: int = DEFAULT_PRECISION) -> Scalar:
    """``exp(i pi t)``; exact when ``2t`` is an integer."""
    if t.is_exact and t.is_real():
        q = 2 * t.as_fractions()[0]
        if q.denominator == 1:
            return _I_POWERS[int(q) % 4]
    work = prec + 16
    pi = Scalar(libmp.mpf_pi(work), libmp.fzero, work)
    return (Scalar.exact(0, 1) * pi * t.to_precision(work)).exp(work).to_precision(prec)


def modulate(f, h) -> FunctionHandle:
    """``alpha(y) = exp(i pi y / h) f(y)``.

    Turns plus-sign binomial sums of ``f`` into signed differences of
    ``alpha``. The phase is exact at nodes where ``2y/h`` is an integer.
    """
    f = as_handle(f)
    h = _step(h)

    def evaluate(y: Scalar, prec: int) -> Scalar:
        return unit_phase(y / h, prec) * f(y, prec)

    pair = None
    if f.fourier_pair is not None:
        base = f.fourier_pair
        shift = 1 / (2 * float(h))
        pair = FourierPair(
            f"modulated {base.name}",
            lambda x: base.inverse(x + shift),
            cutoff=(lambda eps: base.cutoff(eps) + shift) if base.cutoff else None,
            periodized=(lambda x, period: base.periodized(x + shift, period)) if base.periodized else None,
            strip=base.strip,
        )
    return FunctionHandle(f"exp(i*pi*y/{h})*{f.name}", evaluate, exact=f.exact, fourier_pair=pair)


# ---------------------------------------------------------------------------
# asymptotics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AsymptoticReport:
    """Growth diagnostics for a sequence indexed from ``n = 0``.

    ``normalized[n]`` is ``|raw[n]| / 2**n`` as an mpmath number, so huge
    and tiny values keep their exponent.
    """

    raw: tuple[Scalar, ...]
    normalized: tuple[mpmath.mpf, ...]
    verdict: str
    evidence: dict = field(default_factory=dict)


def asymptotic_profile(values: Sequence) -> AsymptoticReport:
    """Classify a sequence by comparing its leading and trailing quartiles.

    Checks run in order: ``tends_to_zero`` (trailing raw max below 1e-6 of
    the leading raw max, or of 1 when that is 0), ``little_o_2n_only``
    (normalized trailing max below 1e-3 of the normalized leading max),
    ``divergent`` (trailing raw max above 10 times the leading raw max),
    otherwise ``inconclusive``.
    """
    raw = tuple(as_scalar(v) for v in values)
    if len(raw) < 16:
        raise ProfileTooShortError(f"need at least 16 values, got {len(raw)}")
    mags = [v.magnitude() for v in raw]
    normalized = tuple(mpmath.ldexp(m, -n) for n, m in enumerate(mags))
    q = len(raw) // 4
    lead, trail = slice(0, q), slice(len(raw) - q, len(raw))
    lead_raw, trail_raw = max(mags[lead]), max(mags[trail])
    lead_norm, trail_norm = max(normalized[lead]), max(normalized[trail])
    evidence = {
        "window": q,
        "leading_raw_max": lead_raw,
        "trailing_raw_max": trail_raw,
        "leading_normalized_max": lead_norm,
        "trailing_normalized_max": trail_norm,
        "last_raw": mags[-1],
    }
    reference = lead_raw if lead_raw > 0 else 1
    if trail_raw < mpmath.mpf("1e-6") * reference:
        verdict = "tends_to_zero"
    elif lead_norm > 0 and trail_norm < mpmath.mpf("1e-3") * lead_norm:
        verdict = "little_o_2n_only"
    elif trail_raw > 10 * lead_raw:
        verdict = "divergent"
    else:
        verdict = "inconclusive"
    return AsymptoticReport(raw, normalized, verdict, evidence)
