"""Euler transformation of alternating series.

``sum_n (-1)^n f(n)`` is rewritten as ``sum_m (-1)^m Delta^m f(0) / 2^(m+1)``.
For exact ``f`` values every partial sum is an exact rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .differences import as_handle, leading_differences, sample
from .numerics import PrecisionPolicy, Scalar, as_scalar, compensated_sum

__all__ = ["AccelerationReport", "acceleration_report", "euler_transform"]


@dataclass(frozen=True)
class AccelerationReport:
    raw_partials: tuple[Scalar, ...]
    accel_partials: tuple[Scalar, ...]
    reference: Scalar | None = None
    raw_errors: tuple[mpmath.mpf, ...] | None = None
    accel_errors: tuple[mpmath.mpf, ...] | None = None
    rate_ratio: float | None = None


def _running(terms: list[Scalar]) -> tuple[Scalar, ...]:
    out, acc = [], Scalar.exact(0)
    for t in terms:
        acc = acc + t
        out.append(acc)
    return tuple(out)


def euler_transform(f, n_terms: int, policy: PrecisionPolicy | None = None) -> AccelerationReport:
    """Raw and transformed partial sums for indices ``0..n_terms``.

    >>> r = euler_transform("1", 3)
    >>> [str(p) for p in r.accel_partials]
    ['1/2', '1/2', '1/2', '1/2']
    """
    f = as_handle(f)
    if n_terms < 0:
        raise ValueError("n_terms must be non-negative")
    diffs = leading_differences(f, 0, 1, n_terms, policy)
    accel = [d.scale2(-(m + 1)) * (-1) ** m for m, d in enumerate(diffs)]
    values, _ = sample(f, [Scalar.exact(k) for k in range(n_terms + 1)], n_terms, policy)
    raw = [v * (-1) ** k for k, v in enumerate(values)]
    return AccelerationReport(_running(raw), _running(accel))


def _geometric_rate(errors) -> float | None:
    q = max(2, len(errors) // 4)
    window = errors[-q:]
    if len(window) < 2 or any(e == 0 for e in window):
        return None
    # geometric mean of consecutive ratios telescopes to the end-point ratio
    return float((window[-1] / window[0]) ** (mpmath.mpf(1) / (len(window) - 1)))


def acceleration_report(f, reference, n_terms: int,
                        policy: PrecisionPolicy | None = None) -> AccelerationReport:
    """:func:`euler_transform` plus errors against a supplied limit.

    ``rate_ratio`` is the geometric mean of consecutive ratios of the
    transformed errors over the last quartile (``None`` if any error there
    is exactly zero).
    """
    base = euler_transform(f, n_terms, policy)
    ref = as_scalar(reference)
    raw_err = tuple((p - ref).magnitude() for p in base.raw_partials)
    acc_err = tuple((p - ref).magnitude() for p in base.accel_partials)
    return AccelerationReport(base.raw_partials, base.accel_partials, ref, raw_err, acc_err,
                              _geometric_rate(acc_err))
