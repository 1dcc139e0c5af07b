"""Adaptive quadrature used by the integral oracles.

Panels are integrated with a fixed Gauss-Legendre rule; the error estimate
of a panel is the difference between the rule on the panel and the rule on
its two halves. Panels are bisected until the summed estimate is below the
tolerance or the evaluation budget runs out. Integrands are vectorised
numpy callables; the working dtype can be ``np.longdouble`` when large
cancelling factors are involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import mpmath
import numpy as np

from .numerics import Scalar

DEFAULT_BUDGET = 10**6
GL_POINTS = 15


class QuadratureError(ArithmeticError):
    """Tolerance not reached within the evaluation budget."""

    def __init__(self, message: str, best: "QuadratureResult"):
        self.best = best
        super().__init__(message)


@dataclass(frozen=True)
class QuadratureResult:
    value: Scalar
    est_error: float
    evaluations: int

    def __add__(self, other: "QuadratureResult") -> "QuadratureResult":
        return QuadratureResult(self.value + other.value, self.est_error + other.est_error,
                                self.evaluations + other.evaluations)


def _to_scalar(v) -> Scalar:
    v = complex(v)
    return Scalar.floating(v if v.imag else v.real, 53)


@lru_cache(maxsize=None)
def gauss_legendre(npts: int, dtype=np.float64) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1], computed in mpmath and cast to ``dtype``."""
    with mpmath.workprec(160):
        nodes, weights = [], []
        for i in range(1, npts + 1):
            x = mpmath.cos(mpmath.pi * (i - mpmath.mpf(1) / 4) / (npts + mpmath.mpf(1) / 2))
            for _ in range(100):
                p0, p1 = mpmath.mpf(1), x
                for k in range(2, npts + 1):
                    p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
                dp = npts * (x * p1 - p0) / (x * x - 1)
                step = p1 / dp
                x -= step
                if abs(step) < mpmath.mpf(2) ** -150:
                    break
            p0, p1 = mpmath.mpf(1), x
            for k in range(2, npts + 1):
                p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
            dp = npts * (x * p1 - p0) / (x * x - 1)
            nodes.append(x)
            weights.append(2 / ((1 - x * x) * dp * dp))
        cast = (lambda v: np.longdouble(mpmath.nstr(v, 30))) if dtype == np.longdouble else float
        return (np.array([cast(x) for x in nodes], dtype=dtype),
                np.array([cast(w) for w in weights], dtype=dtype))


def _rule(integrand, lefts, rights, dtype):
    nodes, weights = gauss_legendre(GL_POINTS, dtype)
    mid = (lefts + rights) / 2
    half = (rights - lefts) / 2
    x = mid[:, None] + half[:, None] * nodes[None, :]
    fx = np.asarray(integrand(x.ravel())).reshape(x.shape)
    return half * (fx @ weights)


def _estimate(integrand, lefts, rights, dtype):
    mids = (lefts + rights) / 2
    coarse = _rule(integrand, lefts, rights, dtype)
    left = _rule(integrand, lefts, mids, dtype)
    right = _rule(integrand, mids, rights, dtype)
    return left + right, np.abs(left + right - coarse), left, right


def adaptive_gauss(integrand: Callable[[np.ndarray], np.ndarray], a: float, b: float, tol: float,
                   *, dtype=np.float64, max_width: float | None = None,
                   budget: int = DEFAULT_BUDGET) -> QuadratureResult:
    """Integrate over the finite interval [a, b] to absolute tolerance ``tol``."""
    a, b = dtype(a), dtype(b)
    if a == b:
        return QuadratureResult(Scalar.floating(0, 53), 0.0, 0)
    pieces = 1
    if max_width is not None and max_width > 0:
        pieces = max(1, math.ceil(float(b - a) / max_width))
    edges = np.linspace(a, b, pieces + 1, dtype=dtype)
    lefts, rights = edges[:-1], edges[1:]
    values, errors, _, _ = _estimate(integrand, lefts, rights, dtype)
    evaluations = 3 * GL_POINTS * pieces
    length = float(b - a)
    while True:
        total_err = float(np.sum(errors))
        if total_err <= tol:
            break
        if evaluations >= budget:
            best = QuadratureResult(_to_scalar(np.sum(values)), total_err, evaluations)
            raise QuadratureError(
                f"quadrature error estimate {total_err:.3g} above tolerance {tol:.3g} "
                f"after {evaluations} evaluations", best)
        widths = (rights - lefts).astype(np.float64)
        marked = errors > 0.5 * tol * widths / length
        if not marked.any():
            marked = errors >= np.max(errors)
        mids = (lefts + rights) / 2
        new_l = np.concatenate([lefts[marked], mids[marked]])
        new_r = np.concatenate([mids[marked], rights[marked]])
        v, e, _, _ = _estimate(integrand, new_l, new_r, dtype)
        evaluations += 3 * GL_POINTS * len(new_l)
        keep = ~marked
        lefts = np.concatenate([lefts[keep], new_l])
        rights = np.concatenate([rights[keep], new_r])
        values = np.concatenate([values[keep], v])
        errors = np.concatenate([errors[keep], e])
    return QuadratureResult(_to_scalar(np.sum(values)), float(np.sum(errors)), evaluations)


def quadrature_semiinfinite(integrand: Callable[[np.ndarray], np.ndarray], decay_rate: float,
                            tol: float = 1e-12, *, dtype=np.float64,
                            budget: int = DEFAULT_BUDGET) -> QuadratureResult:
    """``int_0^inf integrand(t) dt`` for integrands decaying like ``exp(-decay_rate t)``.

    Substitutes ``t = -2 ln(u) / decay_rate`` so the mapped integrand on
    (0, 1] vanishes like ``u`` at the origin, then integrates adaptively.

    >>> r = quadrature_semiinfinite(lambda t: np.exp(-t), 1.0)
    >>> round(float(r.value), 12)
    1.0
    """
    if not decay_rate > 0:
        raise ValueError("decay_rate must be positive")
    rate = decay_rate / 2

    def mapped(u):
        t = -np.log(u) / rate
        return integrand(t) / (rate * u)

    return adaptive_gauss(mapped, 0.0, 1.0, tol, dtype=dtype, budget=budget)


def periodic_trapezoid(integrand: Callable[[np.ndarray], np.ndarray], period: float, points: int,
                       *, dtype=np.longdouble, budget: int = DEFAULT_BUDGET) -> QuadratureResult:
    """Trapezoid rule over one period with ``points`` and ``2 * points`` nodes.

    For analytic periodic integrands the rule converges geometrically; the
    difference between the two rules is the error estimate.
    """
    if 3 * points > budget:
        raise QuadratureError(f"{3 * points} evaluations exceed the budget {budget}",
                              QuadratureResult(Scalar.floating(0, 53), math.inf, 0))

    def rule(m):
        x = (np.arange(m, dtype=dtype) + dtype(0.5)) * (dtype(period) / m)
        return np.sum(integrand(x)) * (dtype(period) / m)

    coarse, fine = rule(points), rule(2 * points)
    return QuadratureResult(_to_scalar(fine), float(abs(fine - coarse)), 3 * points)
