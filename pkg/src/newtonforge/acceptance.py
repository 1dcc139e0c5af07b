"""The acceptance suite: ten end-to-end checks with their stated tolerances.

Each check returns a :class:`CriterionResult`; a failing check reports the
first offending case in ``detail`` rather than raising. The same functions
back ``newtonforge verify`` and the test-suite.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import mpmath

from .differences import (
    asymptotic_profile,
    backward_difference,
    binomial_sum,
    central_difference,
    forward_difference,
    leading_differences,
    modulate,
    unit_phase,
)
from .euler import acceleration_report
from .functions.handles import lookup, rational_handle
from .functions.polynomial import Polynomial
from .functions.rational import RationalFunction, parse_rational
from .newton import rational_newton_series, eval_newton_series, newton_partial_sum
from .numerics import PrecisionPolicy, Scalar
from .oracles import (
    RegionError,
    fourier_central_oracle,
    fourier_forward_oracle,
    laplace_difference_oracle,
)

#: rational functions used by the identity, oracle and interpolation checks
RATIONAL_TEST_SET = (
    "1/(z+1)",
    "1/((z+1)*(z+2))",
    "(z+3)/(z+1)^2",
    "1/(z^2+1)",
    "(z^3-2*z+1)/(z^2+4*z+5)",
    "z^3 - 3*z + 1/2",
)

DECAY_SET = ("1/(z+1)", "1/((z+1)*(z+2))", "(z+3)/((z+1)^2)")


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number:2d} {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _timed(number: int, name: str, budget: float, body: Callable[[], tuple[bool, str]]) -> CriterionResult:
    start = time.perf_counter()
    passed, detail = body()
    elapsed = time.perf_counter() - start
    if passed and elapsed > budget:
        passed, detail = False, f"{detail}; runtime {elapsed:.1f}s exceeds {budget:.0f}s"
    return CriterionResult(number, name, passed, detail, elapsed)


def _reflect(r: RationalFunction) -> RationalFunction:
    """``r(-z)``."""
    flip = lambda p: Polynomial([c * (-1) ** k for k, c in enumerate(p.coeffs)])
    return RationalFunction(flip(r.numerator), flip(r.denominator))


# ---------------------------------------------------------------------------

def criterion_1() -> CriterionResult:
    def body():
        for n in range(201):
            got = binomial_sum("1/(z+1)", 0, 1, n)
            want = Scalar.exact(Fraction(2 ** (n + 1) - 1, n + 1))
            if not (got.is_exact and got == want):
                return False, f"n={n}: got {got}, want {want}"
        return True, "sum C(n,k)/(k+1) = (2^(n+1)-1)/(n+1) exactly for n <= 200"
    return _timed(1, "binomial identity", 5, body)


def criterion_2() -> CriterionResult:
    def body():
        seq = []
        for n in range(201):
            got = binomial_sum("1", 0, 1, n)
            if not (got.is_exact and got == 2 ** n):
                return False, f"n={n}: got {got}, want 2^{n}"
            seq.append(got)
        verdict = asymptotic_profile(seq).verdict
        if verdict != "divergent":
            return False, f"profile verdict {verdict}, want divergent"
        return True, "sum C(n,k) = 2^n exactly for n <= 200; profile divergent"
    return _timed(2, "non-example 2^n", 60, body)


def decay_case(expr: str, z: str, n_max: int = 400, threshold: float = 1e-6):
    """Exact differences by table and by direct sums, and the pinned ``N``.

    Returns ``(N or None, |Delta^n_max|, agree)`` where ``N`` is the smallest
    index with ``|Delta^n f(z)| < threshold`` on all of ``[N, n_max]``.
    """
    f = rational_handle(expr)
    table = leading_differences(f, z, 1, n_max, PrecisionPolicy("exact"))
    agree = all(table[n] == forward_difference(f, z, 1, n, PrecisionPolicy("exact"))
                for n in range(0, n_max + 1, 25))
    mags = [float(v.magnitude()) for v in table]
    pinned = None
    for n in range(n_max, -1, -1):
        if mags[n] < threshold:
            pinned = n
        else:
            break
    return pinned, mags[n_max], agree


def criterion_3() -> CriterionResult:
    def body():
        failures, pins = [], []
        for expr in DECAY_SET:
            for z in ("1", "2", "1+i"):
                pinned, last, agree = decay_case(expr, z)
                if not agree:
                    failures.append(f"{expr} at {z}: table and direct sums disagree")
                elif pinned is None:
                    failures.append(f"{expr} at {z}: |Delta^400| = {last:.3g} >= 1e-6")
                else:
                    pins.append(f"{expr}@{z}:N={pinned}")
        if failures:
            return False, "; ".join(failures)
        return True, ", ".join(pins)
    return _timed(3, "vanishing forward differences", 30, body)


def criterion_4() -> CriterionResult:
    def body():
        worst = 0.0
        for expr in RATIONAL_TEST_SET:
            f = lookup(expr)
            signal, deltas = f.laplace_signal
            base = float(f.abs_abscissa) + 0.5
            for z in ("1", "2", "1+i", "3-2i"):
                if not float(Scalar.parse(z).real) > base:
                    continue
                for h in ("1/2", "1", "2"):
                    for n in range(31):
                        direct = forward_difference(f, z, h, n)
                        oracle = laplace_difference_oracle(signal, deltas, z, h, n)
                        err = float((oracle.value - direct).magnitude()) / (1 + float(direct.magnitude()))
                        worst = max(worst, err)
                        if err > 1e-8:
                            return False, f"Laplace {expr} z={z} h={h} n={n}: relative gap {err:.3g}"
        for name in ("gaussian", "two_sided_exponential"):
            f = lookup(name)
            for y in ("0", "1/3", "1"):
                for h in ("1/2", "1", "2"):
                    for n in range(31):
                        direct = forward_difference(f, y, h, n)
                        o = fourier_forward_oracle(f, y, h, n)
                        central = central_difference(f, y, h, n)
                        oc = fourier_central_oracle(f, y, h, n)
                        for label, got, want in (("forward", o.value, direct),
                                                 ("central sine", oc.sine_form.value, central),
                                                 ("central product", oc.product_form.value, central)):
                            err = float((got - want).magnitude()) / (1 + float(want.magnitude()))
                            worst = max(worst, err)
                            if err > 1e-8:
                                return False, (f"Fourier {label} {name} y={y} h={h} n={n}: "
                                               f"relative gap {err:.3g}")
        return True, f"worst relative gap {worst:.2g} (tolerance 1e-8)"
    return _timed(4, "oracle equivalence", 60, body)


NEWTON_GRID = tuple(f"{re}{'+' if im >= 0 else '-'}{abs(im)}i" if im else re
                    for re in ("5/4", "2", "4") for im in (0, 1, -1, 5, -5))


def criterion_5() -> CriterionResult:
    def body():
        s = rational_newton_series("1/(z+1)", 1, 500)
        failures = []
        for z in NEWTON_GRID:
            zs = Scalar.parse(z)
            value, diag = eval_newton_series(s, zs, 1e-8)
            target = 1 / (zs + 1)
            err = float((value - target).magnitude())
            if not (err <= 1e-8 and diag.converged and diag.terms_used <= 500):
                failures.append(f"z={z}: error {err:.2g}, converged={diag.converged}, "
                                f"terms={diag.terms_used}")
        for z in ("1", "1+2i", "1/2", "-3"):
            try:
                eval_newton_series(s, Scalar.parse(z), 1e-8)
            except RegionError:
                continue
            failures.append(f"z={z} was not rejected")
        if failures:
            return False, "; ".join(failures)
        return True, "15 grid points within 1e-8; Re(z) <= 1 rejected"
    return _timed(5, "Newton series convergence", 30, body)


def criterion_6() -> CriterionResult:
    def body():
        for expr in RATIONAL_TEST_SET:
            r = parse_rational(expr)
            z0 = Scalar.exact(Fraction(1, 2)) if expr != "1/(z^2+1)" else Scalar.exact(1)
            s = rational_newton_series(r, z0, 41)
            for n in range(41):
                for m in range(n + 1):
                    node = z0 + m
                    got = newton_partial_sum(s, node, n)
                    if not (got.is_exact and got == r(node)):
                        return False, f"{expr}: degree {n} partial sum differs at z0+{m}"
        return True, "partial sums interpolate exactly at z0..z0+n for n <= 40"
    return _timed(6, "interpolation exactness", 120, body)


def bessel_sequence(n_max: int = 2000) -> list[Scalar]:
    """``a_n = sum_k C(n,k) (-1)^k / sqrt(k^2 + 1)`` at auto precision."""
    diffs = leading_differences("bessel_recip_sqrt", 0, 1, n_max, PrecisionPolicy("auto"))
    return [d if n % 2 == 0 else -d for n, d in enumerate(diffs)]


def criterion_7() -> CriterionResult:
    def body():
        a = bessel_sequence(2000)
        # second route at a few orders: direct binomial sums
        for n in (10, 501, 1500, 2000):
            direct = forward_difference("bessel_recip_sqrt", 0, 1, n, PrecisionPolicy("auto"))
            direct = direct if n % 2 == 0 else -direct
            if float((direct - a[n]).magnitude()) > 1e-15:
                return False, f"table and direct sum disagree at n={n}"
        head = max(v.magnitude() for v in a[:11])
        tail = max(v.magnitude() for v in a[1000:])
        verdict = asymptotic_profile(a).verdict
        detail = (f"max|a_n| on [1000,2000] = {mpmath.nstr(tail, 6)}, on [0,10] = {mpmath.nstr(head, 6)}, "
                  f"verdict {verdict}")
        ok = tail > 1 and tail > head and verdict in ("divergent", "inconclusive")
        return ok, detail
    return _timed(7, "Bessel counterexample", 120, body)


def criterion_8() -> CriterionResult:
    def body():
        with mpmath.workprec(320):
            ln2 = Scalar.floating(mpmath.log(2), 320)
        rep = acceleration_report("1/(z+1)", ln2, 60)
        for n in range(8, 61):
            if not rep.accel_errors[n] <= mpmath.ldexp(1, -n):
                return False, f"accel error at n={n} is {mpmath.nstr(rep.accel_errors[n], 5)} > 2^-{n}"
        if rep.rate_ratio is None or not 0.4 <= rep.rate_ratio <= 0.6:
            return False, f"rate ratio {rep.rate_ratio}"
        factor = rep.raw_errors[60] / rep.accel_errors[60]
        if not factor > mpmath.mpf(10) ** 12:
            return False, f"raw/accel error factor at n=60 only {mpmath.nstr(factor, 5)}"
        return True, f"rate ratio {rep.rate_ratio:.4f}, raw/accel at n=60 = {mpmath.nstr(factor, 4)}"
    return _timed(8, "Euler acceleration rate", 60, body)


def criterion_9(n_max: int = 60) -> CriterionResult:
    def body():
        exact = PrecisionPolicy("exact")
        z, h = Scalar.exact(Fraction(1, 3)), Scalar.exact(Fraction(1, 2))
        fs = [parse_rational(e) for e in RATIONAL_TEST_SET]
        for r in fs:
            f = rational_handle(r)
            g = rational_handle(_reflect(r))
            fwd = leading_differences(f, z, h, n_max + 1, exact)
            shifted = leading_differences(f, z + h, h, n_max, exact)
            for n in range(n_max + 1):
                d = forward_difference(f, z, h, n, exact)
                if d != fwd[n]:
                    return False, f"{r}: table and direct sum differ at n={n}"
                if fwd[n + 1] != shifted[n] - fwd[n]:
                    return False, f"{r}: Pascal recurrence fails at n={n}"
                back = backward_difference(f, z, h, n, exact)
                if back != forward_difference(f, z - n * h, h, n, exact):
                    return False, f"{r}: backward shift identity fails at n={n}"
                if central_difference(f, z, h, n, exact) != forward_difference(f, z - n * h / 2, h, n, exact):
                    return False, f"{r}: central shift identity fails at n={n}"
                if back != forward_difference(g, -z, h, n, exact) * (-1) ** n:
                    return False, f"{r}: reflection sign relation fails at n={n}"
        a, b = Fraction(3, 7), Fraction(-5, 2)
        for r1, r2 in zip(fs, fs[1:]):
            combo = rational_handle(r1 * a + r2 * b)
            for n in range(0, n_max + 1, 3):
                lhs = forward_difference(combo, z, h, n, exact)
                rhs = forward_difference(rational_handle(r1), z, h, n, exact) * a + \
                    forward_difference(rational_handle(r2), z, h, n, exact) * b
                if lhs != rhs:
                    return False, f"linearity fails for {r1}, {r2} at n={n}"
        for d in range(0, 8):
            p = rational_handle(RationalFunction.from_polynomial(Polynomial([Fraction(k + 1, k + 2) for k in range(d + 1)])))
            for n in range(d + 1, min(d + 12, n_max + 1)):
                if not forward_difference(p, z, h, n, exact).is_zero():
                    return False, f"degree {d} polynomial not annihilated at n={n}"
        for n in range(n_max + 1):
            mono = rational_handle(RationalFunction.from_polynomial(Polynomial([0] * n + [1])))
            if forward_difference(mono, z, h, n, exact) != math.factorial(n) * h ** n:
                return False, f"Delta^n z^n != n! h^n at n={n}"
        return True, f"all identities exact for n <= {n_max} over {len(fs)} rational functions"
    return _timed(9, "operator identities", 120, body)


def criterion_10(n_max: int = 40) -> CriterionResult:
    def body():
        exact = PrecisionPolicy("exact")
        # nodes stay on the lattice (3/4)Z, which misses every pole of the test set
        h = Scalar.exact(Fraction(3, 2))
        for expr in RATIONAL_TEST_SET:
            f = rational_handle(expr)
            alpha = modulate(f, h)
            for y in (Scalar.exact(0), Scalar.exact(Fraction(3, 4)), Scalar.exact(Fraction(9, 4))):
                phase = unit_phase(y / h)
                for n in range(n_max + 1):
                    lhs = forward_difference(alpha, y, h, n, exact)
                    rhs = phase * binomial_sum(f, y, h, n, "forward", exact) * (-1) ** n
                    if lhs != rhs:
                        return False, f"{expr} forward modulation fails at y={y}, n={n}"
                    lhs = backward_difference(alpha, y, h, n, exact)
                    rhs = phase * binomial_sum(f, y, h, n, "backward", exact)
                    if lhs != rhs:
                        return False, f"{expr} backward modulation fails at y={y}, n={n}"
                    lhs = central_difference(alpha, y, h, n, exact)
                    rhs = phase * unit_phase(Scalar.exact(Fraction(n, 2))) * \
                        binomial_sum(f, y, h, n, "central", exact)
                    if lhs != rhs:
                        return False, f"{expr} central modulation fails at y={y}, n={n}"
        return True, f"three modulation identities exact for n <= {n_max}"
    return _timed(10, "modulation identities", 120, body)


CRITERIA: dict[int, Callable[[], CriterionResult]] = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
    6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10,
}


def run_all(selection=None) -> list[CriterionResult]:
    numbers = sorted(selection) if selection else sorted(CRITERIA)
    return [CRITERIA[k]() for k in numbers]
