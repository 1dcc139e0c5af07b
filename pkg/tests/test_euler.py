import math
import random
from fractions import Fraction

import mpmath
import pytest

from newtonforge.euler import acceleration_report, euler_transform
from newtonforge.functions.handles import rational_handle
from newtonforge.functions.rational import parse_rational
from newtonforge.numerics import Scalar

with mpmath.workprec(256):
    LN2 = Scalar.floating(mpmath.log(2), 256)
    TWO_LN2_MINUS_1 = Scalar.floating(2 * mpmath.log(2) - 1, 256)


class TestTransform:
    def test_constant_series(self):
        # every difference of a constant beyond order zero vanishes
        r = euler_transform("1", 10)
        assert r.accel_partials == tuple(Scalar.exact(Fraction(1, 2)) for _ in range(11))
        assert r.raw_partials == tuple(Scalar.exact((1 + (-1) ** n) // 2) for n in range(11))

    def test_reciprocal_terms(self):
        r = euler_transform("1/(z+1)", 30)
        terms = [r.accel_partials[0]] + [b - a for a, b in zip(r.accel_partials, r.accel_partials[1:])]
        assert terms == [Scalar.exact(Fraction(1, (m + 1) * 2 ** (m + 1))) for m in range(31)]

    def test_zero_function(self):
        r = euler_transform("0*z", 8)
        assert all(p.is_zero() for p in r.accel_partials + r.raw_partials)

    def test_defining_sum(self):
        f = rational_handle("(z+3)/(z+1)^2")
        r = euler_transform(f, 15)
        row = [Fraction(k + 3, (k + 1) ** 2) for k in range(16)]
        total, lead = Fraction(0), []
        while row:
            lead.append(row[0])
            row = [b - a for a, b in zip(row, row[1:])]
        for n in range(16):
            total += (-1) ** n * lead[n] / 2 ** (n + 1)
            assert r.accel_partials[n] == Scalar.exact(total)

    def test_linearity(self):
        rng = random.Random(3)
        for _ in range(5):
            a = parse_rational(f"1/(z+{rng.randint(1, 4)})")
            b = parse_rational(f"(z+{rng.randint(0, 3)})/(z+{rng.randint(1, 3)})^2")
            s, t = Fraction(rng.randint(-5, 5), 3), Fraction(rng.randint(-5, 5), 7)
            combo = rational_handle(a * type(a).lift(s) + b * type(b).lift(t))
            ra, rb, rc = euler_transform(rational_handle(a), 12), euler_transform(rational_handle(b), 12), \
                euler_transform(combo, 12)
            for x, y, w in zip(ra.accel_partials, rb.accel_partials, rc.accel_partials):
                assert w == x * s + y * t

    def test_exact_values_give_exact_partials(self):
        r = euler_transform("1/(z^2+1)", 40)
        assert all(p.is_exact for p in r.accel_partials)


class TestReport:
    def test_log_two_rate(self):
        r = acceleration_report("1/(z+1)", LN2, 40)
        assert r.accel_errors[40] <= mpmath.ldexp(1, -40)
        assert 0.4 <= r.rate_ratio <= 0.6

    def test_raw_error_dominates(self):
        r = acceleration_report("1/(z+1)", LN2, 60)
        assert r.raw_errors[60] > 10 ** 12 * r.accel_errors[60]
        for n in (10, 30, 60):
            # alternating-series remainder lies between 1/(2(n+2)) and 1/(n+2)
            assert 1 / (2 * (n + 2)) < r.raw_errors[n] < 1 / (n + 2)
            assert r.raw_errors[n] > 1000 * r.accel_errors[n]

    def test_constant_series_against_its_abel_sum(self):
        r = acceleration_report("1", Fraction(1, 2), 20)
        assert all(e == 0 for e in r.accel_errors)
        assert r.rate_ratio is None

    def test_scaled_error_bounded_for_decaying_signal(self):
        f = rational_handle("1/((z+1)*(z+2))")
        r = acceleration_report(f, TWO_LN2_MINUS_1, 60)
        scaled = [e * mpmath.ldexp(1, n) for n, e in enumerate(r.accel_errors)]
        assert max(scaled) < 1

    def test_negative_terms(self):
        with pytest.raises(ValueError):
            euler_transform("1", -1)
