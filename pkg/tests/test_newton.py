import math
from fractions import Fraction

import mpmath
import pytest

from newtonforge.differences import forward_difference
from newtonforge.functions.handles import MissingSignalError, lookup, rational_handle
from newtonforge.functions.rational import parse_rational
from newtonforge.newton import (
    binomial_majorant,
    build_newton_series,
    rational_newton_series,
    eval_newton_series,
    newton_partial_sum,
    signal_weight,
)
from newtonforge.numerics import Scalar
from newtonforge.oracles import RegionError


def exact_table_column(fn, z0, n_max):
    """Leading differences by repeated subtraction on plain Fractions."""
    row = [fn(Fraction(z0) + j) for j in range(n_max + 1)]
    out = []
    while row:
        out.append(row[0])
        row = [b - a for a, b in zip(row, row[1:])]
    return out


class TestBuild:
    def test_squares(self):
        s = build_newton_series("z^2", 0, 6)
        assert s.coeffs == tuple(Scalar.exact(c) for c in (0, 1, 2, 0, 0, 0))
        assert s.exact_length == 3

    def test_reciprocal_coefficients(self):
        s = build_newton_series("1/(z+1)", 1, 30)
        expected = exact_table_column(lambda x: 1 / (x + 1), 1, 29)
        assert s.coeffs == tuple(Scalar.exact(c) for c in expected)
        assert s.coeffs[0] == Scalar.exact(Fraction(1, 2))
        assert s.abscissa == Scalar.exact(0)

    def test_center_left_of_abscissa(self):
        with pytest.raises(RegionError):
            build_newton_series("1/(z+1)", -2)

    def test_center_on_abscissa(self):
        with pytest.raises(RegionError):
            build_newton_series("1/(z-1)", 1)

    def test_no_signal(self):
        with pytest.raises(MissingSignalError):
            build_newton_series("gaussian", 1)


class TestEvaluate:
    def test_polynomial_terminates(self):
        s = build_newton_series("z^2", 0, 10)
        value, diag = eval_newton_series(s, 5)
        assert value == Scalar.exact(25)
        assert diag.terms_used == 3 and diag.converged

    def test_integer_offset_is_exact(self):
        s = build_newton_series("1/(z+1)", 1, 50)
        value, diag = eval_newton_series(s, 2, 1e-8)
        assert value == Scalar.exact(Fraction(1, 3))
        assert diag.converged

    def test_outside_half_plane(self):
        s = build_newton_series("1/(z+1)", 1, 50)
        with pytest.raises(RegionError):
            eval_newton_series(s, Fraction(1, 2))
        with pytest.raises(RegionError):
            eval_newton_series(s, Scalar.exact(1, 3))

    def test_non_integer_point(self):
        s = build_newton_series("1/(z+1)", 1, 500)
        value, diag = eval_newton_series(s, Scalar.exact(3, 1), 1e-12)
        assert diag.converged
        assert abs(complex(value) - 1 / (4 + 1j)) < 1e-9
        assert diag.last_term_mag <= diag.threshold
        assert diag.heuristic

    def test_unconverged_returns_best_value(self):
        s = build_newton_series("1/(z+1)", 1, 12)
        value, diag = eval_newton_series(s, Fraction(13, 10), 1e-14)
        assert not diag.converged
        assert diag.terms_used == 12
        assert abs(complex(value) - 1 / 2.3) < 0.05

    def test_majorant_bounds_the_remainder(self):
        f = rational_handle("1/((z+1)*(z+2))")
        s = build_newton_series(f, 1, 500)
        for z in (Scalar.exact(3), Scalar.exact(Fraction(5, 2), 1), Scalar.exact(6, -2)):
            value, diag = eval_newton_series(s, z, 1e-9)
            assert diag.majorant_verdict == "converging"
            remainder = abs(complex(value) - complex(f(z, 80)))
            assert remainder <= diag.majorant_tail


class TestInterpolation:
    @pytest.mark.parametrize("expr", ["1/(z+1)", "(z+3)/(z+1)^2", "(z^3-2*z+1)/(z^2+4*z+5)"])
    def test_partial_sums_hit_the_nodes(self, expr):
        f = rational_handle(expr)
        z0 = Scalar.exact(Fraction(3, 2))
        s = build_newton_series(f, z0, 41)
        for n in (0, 1, 7, 40):
            for m in range(n + 1):
                assert newton_partial_sum(s, z0 + m, n) == f(z0 + m)

    def test_polynomial_coefficients_vanish(self):
        s = build_newton_series("z^5 - 7*z^2 + 1/3", 2, 20)
        assert all(c.is_zero() for c in s.coeffs[6:])
        assert not s.coeffs[5].is_zero()


class TestMajorant:
    def test_finite_series(self):
        r = binomial_majorant(2, 1, 50)
        assert r.verdict == "converging"
        assert r.partial_sums[-1] == 2

    def test_converging(self):
        r = binomial_majorant(Fraction(5, 2), 1, 2000)
        assert r.verdict == "converging"
        assert abs(r.decay_exponent - 1.5) < 0.05
        # partial sums stabilise
        assert r.partial_sums[-1] - r.partial_sums[999] < 1e-3

    def test_diverging(self):
        r = binomial_majorant(Fraction(1, 2), 1, 2000)
        assert r.verdict == "diverging"
        assert r.partial_sums[-1] > 2 * r.partial_sums[499]

    def test_imaginary_offset_does_not_converge(self):
        assert binomial_majorant(Scalar.exact(1, 1), 1, 2000).verdict != "converging"

    def test_signal_weight(self):
        # |e^{-t}| integrated against e^{-t} gives 1/2
        assert signal_weight(lookup("1/(z+1)"), 1) == pytest.approx(0.5)


class TestPipeline:
    def test_valid(self):
        s = rational_newton_series("1/(z+1)", 1)
        assert s.coeffs[0] == Scalar.exact(Fraction(1, 2))

    def test_names_the_pole(self):
        with pytest.raises(RegionError, match="pole 2"):
            rational_newton_series("1/((z-2)*(z+3))", 1)

    def test_complex_pole_threshold(self):
        with pytest.raises(RegionError, match="pole"):
            rational_newton_series("1/(z^2-2*z+2)", 1)
        assert rational_newton_series("1/(z^2-2*z+2)", Fraction(3, 2), 10).z0 == Scalar.exact(Fraction(3, 2))

    def test_polynomial_needs_positive_center(self):
        s = rational_newton_series("z^3", 1, 10)
        value, diag = eval_newton_series(s, Fraction(7, 3))
        assert value == Scalar.exact(Fraction(343, 27))
        assert diag.terms_used == 4
        with pytest.raises(RegionError):
            rational_newton_series("z^3", 0)

    def test_rejects_non_rational(self):
        with pytest.raises(TypeError):
            rational_newton_series(lookup("gaussian"), 1)
