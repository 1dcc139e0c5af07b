import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from newtonforge.differences import central_difference, forward_difference
from newtonforge.functions.handles import FunctionHandle, MissingSignalError, lookup, rational_handle
from newtonforge.functions.laplace import DeltaImageTerm, ExpPolySignal, SignalTerm, inverse_laplace_rational
from newtonforge.functions.rational import parse_rational
from newtonforge.numerics import Scalar
from newtonforge.oracles import (
    RegionError,
    fourier_central_oracle,
    fourier_forward_oracle,
    laplace_difference_oracle,
    region_membership,
)
from newtonforge.quadrature import (
    QuadratureError,
    adaptive_gauss,
    gauss_legendre,
    periodic_trapezoid,
    quadrature_semiinfinite,
)

ONE, ZERO = Scalar.exact(1), Scalar.exact(0)
EXP_DECAY = ExpPolySignal((SignalTerm(ONE, 0, Scalar.exact(-1), ZERO, "cos"),))
SINE = ExpPolySignal((SignalTerm(ONE, 0, ZERO, ONE, "sin"),))


def close(a, b, tol):
    return abs(complex(a) - complex(b)) <= tol


class TestQuadrature:
    def test_gauss_legendre_integrates_polynomials(self):
        x, w = gauss_legendre(15)
        assert abs(np.sum(w) - 2) < 1e-15
        assert abs(np.sum(w * x ** 28) - 2 / 29) < 1e-15

    def test_exponential(self):
        r = quadrature_semiinfinite(lambda t: np.exp(-t), 1.0, 1e-12)
        assert r.est_error <= 1e-12
        assert close(r.value, 1, 1e-12)

    def test_gamma_two(self):
        r = quadrature_semiinfinite(lambda t: t * np.exp(-t), 1.0, 1e-12)
        assert close(r.value, 1, 1e-12)

    def test_zero_integrand(self):
        r = quadrature_semiinfinite(lambda t: 0 * np.exp(-2 * t) * np.sin(t), 2.0, 1e-12)
        assert complex(r.value) == 0

    def test_budget_exhaustion(self):
        with pytest.raises(QuadratureError) as info:
            adaptive_gauss(lambda x: np.sign(x - 1 / 3), 0.0, 1.0, 1e-15, budget=2000)
        assert info.value.best.evaluations >= 2000

    def test_periodic_trapezoid(self):
        r = periodic_trapezoid(lambda x: np.exp(np.cos(2 * np.pi * x)), 1.0, 40)
        assert abs(complex(r.value) - float(mpmath.besseli(0, 1))) < 1e-15

    def test_bad_decay_rate(self):
        with pytest.raises(ValueError):
            quadrature_semiinfinite(np.exp, 0.0)


class TestLaplaceOracle:
    def test_examples(self):
        assert close(laplace_difference_oracle(EXP_DECAY, (), 0, 1, 3).value, -0.25, 1e-12)
        assert close(laplace_difference_oracle(EXP_DECAY, (), 0, 1, 0).value, 1, 1e-12)
        assert close(laplace_difference_oracle(SINE, (), 1, 1, 0).value, 0.5, 1e-12)

    def test_region_violation(self):
        with pytest.raises(RegionError):
            laplace_difference_oracle(EXP_DECAY, (), -1, 1, 2)

    @pytest.mark.parametrize("expr", ["1/(z+1)", "(z+3)/(z+1)^2", "1/(z^2+1)", "(z^3-2*z+1)/(z^2+4*z+5)"])
    @pytest.mark.parametrize("h", [Fraction(1, 2), Fraction(1), Fraction(2)])
    def test_matches_direct_sums(self, expr, h):
        f = rational_handle(expr)
        signal, deltas = f.laplace_signal
        z = f.abs_abscissa + Fraction(3, 4)
        for n in (0, 1, 5, 17, 30):
            oracle = laplace_difference_oracle(signal, deltas, z, h, n)
            direct = forward_difference(f, z, h, n)
            assert close(oracle.value, direct, 1e-8 * (1 + abs(complex(direct))))

    def test_complex_point(self):
        f = rational_handle("1/((z+1)*(z+2))")
        z = Scalar.exact(1, 2)
        signal, deltas = f.laplace_signal
        for n in (3, 12):
            assert close(laplace_difference_oracle(signal, deltas, z, 1, n).value,
                         forward_difference(f, z, 1, n), 1e-10)

    def test_pure_delta_images(self):
        term = DeltaImageTerm(Scalar.exact(3), Scalar.exact(1), 2)

        def image(z, prec):
            with mpmath.workprec(prec):
                return Scalar.floating(3 * mpmath.exp(-z.to_mpc()) * z.to_mpc() ** 2, prec)

        f = FunctionHandle("delta_image", image)
        previous = math.inf
        for n in (1, 5, 20, 40, 80):
            oracle = laplace_difference_oracle(ExpPolySignal(), (term,), 2, 1, n)
            direct = forward_difference(f, 2, 1, n)
            assert close(oracle.value, direct, 1e-14 * (1 + abs(complex(direct))))
            if n >= 20:
                assert abs(complex(direct)) < previous
            previous = abs(complex(direct))
        assert previous < 1e-10


class TestFourierOracles:
    def test_forward_examples(self):
        gauss, cauchy = lookup("gaussian"), lookup("two_sided_exponential")
        assert close(fourier_forward_oracle(gauss, 0, 1, 0).value, 1, 1e-12)
        assert close(fourier_forward_oracle(gauss, 0, 1, 1).value, math.exp(-math.pi) - 1, 1e-12)
        assert close(fourier_forward_oracle(cauchy, 0, 1, 1).value, math.exp(-2 * math.pi) - 1, 1e-12)

    def test_central_examples(self):
        gauss = lookup("gaussian")
        assert close(fourier_central_oracle(gauss, 0, 1, 0).value, 1, 1e-12)
        assert close(fourier_central_oracle(gauss, 0, 1, 1).value, 0, 1e-12)
        assert close(fourier_central_oracle(gauss, 0, 1, 2).value, 2 * math.exp(-math.pi) - 2, 1e-12)

    @pytest.mark.parametrize("name", ["gaussian", "two_sided_exponential"])
    @pytest.mark.parametrize("y", [Fraction(0), Fraction(1, 3), Fraction(1)])
    def test_match_direct_sums(self, name, y):
        f = lookup(name)
        for n in (2, 9, 30):
            fwd = forward_difference(f, y, 1, n)
            assert close(fourier_forward_oracle(f, y, 1, n).value, fwd, 1e-8 * (1 + abs(complex(fwd))))
            ctr = central_difference(f, y, 1, n)
            assert close(fourier_central_oracle(f, y, 1, n).value, ctr, 1e-8 * (1 + abs(complex(ctr))))

    @pytest.mark.parametrize("name", ["gaussian", "two_sided_exponential"])
    def test_sine_and_product_forms_agree(self, name):
        for n in (1, 7, 20):
            r = fourier_central_oracle(lookup(name), Fraction(1, 3), Fraction(1, 2), n)
            assert r.discrepancy <= r.sine_form.est_error + r.product_form.est_error + 1e-13

    def test_missing_pair(self):
        with pytest.raises(MissingSignalError):
            fourier_forward_oracle(lookup("1/(z+1)"), 0, 1, 1)


class TestRegionMembership:
    def test_examples(self):
        f = lookup("1/(z+1)")
        assert region_membership(f, 1).membership == "absolute"
        assert region_membership(f, -2).membership == "conditional_unknown"
        v = region_membership(lookup("1/((z-2)*(z+3))"), 2)
        assert v.membership == "conditional_unknown"
        assert v.abscissa_used == Scalar.exact(2)

    def test_strictness(self):
        f = lookup("1/((z-2)*(z+3))")
        assert region_membership(f, Scalar.exact(Fraction(2000001, 1000000), 7)).absolute

    def test_missing_signal(self):
        with pytest.raises(MissingSignalError):
            region_membership(lookup("gaussian"), 1)
