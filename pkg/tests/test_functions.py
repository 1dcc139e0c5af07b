import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from newtonforge.functions.decomposition import factor_rational, partial_fractions, poles
from newtonforge.functions.handles import (
    MissingSignalError,
    UnknownFunctionError,
    abs_convergence_abscissa,
    catalog,
    lookup,
    rational_handle,
)
from newtonforge.functions.laplace import ImproperFunctionError, inverse_laplace_rational
from newtonforge.functions.polynomial import Polynomial
from newtonforge.functions.rational import (
    ExpressionError,
    PoleError,
    RationalFunction,
    format_rational,
    parse_rational,
)
from newtonforge.numerics import Scalar


def random_polynomial(rng, degree):
    coeffs = [Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(degree + 1)]
    if coeffs[-1] == 0:
        coeffs[-1] = Fraction(1)
    return Polynomial(coeffs)


def laplace_by_quadrature(signal, z):
    """Integrate exp(-z t) * signal(t) over [0, inf) with mpmath."""
    with mpmath.workdps(30):
        return complex(mpmath.quad(lambda t: mpmath.exp(-z * t) * signal.evaluate(t, 110).to_mpc(),
                                   [0, 1, 5, 20, mpmath.inf]))


class TestParser:
    def test_reciprocal(self):
        r = parse_rational("1/(z+1)")
        assert r.numerator.coeffs == (1,)
        assert r.denominator.coeffs == (1, 1)

    def test_already_reduced(self):
        r = parse_rational("(z^2+2)/(z+1)")
        assert r.numerator == Polynomial([2, 0, 1])
        assert r.denominator == Polynomial([1, 1])

    def test_common_factor_cancels(self):
        r = parse_rational("(z^2-1)/(z-1)")
        assert r.is_polynomial
        assert r.numerator == Polynomial([1, 1])
        # re-multiplying by the removed factor gives the original numerator back
        assert r.numerator * Polynomial([-1, 1]) == Polynomial([-1, 0, 1])

    def test_decimal_literals_are_exact(self):
        assert parse_rational("0.1*z") == parse_rational("z/10")

    def test_precedence(self):
        assert parse_rational("1+2*z^2") == RationalFunction(Polynomial([1, 0, 2]), Polynomial([1]))
        assert parse_rational("-z^2") == RationalFunction(Polynomial([0, 0, -1]), Polynomial([1]))

    def test_syntax_error_reports_position(self):
        with pytest.raises(ExpressionError, match="position 2"):
            parse_rational("z+*2")

    def test_zero_denominator(self):
        with pytest.raises(ExpressionError, match="division by zero"):
            parse_rational("1/(z-z)")

    def test_round_trip_through_formatting(self):
        rng = random.Random(11)
        for _ in range(50):
            r = RationalFunction(random_polynomial(rng, rng.randint(0, 4)),
                                 random_polynomial(rng, rng.randint(0, 4)))
            assert parse_rational(format_rational(r)) == r

    def test_evaluation_at_pole_raises(self):
        with pytest.raises(PoleError):
            rational_handle("1/(z+1)")(Scalar.exact(-1))


class TestPoles:
    def test_linear(self):
        assert poles(parse_rational("1/(z+1)")) == [(Scalar.exact(-1), 1)]

    def test_imaginary_pair(self):
        got = sorted(((complex(s), m) for s, m in poles(parse_rational("1/(z^2+1)"))), key=lambda p: p[0].imag)
        assert [m for _, m in got] == [1, 1]
        assert abs(got[0][0] + 1j) < 1e-30 and abs(got[1][0] - 1j) < 1e-30

    def test_repeated_roots(self):
        r = parse_rational("1/((z-2)^2*(z+3))")
        got = poles(r)
        assert sorted((complex(s).real, m) for s, m in got) == [(-3.0, 1), (2.0, 2)]
        # the multiset rebuilds the denominator exactly
        rebuilt = Polynomial([1])
        for s, m in got:
            rebuilt = rebuilt * Polynomial([-s.as_fractions()[0], 1]) ** m
        assert rebuilt == r.denominator

    def test_irrational_roots_to_working_precision(self):
        r = parse_rational("1/(z^3-2)")
        for s, _ in poles(r, prec=200):
            with mpmath.workprec(200):
                assert abs(s.to_mpc() ** 3 - 2) < mpmath.mpf(2) ** -180

    def test_factorization_is_over_the_rationals(self):
        factors = factor_rational(Polynomial([2, 0, -3, 0, 1]))  # (z^2-1)(z^2-2)
        assert sorted(q.degree for q, _ in factors) == [1, 1, 2]


class TestPartialFractions:
    def test_improper_input(self):
        pf = partial_fractions(parse_rational("(z^2+2)/(z+1)"))
        assert pf.polynomial_part == Polynomial([-1, 1])
        assert pf.proper_terms == ((Polynomial([3]), Polynomial([1, 1])),)

    def test_already_proper(self):
        pf = partial_fractions(parse_rational("1/(z+1)"))
        assert pf.polynomial_part.is_zero()
        assert pf.proper_terms == ((Polynomial([1]), Polynomial([1, 1])),)

    def test_two_simple_poles(self):
        pf = partial_fractions(parse_rational("1/((z+1)*(z+2))"))
        terms = {RationalFunction(p, q) for p, q in pf.proper_terms}
        assert terms == {parse_rational("1/(z+1)"), parse_rational("-1/(z+2)")}
        assert pf.recombine() == parse_rational("1/((z+1)*(z+2))")

    def test_recombination_over_random_rationals(self):
        rng = random.Random(2024)
        for _ in range(120):
            den = Polynomial([1])
            for _ in range(rng.randint(1, 3)):
                den = den * random_polynomial(rng, rng.randint(1, 2)) ** rng.randint(1, 2)
            if den.degree > 6:
                continue
            r = RationalFunction(random_polynomial(rng, rng.randint(0, 6)), den)
            pf = partial_fractions(r)
            assert pf.recombine() == r
            for p, q in pf.proper_terms:
                assert p.degree < q.degree


class TestInverseLaplace:
    def test_exponential(self):
        sig = inverse_laplace_rational(parse_rational("1/(z+1)"))
        assert str(sig) == "(1)*exp(-1*t)"

    def test_sine(self):
        sig = inverse_laplace_rational(parse_rational("1/(z^2+1)"))
        for t in (0.3, 1.0, 4.0):
            assert abs(complex(sig.evaluate(t)) - np.sin(t)) < 1e-15

    def test_double_pole_by_quadrature(self):
        sig = inverse_laplace_rational(parse_rational("1/(z+1)^2"))
        assert str(sig) == "(1)*t*exp(-1*t)"
        assert abs(laplace_by_quadrature(sig, 1) - 0.25) < 1e-20

    @pytest.mark.parametrize("text", ["(z+3)/(z+1)^2", "(2*z-1)/(z^2+2*z+5)", "1/(z^3+1)",
                                      "(z^2+1)/((z^2+4)^2*(z+1/2))"])
    def test_quadrature_reproduces_the_function(self, text):
        r = parse_rational(text)
        sig = inverse_laplace_rational(r)
        z = 2.5 + 0.5j
        expected = complex(rational_handle(r)(Scalar.exact(Fraction(5, 2), Fraction(1, 2))))
        assert abs(laplace_by_quadrature(sig, z) - expected) < 1e-15
        assert abs(complex(sig.laplace(z)) - expected) < 1e-15

    def test_exponents_and_frequencies_are_pole_parts(self):
        r = parse_rational("1/((z+1)*(z^2-2*z+5))")
        sig = inverse_laplace_rational(r)
        pairs = {(float(t.a), abs(float(t.b))) for t in sig.terms}
        assert pairs == {(-1.0, 0.0), (1.0, 2.0)}

    def test_improper_input_rejected(self):
        with pytest.raises(ImproperFunctionError):
            inverse_laplace_rational(parse_rational("z/(z+1)"))

    def test_linearity(self):
        rng = random.Random(5)
        for _ in range(10):
            a = parse_rational(f"{rng.randint(1, 5)}/(z+{rng.randint(1, 4)})^{rng.randint(1, 2)}")
            b = parse_rational(f"(z+{rng.randint(0, 3)})/(z^2+{rng.randint(1, 5)})")
            joint = inverse_laplace_rational(a + b).merged()
            split = (inverse_laplace_rational(a) + inverse_laplace_rational(b)).merged()
            assert len(joint.terms) == len(split.terms)
            for t in (0.1, 0.7, 2.0):
                assert abs(complex(joint.evaluate(t)) - complex(split.evaluate(t))) < 1e-25


class TestAbscissa:
    def test_examples(self):
        assert abs_convergence_abscissa(rational_handle("1/(z+1)")) == Scalar.exact(0)
        assert abs_convergence_abscissa(rational_handle("1/((z-2)*(z+3))")) == Scalar.exact(2)
        assert abs_convergence_abscissa(rational_handle("z^2")) == Scalar.exact(0)

    def test_product_denominator_takes_max(self):
        a = abs_convergence_abscissa(rational_handle("1/(z-1/2)"))
        b = abs_convergence_abscissa(rational_handle("1/(z^2-2*z+2)"))
        ab = abs_convergence_abscissa(rational_handle("1/((z-1/2)*(z^2-2*z+2))"))
        assert ab == max(a, b, key=lambda s: s.as_fractions()[0])

    def test_missing_signal(self):
        with pytest.raises(MissingSignalError):
            abs_convergence_abscissa(lookup("bessel_recip_sqrt"))


class TestCatalog:
    def test_required_entries(self):
        names = set(catalog())
        assert {"bessel_recip_sqrt", "gaussian", "two_sided_exponential"} <= names

    def test_values(self):
        assert lookup("bessel_recip_sqrt")(Scalar.exact(0)) == Scalar.exact(1) or \
            complex(lookup("bessel_recip_sqrt")(Scalar.exact(0))) == 1
        assert complex(lookup("gaussian")(Scalar.exact(0))) == 1
        assert float(lookup("gaussian").fourier_pair(np.array([0.0]))[0]) == 1.0

    def test_bessel_entry_has_no_laplace_signal(self):
        assert lookup("bessel_recip_sqrt").laplace_signal is None

    def test_unknown_name(self):
        with pytest.raises(UnknownFunctionError):
            lookup("no_such_function")

    @pytest.mark.parametrize("name", ["gaussian", "two_sided_exponential"])
    @pytest.mark.parametrize("y", [0, 0.5, -0.5, 1, -1, 2, -2])
    def test_fourier_pair_reproduces_function(self, name, y):
        handle = lookup(name)
        g = handle.fourier_pair

        def integrand(x):
            # both pairs are even, so the transform is a cosine integral
            return 2 * mpmath.cos(2 * mpmath.pi * y * x) * float(g(np.array([float(x)]))[0])

        if y == 0 or name == "gaussian":
            value = mpmath.quad(integrand, [0, 1, 4, mpmath.inf])
        else:
            value = mpmath.quadosc(integrand, [0, mpmath.inf], omega=2 * mpmath.pi * abs(y))
        expected = complex(handle(Scalar.floating(y, 80)))
        assert abs(complex(value) - expected) < 1e-9
