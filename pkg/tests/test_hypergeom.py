"""Tests for the special functions and series machinery."""

import math
import warnings

import pytest

from banditlab.errors import ConvergenceError, PrecisionError, PrecisionWarning
from banditlab.hypergeom import (
    SeriesControl,
    hyp2f1,
    hyp3f2_at_1,
    log_beta,
    log_gamma,
    pochhammer,
)


class TestLogGamma:
    def test_known_values(self):
        assert log_gamma(1.0) == 0.0
        assert log_gamma(2.0) == 0.0
        assert log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), rel=1e-12)
        assert log_gamma(10.0) == pytest.approx(math.log(362880.0), rel=1e-12)

    def test_recurrence(self):
        # Gamma(x+1) = x Gamma(x)
        for x in (0.3, 1.7, 5.5, 40.0):
            assert log_gamma(x + 1) == pytest.approx(log_gamma(x) + math.log(x), rel=1e-12)

    def test_domain(self):
        with pytest.raises(ValueError):
            log_gamma(0.0)
        with pytest.raises(ValueError):
            log_gamma(-1.5)


class TestLogBeta:
    def test_known_values(self):
        assert log_beta(1, 1) == 0.0
        assert log_beta(2, 1) == pytest.approx(math.log(0.5), rel=1e-12)

    def test_against_quadrature(self):
        # oracle: adaptive quadrature of the defining integral
        from scipy.integrate import quad

        value, err = quad(lambda x: x**1.5 * (1 - x) ** 2.5, 0.0, 1.0,
                          epsabs=1e-13, epsrel=1e-13)
        assert err < 1e-11
        assert math.exp(log_beta(2.5, 3.5)) == pytest.approx(value, abs=1e-9)

    def test_symmetry(self):
        assert log_beta(2.5, 3.5) == pytest.approx(log_beta(3.5, 2.5), rel=1e-14)


class TestPochhammer:
    def test_empty_product(self):
        for q in (-3.2, 0.0, 1.0, 7.5):
            assert pochhammer(q, 0) == 1.0

    def test_factorial_case(self):
        assert pochhammer(1.0, 5) == pytest.approx(120.0, rel=1e-12)

    def test_zero_factor_terminates(self):
        assert pochhammer(-2.0, 3) == 0.0
        assert pochhammer(-2.0, 5) == 0.0

    def test_negative_noninteger(self):
        # (-2.5)_3 = (-2.5)(-1.5)(-0.5) = -1.875
        assert pochhammer(-2.5, 3) == pytest.approx(-1.875, rel=1e-12)

    def test_gamma_ratio_agreement_for_positive_q(self):
        for q, n in ((0.7, 4), (2.2, 9), (5.0, 3)):
            expected = math.exp(log_gamma(q + n) - log_gamma(q))
            assert pochhammer(q, n) == pytest.approx(expected, rel=1e-10)

    def test_negative_order(self):
        with pytest.raises(ValueError):
            pochhammer(1.0, -1)


class TestHyp2f1:
    def test_zero_upper_parameter(self):
        assert hyp2f1(3.1, 0.0, 2.0, 0.7) == 1.0
        for omega in (0.1, 0.5, 1.0):
            assert hyp2f1(2.0, 0.0, 3.0, omega) == 1.0

    def test_log_series_identity(self):
        # 2F1(1,1;2;z) = -ln(1-z)/z, checked by direct log evaluation
        for z in (0.25, 0.5, 0.9, -0.5):
            expected = -math.log1p(-z) / z
            assert hyp2f1(1, 1, 2, z) == pytest.approx(expected, rel=1e-11)

    def test_binomial_identity(self):
        # 2F1(a, b; b; z) = (1-z)^-a for any b (here b > 0 non-integer)
        assert hyp2f1(2.5, 1.7, 1.7, 0.3) == pytest.approx(0.7 ** -2.5, rel=1e-11)

    def test_terminating_negative_integer_upper(self):
        # 2F1(-2, b; c; z) is a quadratic polynomial in z
        a, b, c, z = -2.0, 1.5, 2.5, 0.6
        expected = 1 + (a * b / c) * z + (a * (a + 1) * b * (b + 1) / (c * (c + 1))) * z**2 / 2
        assert hyp2f1(a, b, c, z) == pytest.approx(expected, rel=1e-12)

    def test_gauss_summation_at_one(self):
        # 2F1(a,b;c;1) = G(c)G(c-a-b)/(G(c-a)G(c-b)); compare against a
        # long partial sum plus tail bound at a comfortable margin
        a, b, c = 0.7, 0.4, 3.0
        term = 1.0
        acc = 1.0
        for k in range(200_000):
            term *= (a + k) * (b + k) / ((c + k) * (k + 1.0))
            acc += term
        assert hyp2f1(a, b, c, 1.0) == pytest.approx(acc, rel=1e-8)

    def test_divergence_guards(self):
        with pytest.raises(ConvergenceError):
            hyp2f1(1.0, 1.0, 2.0, 1.5)
        with pytest.raises(ConvergenceError):
            hyp2f1(2.0, 2.0, 3.0, 1.0)  # c - a - b = -1
        with pytest.raises(ConvergenceError):
            hyp2f1(1.0, 1.0, -2.0, 0.5)  # c non-positive integer


class TestHyp3f2:
    def test_zero_upper_parameter(self):
        assert hyp3f2_at_1(0.0, 1.3, 2.2, 3.0, 4.0) == 1.0
        assert hyp3f2_at_1(1.3, 0.0, 2.2, 3.0, 4.0) == 1.0

    def test_basel_series(self):
        # terms are exactly 1/(k+1)^2, summing to pi^2/6
        assert hyp3f2_at_1(1, 1, 1, 2, 2) == pytest.approx(math.pi**2 / 6, abs=1e-9)

    def test_hand_expanded_terminating_series(self):
        # a3 = -1 terminates after two terms: 1 + (1*3*(-1))/(2*5*1) = 0.7
        assert hyp3f2_at_1(1, 3, -1, 2, 5) == pytest.approx(0.7, rel=1e-14)

    def test_brute_force_slow_margin_case(self):
        # margin 1.2: compare against two million direct terms plus an
        # integral tail bracket
        args = (0.6, 1.2, 0.4, 1.6, 1.8)
        term = 1.0
        acc = [1.0]
        for k in range(2_000_000):
            term *= (args[0] + k) * (args[1] + k) * (args[2] + k) / (
                (args[3] + k) * (args[4] + k) * (k + 1.0)
            )
            acc.append(term)
        margin = args[3] + args[4] - args[0] - args[1] - args[2]
        partial = math.fsum(acc)
        tail_low = 0.0
        tail_high = 2.0 * term * 2_000_000 / margin
        value = hyp3f2_at_1(*args)
        assert partial + tail_low <= value <= partial + tail_high
        assert value == pytest.approx(partial + term * 2_000_000 / margin, abs=1e-10)

    def test_divergent_margin_rejected(self):
        with pytest.raises(ConvergenceError):
            hyp3f2_at_1(2, 2, 2, 1, 1)
        with pytest.raises(ConvergenceError):
            hyp3f2_at_1(1, 1, 1, -2, 5)

    def test_slow_margin_warns(self):
        # margin 0.03: the warning must fire; with such a margin the sum
        # may legitimately also exhaust its term budget
        with pytest.warns(PrecisionWarning):
            try:
                hyp3f2_at_1(1.0, 1.0, 1.0, 1.51, 1.52,
                            SeriesControl(rel_tol=1e-6, max_terms=100_000))
            except PrecisionError:
                pass

    def test_max_terms_exhaustion(self):
        ctl = SeriesControl(rel_tol=1e-12, max_terms=50)
        with pytest.raises(PrecisionError):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", PrecisionWarning)
                hyp3f2_at_1(1.0, 1.0, 1.0, 2.05, 1.06, ctl)

    def test_control_validation(self):
        with pytest.raises(ValueError):
            SeriesControl(rel_tol=0.0)
        with pytest.raises(ValueError):
            SeriesControl(max_terms=0)
