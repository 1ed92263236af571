"""Special-function and quadrature primitives against independent oracles."""

import math

import numpy as np
import pytest

from plcvlc.specfun import (QuadratureRule, binomial_coeff, gauss_legendre_rule,
                            std_normal_cdf, std_normal_log_cdf, upper_incomplete_gamma)


def erf_series(x: float) -> float:
    """Maclaurin series for erf, exact summation; oracle for moderate |x|."""
    terms = []
    term = x
    n = 0
    while abs(term) > 1e-20:
        terms.append(term / (2 * n + 1))
        n += 1
        term *= -x * x / n
    return 2.0 / math.sqrt(math.pi) * math.fsum(terms)


def erfc_continued_fraction(x: float, iters: int = 200) -> float:
    """Laplace continued fraction for erfc(x), x > 0; independent of math.erfc."""
    # erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + 1/2/(x + 2/2/(x + 3/2/(x + ...))))
    acc = 0.0
    for k in range(iters, 0, -1):
        acc = (k / 2.0) / (x + acc)
    return math.exp(-x * x) / math.sqrt(math.pi) / (x + acc)


class TestStdNormalCdf:
    def test_symmetry_point(self):
        assert std_normal_cdf(0.0) == 0.5

    def test_tail_limit(self):
        assert abs(std_normal_cdf(8.0) - 1.0) < 1e-15

    def test_value_at_one_vs_series_oracle(self):
        oracle = 0.5 * (1.0 + erf_series(1.0 / math.sqrt(2.0)))
        assert oracle == pytest.approx(0.8413447460685429, abs=1e-15)
        assert std_normal_cdf(1.0) == pytest.approx(oracle, rel=1e-13)

    def test_relative_accuracy_grid(self):
        # against the series/continued-fraction oracle across |x| <= 8
        # (series while it is well conditioned, Laplace CF in the tails)
        for x in np.linspace(-8.0, 8.0, 81):
            if abs(x) <= 4.0:
                oracle = 0.5 * (1.0 + erf_series(x / math.sqrt(2)))
            elif x > 0:
                oracle = 1.0 - 0.5 * erfc_continued_fraction(x / math.sqrt(2))
            else:
                oracle = 0.5 * erfc_continued_fraction(-x / math.sqrt(2))
            assert std_normal_cdf(float(x)) == pytest.approx(oracle, rel=1e-12)

    def test_reflection_property(self):
        xs = np.linspace(-8.0, 8.0, 161)
        total = std_normal_cdf(xs) + std_normal_cdf(-xs)
        assert np.max(np.abs(total - 1.0)) < 1e-13

    def test_monotone(self):
        xs = np.linspace(-10.0, 10.0, 2001)
        assert np.all(np.diff(std_normal_cdf(xs)) >= 0.0)

    def test_log_cdf_deep_tail(self):
        # asymptotic ln Phi(-x) ~ -x^2/2 - ln(x sqrt(2 pi)) + ln(1 - 1/x^2 + 3/x^4)
        x = 40.0
        asym = -0.5 * x * x - math.log(x * math.sqrt(2 * math.pi)) \
            + math.log1p(-1 / x**2 + 3 / x**4)
        assert std_normal_log_cdf(-x) == pytest.approx(asym, rel=1e-6)


class TestUpperIncompleteGamma:
    def test_half_at_zero_is_sqrt_pi(self):
        assert upper_incomplete_gamma(0.5, 0.0) == pytest.approx(math.sqrt(math.pi), rel=1e-14)

    def test_p_one_is_exponential(self):
        for x in (0.0, 0.3, 1.0, 5.0, 40.0):
            assert upper_incomplete_gamma(1.0, x) == pytest.approx(math.exp(-x), rel=1e-13)

    def test_half_one_vs_erfc_oracle(self):
        oracle = math.sqrt(math.pi) * erfc_continued_fraction(1.0)
        assert oracle == pytest.approx(0.2788055852806620, rel=1e-12)
        assert upper_incomplete_gamma(0.5, 1.0) == pytest.approx(oracle, rel=1e-12)

    @pytest.mark.parametrize("p", [1, 2, 3, 5, 8])
    def test_integer_p_closed_form(self, p):
        # Gamma(p, x) = (p-1)! e^-x sum_{j<p} x^j/j!
        for x in (0.1, 1.0, 3.7, 12.0):
            closed = math.factorial(p - 1) * math.exp(-x) * math.fsum(
                x**j / math.factorial(j) for j in range(p))
            assert upper_incomplete_gamma(float(p), x) == pytest.approx(closed, rel=1e-10)

    def test_strictly_decreasing_in_x(self):
        xs = np.linspace(0.0, 20.0, 200)
        vals = upper_incomplete_gamma(0.7, xs)
        assert np.all(np.diff(vals) < 0.0)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            upper_incomplete_gamma(0.0, 1.0)
        with pytest.raises(ValueError):
            upper_incomplete_gamma(-1.0, 1.0)
        with pytest.raises(ValueError):
            upper_incomplete_gamma(0.5, -0.1)


class TestGaussLegendre:
    def test_one_point_is_midpoint_rule(self):
        rule = gauss_legendre_rule(1)
        assert rule.nodes == (0.0,)
        assert rule.weights == (2.0,)

    def test_two_point_rule(self):
        rule = gauss_legendre_rule(2)
        assert rule.nodes[1] == pytest.approx(1.0 / math.sqrt(3.0), abs=1e-15)
        assert rule.nodes[0] == -rule.nodes[1]
        assert rule.weights == pytest.approx((1.0, 1.0), abs=1e-14)

    def test_x30_with_16_points(self):
        rule = gauss_legendre_rule(16)
        assert rule.integrate(lambda t: t**30, -1.0, 1.0) == pytest.approx(2.0 / 31.0, rel=1e-12)

    @pytest.mark.parametrize("order", [1, 2, 3, 8, 16, 32, 64])
    def test_invariants(self, order):
        rule = gauss_legendre_rule(order)
        x = np.array(rule.nodes)
        w = np.array(rule.weights)
        assert np.all(np.diff(x) > 0)
        assert np.all((x > -1.0) & (x < 1.0))
        assert np.max(np.abs(x + x[::-1])) <= 1e-14
        assert np.all(w > 0)
        assert abs(w.sum() - 2.0) < 1e-12

    @pytest.mark.parametrize("order", [2, 5, 16, 64])
    def test_monomial_exactness(self, order):
        rule = gauss_legendre_rule(order)
        for j in range(0, 2 * order, max(1, order // 3)):
            exact = 0.0 if j % 2 else 2.0 / (j + 1)
            got = rule.integrate(lambda t, j=j: t**j, -1.0, 1.0)
            if exact == 0.0:
                assert abs(got) < 1e-14
            else:
                assert got == pytest.approx(exact, rel=1e-10)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            gauss_legendre_rule(0)
        with pytest.raises(ValueError):
            gauss_legendre_rule(257)

    def test_rule_is_deterministic_and_frozen(self):
        a = gauss_legendre_rule(33)
        b = gauss_legendre_rule(33)
        assert a.nodes == b.nodes and a.weights == b.weights
        with pytest.raises(Exception):
            a.order = 5  # frozen dataclass

    def test_inconsistent_rule_rejected(self):
        with pytest.raises(ValueError):
            QuadratureRule(order=2, nodes=(0.0,), weights=(2.0,))


class TestBinomialCoeff:
    def test_pascal_triangle_oracle(self):
        triangle = [[1]]
        for n in range(1, 21):
            prev = triangle[-1]
            triangle.append([1] + [prev[i - 1] + prev[i] for i in range(1, n)] + [1])
        for n in range(21):
            for k in range(n + 1):
                assert binomial_coeff(n, k) == triangle[n][k]

    def test_examples(self):
        assert binomial_coeff(4, 2) == 6
        assert binomial_coeff(10, 5) == 252
        assert binomial_coeff(12, 0) == 1

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            binomial_coeff(3, 4)
        with pytest.raises(ValueError):
            binomial_coeff(65, 1)
        with pytest.raises(ValueError):
            binomial_coeff(-1, 0)
