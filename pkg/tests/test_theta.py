import numpy as np
import pytest

from annulus_gaf import errors, log_theta_deriv, qpoch, theta, theta_prime_at_one, theta_series
from conftest import rand_annulus


def qpoch_oracle(a, p):
    # direct partial products until the increment is below 1e-16
    out, term, i = 1.0 + 0j, complex(a), 0
    while True:
        new = out * (1 - term)
        if abs(new - out) < 1e-16 and i > 4:
            return new
        out, term, i = new, term * p, i + 1


class TestQPochhammer:
    def test_zero_argument_is_one(self):
        assert qpoch(0.0, 0.25) == 1.0

    def test_zero_nome_single_factor(self):
        assert qpoch(0.3, 0.0) == pytest.approx(0.7, abs=0)

    def test_against_partial_product_oracle(self):
        expected = qpoch_oracle(0.25, 0.25)
        assert qpoch(0.25, 0.25) == pytest.approx(expected, rel=1e-14)

    def test_finite_product(self):
        assert qpoch(0.5, 0.5, n=2) == pytest.approx((1 - 0.5) * (1 - 0.25))

    def test_nome_out_of_range(self):
        with pytest.raises(errors.NonConvergent):
            qpoch(0.5, 1.0)


class TestTheta:
    def test_small_nome_limit(self):
        assert theta(0.5, 1e-18) == pytest.approx(0.5, rel=1e-15)

    def test_zero_at_nome(self):
        assert theta(0.04, 0.04) == 0.0

    def test_zero_at_one_and_inverse_nome(self):
        assert theta(1.0, 0.09) == 0.0
        # 1/p is not exactly representable; the zero survives to rounding level
        assert abs(theta(1.0 / 0.09, 0.09)) < 1e-13

    def test_minimum_on_negative_axis(self):
        p = 0.25
        expected = np.prod([(1 + p ** (n - 0.5)) ** 2 for n in range(1, 80)])
        assert theta(-np.sqrt(p), p) == pytest.approx(expected, rel=1e-13)

    def test_zero_argument_raises(self):
        with pytest.raises(errors.ZeroArgument):
            theta(0.0, 0.1)

    def test_inversion_formula(self, rng):
        p = 0.3**2
        for _ in range(100):
            z = rand_annulus(rng, p)
            lhs = theta(1.0 / z, p)
            rhs = -theta(z, p) / z
            assert abs(lhs - rhs) <= 1e-12 * abs(rhs)

    def test_quasi_periodicity_and_periodicity(self, rng):
        p = 0.35**2
        for _ in range(100):
            z = rand_annulus(rng, p)
            assert theta(p * z, p) == pytest.approx(-theta(z, p) / z, rel=1e-12)
            assert theta(p / z, p) == pytest.approx(theta(z, p), rel=1e-12)

    def test_conjugation(self, rng):
        p = 0.45**2
        for _ in range(25):
            z = rand_annulus(rng, p)
            assert np.conj(theta(z, p)) == pytest.approx(theta(np.conj(z), p), rel=1e-14)

    def test_triple_product_series_cross_check(self, rng):
        for p in (0.04, 0.3, 0.6):
            for _ in range(34):
                z = rand_annulus(rng, p)
                prod = theta(z, p)
                series = theta_series(z, p)
                assert abs(prod - series) <= 1e-10 * max(abs(prod), 1e-10)

    def test_sign_pattern_on_real_axis(self):
        p = 0.2
        for i in range(-2, 3):
            for x in np.linspace(p ** (2 * i + 1), p ** (2 * i), 9)[1:-1]:
                assert theta(x, p).real > 0
            for x in np.linspace(p ** (2 * i), p ** (2 * i - 1), 9)[1:-1]:
                assert theta(x, p).real < 0
        for x in np.geomspace(1e-3, 1e3, 13):
            assert theta(-x, p).real > 0

    def test_weierstrass_addition_formula(self, rng):
        p = 0.3**2
        for _ in range(100):
            x, y, u, v = (
                rng.uniform(np.sqrt(p), 1.0) * np.exp(2j * np.pi * rng.uniform())
                for _ in range(4)
            )
            t1 = theta(x * y, p) * theta(x / y, p) * theta(u * v, p) * theta(u / v, p)
            t2 = theta(x * v, p) * theta(x / v, p) * theta(u * y, p) * theta(u / y, p)
            t3 = (u / y) * theta(y * v, p) * theta(y / v, p) * theta(x * u, p) * theta(x / u, p)
            scale = max(abs(t1), abs(t2), abs(t3))
            assert abs(t1 - t2 - t3) <= 1e-12 * scale


class TestThetaPrime:
    def test_small_nome(self):
        assert theta_prime_at_one(1e-18) == pytest.approx(-1.0)

    def test_product_form(self):
        p = 0.04
        assert theta_prime_at_one(p) == pytest.approx(-(qpoch(p, p).real ** 2), rel=1e-14)

    def test_finite_difference_oracle(self):
        h = 1e-6
        for p in (0.02, 0.2, 0.5):
            fd = (theta(1 + h, p) - theta(1 - h, p)) / (2 * h)
            assert theta_prime_at_one(p) == pytest.approx(fd.real, rel=1e-7)


# central stencils for d^n/dt^n log theta(z e^t) at t=0, O(h^4)
_LOG_FD = {
    1: ([-2, -1, 1, 2], [1 / 12, -8 / 12, 8 / 12, -1 / 12], 1),
    2: ([-2, -1, 0, 1, 2], [-1 / 12, 16 / 12, -30 / 12, 16 / 12, -1 / 12], 2),
    3: ([-3, -2, -1, 1, 2, 3], [1 / 8, -1, 13 / 8, -13 / 8, 1, -1 / 8], 3),
    4: ([-3, -2, -1, 0, 1, 2, 3], [-1 / 6, 2, -13 / 2, 28 / 3, -13 / 2, 2, -1 / 6], 4),
}


class TestLogThetaDeriv:
    def test_special_values_at_minus_one(self):
        for p in (0.04, 0.3, 0.55):
            assert log_theta_deriv(1, -1.0, p) == pytest.approx(0.5, abs=1e-13)
            assert abs(log_theta_deriv(3, -1.0, p)) < 1e-13
            a4 = log_theta_deriv(4, -1.0, p)
            expected = -2.0 * (theta_prime_at_one(p) / theta(-1.0, p).real) ** 4
            assert a4.real == pytest.approx(expected, rel=1e-12)

    def test_matches_log_fd_in_log_coordinates(self):
        h = 0.02
        for p, z in [(0.09, 0.55), (0.25, 0.7), (0.49, -0.8)]:
            f = lambda t: np.log(theta(z * np.exp(t), p))
            for order, (offsets, coeffs, pw) in _LOG_FD.items():
                def fd_at(step):
                    return sum(c * f(k * step) for k, c in zip(offsets, coeffs)) / step**pw

                # stencils are O(h^4); one Richardson level cleans the tail
                fd = (16.0 * fd_at(h / 2) - fd_at(h)) / 15.0
                an = log_theta_deriv(order, z, p)
                assert abs(an - fd) <= 1e-6 * max(abs(an), 1.0)

    def test_pole_guard(self):
        with pytest.raises(errors.PoleAtZero):
            log_theta_deriv(1, 1.0 + 1e-15, 0.2)

    def test_order_validation(self):
        with pytest.raises(ValueError):
            log_theta_deriv(5, 0.5, 0.2)
