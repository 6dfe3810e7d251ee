import numpy as np
import pytest

from annulus_gaf import (
    ahlfors_map,
    bergman,
    bergman_annulus,
    bergman_disk,
    conditional_kernel,
    conditional_szego_annulus,
    errors,
    jordan_kronecker,
    log_deriv_residual,
    q0_constant,
    slit_map,
    szego_annulus,
    szego_bergman_constant,
    szego_disk,
    theta,
)
from conftest import rand_annulus


def jk_series_oracle(z, a, q, n_modes=250):
    total = 1.0 / (1.0 - a)
    for n in range(1, n_modes):
        p2 = q ** (2 * n)
        total += z**n / (1 - a * p2) + z ** (-n) * p2 / (p2 - a)
    return total


class TestJordanKronecker:
    def test_symmetry_and_value(self):
        q = 0.4
        z, a = 0.5 + 0.2j, -0.3
        assert jordan_kronecker(z, a, q) == pytest.approx(jordan_kronecker(a, z, q), rel=1e-13)
        assert jordan_kronecker(z, a, q) == pytest.approx(jk_series_oracle(z, a, q), rel=1e-12)

    def test_shift_in_second_argument(self, rng):
        q = 0.35
        for _ in range(30):
            z, a = rand_annulus(rng, q), rand_annulus(rng, q)
            lhs = jordan_kronecker(z, a, q)
            rhs = z * jordan_kronecker(z, a * q * q, q)
            assert abs(lhs - rhs) <= 1e-11 * abs(lhs)

    def test_small_q_limit(self):
        z, a = 0.3, 0.2
        val = jordan_kronecker(z, a, 1e-6)
        assert val == pytest.approx((1 - z * a) / ((1 - z) * (1 - a)), rel=1e-10)

    def test_series_mode_domain(self):
        with pytest.raises(errors.OutOfAnnulus):
            jordan_kronecker(1.5, 0.3, 0.4, method="series")

    def test_pole_detection(self):
        with pytest.raises(errors.PoleAtPowerOfQ):
            jordan_kronecker(0.4**2, 0.3, 0.4)


class TestSzegoAnnulus:
    def test_zero_at_q_inversion_point(self):
        q, alpha = 0.3, 0.6 + 0.1j
        zhat = -q / np.conj(alpha)
        assert abs(szego_annulus(zhat, alpha, q, q)) < 1e-14

    def test_small_q_limit(self):
        z, w, r = 0.5, 0.4 + 0.3j, 0.7
        val = szego_annulus(z, w, r, 1e-6)
        zw = z * np.conj(w)
        assert val == pytest.approx((1 + r * zw) / ((1 + r) * (1 - zw)), rel=1e-10)

    def test_series_vs_theta(self):
        z, w, r, q = 0.5, 0.4 + 0.3j, 0.7, 0.35
        a = szego_annulus(z, w, r, q)
        b = szego_annulus(z, w, r, q, method="series")
        assert abs(a - b) <= 1e-12 * abs(a)

    def test_hermitian_symmetry(self, rng):
        q, r = 0.3, 0.8
        for _ in range(30):
            z, w = rand_annulus(rng, q), rand_annulus(rng, q)
            assert np.conj(szego_annulus(w, z, r, q)) == pytest.approx(
                szego_annulus(z, w, r, q), rel=1e-13
            )

    def test_gram_matrix_psd(self, rng):
        q, r = 0.35, 0.6
        for n in (3, 6):
            pts = rand_annulus(rng, q, n)
            gram = np.array([[szego_annulus(a, b, r, q) for b in pts] for a in pts])
            vals = np.linalg.eigvalsh(gram)
            assert vals.min() >= -1e-10 * vals.sum()

    def test_functional_equations(self, rng):
        q, r = 0.4, 0.55
        for _ in range(30):
            z, w = rand_annulus(rng, q), rand_annulus(rng, q)
            s = szego_annulus(z, w, r, q)
            assert szego_annulus(q * q * z, w, r, q) == pytest.approx(-s / r, rel=1e-12)
            assert szego_annulus(z, w, q * q * r, q) == pytest.approx(
                s / (z * np.conj(w)), rel=1e-12
            )

    def test_diagonal_monotone_in_weight(self):
        q, z = 0.3, 0.62
        vals = [szego_annulus(z, z, r, q).real for r in np.linspace(0.1, 2.0, 12)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_qr_inversion_of_covariance(self, rng):
        # sqrt(T') conj(sqrt(T')) S(Tz, Tw; r) = (q/r) S(z, w; q^2/r)
        q, r = 0.35, 0.7
        for _ in range(30):
            z, w = rand_annulus(rng, q), rand_annulus(rng, q)
            zw = z * np.conj(w)
            lhs = (q / zw) * szego_annulus(q / z, q / w, r, q)
            rhs = (q / r) * szego_annulus(z, w, q * q / r, q)
            assert abs(lhs - rhs) <= 1e-12 * abs(rhs)


class TestSzegoDisk:
    def test_center_values(self):
        assert szego_disk(0.0, 0.0) == pytest.approx(1.0)
        assert szego_disk(0.0, 0.0, r=0.5) == pytest.approx(1.0 / 1.5)

    def test_large_weight_limit(self):
        z, w = 0.4, 0.3 + 0.2j
        zw = z * np.conj(w)
        val = szego_disk(z, w, r=1e9)
        assert val == pytest.approx(1.0 / (1.0 - zw) - 1.0, rel=1e-8)


class TestBergman:
    def test_disk_center(self):
        assert bergman_disk(0.0, 0.0) == pytest.approx(1.0)

    def test_annulus_series_vs_wp_form(self):
        z, w, q = 0.5, 0.6j, 0.3
        a = bergman_annulus(z, w, q)
        b = bergman_annulus(z, w, q, method="wp")
        assert abs(a - b) <= 1e-11 * abs(a)

    def test_value_at_szego_zero(self, rng):
        # K(-q/conj(w), w) = a(q)/q
        q = 0.35
        w = rand_annulus(rng, q)
        val = bergman_annulus(-q / np.conj(w), w, q)
        assert val == pytest.approx(szego_bergman_constant(q) / q, abs=1e-12)

    def test_dispatcher_domain(self):
        with pytest.raises(errors.OutOfDisk):
            bergman(1.5, 0.2, domain="disk")
        with pytest.raises(errors.OutOfDomain):
            bergman(0.5, 0.5, q=0.3, domain="torus")


class TestSzegoBergmanConstant:
    def test_small_q_limit(self):
        assert abs(szego_bergman_constant(1e-5)) < 1e-4

    def test_dual_expressions_agree(self):
        # the constructor itself asserts agreement to 1e-12
        assert szego_bergman_constant(0.4) == pytest.approx(szego_bergman_constant(0.4))

    def test_squared_kernel_relation(self, rng):
        q = 0.45
        a = szego_bergman_constant(q)
        for _ in range(30):
            z, w = rand_annulus(rng, q), rand_annulus(rng, q)
            lhs = szego_annulus(z, w, q, q) ** 2
            rhs = bergman_annulus(z, w, q) + a / (z * np.conj(w))
            assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), 1.0)


class TestSlitMap:
    def test_vanishes_at_alpha(self, rng):
        q = 0.3
        alpha = rand_annulus(rng, q)
        assert slit_map(alpha, alpha, q) == 0.0

    def test_boundary_moduli(self, rng):
        q, alpha = 0.3, 0.55 + 0.2j
        for phi in np.linspace(0, 2 * np.pi, 17):
            assert abs(slit_map(np.exp(1j * phi), alpha, q)) == pytest.approx(1.0, rel=1e-12)
            assert abs(slit_map(q * np.exp(1j * phi), alpha, q)) == pytest.approx(
                abs(alpha), rel=1e-12
            )

    def test_interior_contraction(self, rng):
        q, alpha = 0.3, 0.55 + 0.2j
        for _ in range(50):
            z = rand_annulus(rng, q)
            assert 0.0 < abs(slit_map(z, alpha, q)) < 1.0

    def test_derivative_at_alpha(self):
        q, alpha, h = 0.3, 0.6 + 0.1j, 1e-6
        fd = (slit_map(alpha + h, alpha, q) - slit_map(alpha - h, alpha, q)) / (2 * h)
        expected = q0_constant(q) ** 2 / theta(abs(alpha) ** 2, q * q)
        assert fd == pytest.approx(expected, rel=1e-7)
        assert expected.real > 0

    def test_mobius_degeneration(self):
        z, alpha = 0.5 + 0.1j, 0.3 - 0.4j
        assert slit_map(z, alpha, 0.0) == pytest.approx(
            (z - alpha) / (1 - np.conj(alpha) * z)
        )


class TestAhlforsMap:
    def test_zeros(self):
        q, alpha = 0.3, 0.55 + 0.2j
        alpha_hat = -q / np.conj(alpha)
        assert ahlfors_map(alpha, alpha, q) == 0.0
        assert abs(ahlfors_map(alpha_hat, alpha, q)) < 1e-14

    def test_maps_into_disk_on_grid(self):
        q, alpha = 0.3, 0.55 + 0.2j
        rad = np.linspace(q * 1.01, 0.99, 50)
        ang = np.linspace(0, 2 * np.pi, 50, endpoint=False)
        zg = rad[:, None] * np.exp(1j * ang[None, :])
        vals = ahlfors_map(zg, alpha, q)
        assert np.abs(vals).max() < 1.0

    def test_theta_ratio_form(self, rng):
        q, alpha = 0.35, 0.5 - 0.25j
        for _ in range(30):
            z = rand_annulus(rng, q)
            a = ahlfors_map(z, alpha, q)
            b = ahlfors_map(z, alpha, q, method="theta")
            assert abs(a - b) <= 1e-12 * max(abs(a), 1e-15)


class TestConditionalKernel:
    def base(self, r, q):
        return lambda z, w: szego_annulus(z, w, r, q)

    def test_annihilation_at_anchor(self, rng):
        q, r = 0.3, 0.6
        alpha, w = rand_annulus(rng, q), rand_annulus(rng, q)
        val = conditional_kernel(self.base(r, q), [alpha], alpha, w)
        assert abs(val) < 1e-12

    def test_mccullough_shen_closed_form(self, rng):
        q, r = 0.35, 0.8
        for _ in range(20):
            z, w, alpha = (rand_annulus(rng, q) for _ in range(3))
            lhs = conditional_kernel(self.base(r, q), [alpha], z, w)
            rhs = (
                szego_annulus(z, w, r * abs(alpha) ** 2, q)
                * slit_map(z, alpha, q)
                * np.conj(slit_map(w, alpha, q))
            )
            assert abs(lhs - rhs) <= 1e-10 * max(abs(rhs), 1e-10)

    def test_three_anchor_closed_form(self, rng):
        q, r = 0.3, 0.5
        anchors = [rand_annulus(rng, q) for _ in range(3)]
        z, w = rand_annulus(rng, q), rand_annulus(rng, q)
        lhs = conditional_kernel(self.base(r, q), anchors, z, w)
        rhs = conditional_szego_annulus(z, w, r, q, anchors)
        assert abs(lhs - rhs) <= 1e-9 * max(abs(rhs), 1e-10)

    def test_anchor_order_invariance(self, rng):
        q, r = 0.3, 0.5
        anchors = [rand_annulus(rng, q) for _ in range(3)]
        z, w = rand_annulus(rng, q), rand_annulus(rng, q)
        a = conditional_kernel(self.base(r, q), anchors, z, w)
        b = conditional_kernel(self.base(r, q), anchors[::-1], z, w)
        assert abs(a - b) <= 1e-10 * max(abs(a), 1e-10)

    def test_degenerate_anchor_rejection(self):
        q, r = 0.3, 0.5
        with pytest.raises(errors.DegenerateAnchor):
            conditional_kernel(self.base(r, q), [0.5, 0.5 + 1e-10], 0.6, 0.7)


class TestLogDerivIdentity:
    def test_interior_residual(self):
        assert log_deriv_residual(0.5, 0.5, 0.3, 0.3) < 1e-5

    def test_random_points(self, rng):
        q = 0.3
        for _ in range(5):
            z, w = rand_annulus(rng, q), rand_annulus(rng, q)
            assert log_deriv_residual(z, w, 0.45, q) < 1e-4

    def test_disk_limit_recovers_bergman(self):
        # q -> 0, r -> 0: d_z d_wbar log S_D = S_D^2 = K_D
        z, w, h = 0.4, 0.35 - 0.2j, 1e-4
        v = np.conj(w)
        f = lambda zz, vv: 1.0 / (1.0 - zz * vv)
        f0 = f(z, v)
        fz = (f(z + h, v) - f(z - h, v)) / (2 * h)
        fv = (f(z, v + h) - f(z, v - h)) / (2 * h)
        fzv = (f(z + h, v + h) - f(z + h, v - h) - f(z - h, v + h) + f(z - h, v - h)) / (
            4 * h * h
        )
        lhs = (fzv * f0 - fz * fv) / f0**2
        assert lhs == pytest.approx(bergman_disk(z, w), rel=1e-6)
