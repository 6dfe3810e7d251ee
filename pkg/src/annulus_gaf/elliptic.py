"""Weierstrass elliptic machinery on the rectangular lattice (2*pi, 2*pi*tau).

The lattice is fixed by the modulus q in (0,1): omega_1 = pi and
tau = -i*log(q)/pi, so the half-period ratio is purely imaginary and the
lattice points, written in the coordinate z = exp(i*phi), are exactly the
integer powers of q**2.  All series below are expansions in that coordinate
and converge on the whole punctured plane away from those powers.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .errors import OutOfAnnulus, OutOfBranch, PoleAtLattice, UnsupportedModulus
from .theta import EPS_DEFAULT, TRUNC_MAX, check_modulus, log_theta_deriv

# special_values admits a slightly larger modulus than the theta machinery;
# plain Lambert sums stay accurate where the products would not.
SPECIAL_Q_MAX = 0.98

LATTICE_TOL = 1e-8


@dataclass(frozen=True)
class LatticeParams:
    """Modulus q with the derived half-period ratio |tau| = -log(q)/pi."""

    q: float
    tau_abs: float
    eps: float = EPS_DEFAULT

    @classmethod
    def from_q(cls, q: float, eps: float = EPS_DEFAULT) -> "LatticeParams":
        check_modulus(q)
        return cls(q=q, tau_abs=-np.log(q) / np.pi, eps=eps)


@dataclass(frozen=True)
class SpecialValues:
    """Half-period values e1 > e2 > e3, invariants g2, g3, Eisenstein P."""

    e1: float
    e2: float
    e3: float
    g2: float
    g3: float
    big_p: float


def _lambert_sum(f, q: float, eps: float) -> float:
    """Sum f(n) for n = 1, 2, ... until terms drop below eps relatively."""
    total = 0.0
    for n in range(1, TRUNC_MAX + 1):
        t = f(n)
        total += t
        if abs(t) < eps * (1.0 + abs(total)) and n >= 8:
            return total
    raise UnsupportedModulus("Lambert sum did not converge; q too close to 1")


@lru_cache(maxsize=256)
def special_values(q: float, eps: float = EPS_DEFAULT) -> SpecialValues:
    """e1, e2, e3, g2, g3 and the Eisenstein-type constant P for modulus q.

    q = 0 returns the exact limits (1/6, -1/12, -1/12, 1/12, 1/216, 1).
    """
    if q == 0.0:
        return SpecialValues(1 / 6, -1 / 12, -1 / 12, 1 / 12, 1 / 216, 1.0)
    if not 0.0 < q <= SPECIAL_Q_MAX:
        raise UnsupportedModulus(f"q={q} outside (0, {SPECIAL_Q_MAX}]")
    s2 = _lambert_sum(lambda n: q ** (2 * n) / (1 - q ** (2 * n)) ** 2, q, eps)
    t1 = _lambert_sum(lambda n: q ** (2 * n) / (1 + q ** (2 * n)) ** 2, q, eps)
    t2 = _lambert_sum(lambda n: q ** (2 * n - 1) / (1 + q ** (2 * n - 1)) ** 2, q, eps)
    t3 = _lambert_sum(lambda n: q ** (2 * n - 1) / (1 - q ** (2 * n - 1)) ** 2, q, eps)
    e1 = 1 / 6 + 2 * s2 + 2 * t1
    e2 = -1 / 12 + 2 * s2 + 2 * t2
    e3 = -1 / 12 + 2 * s2 - 2 * t3
    g2 = 2 * (e1 * e1 + e2 * e2 + e3 * e3)
    g3 = 4 * e1 * e2 * e3
    return SpecialValues(e1, e2, e3, g2, g3, 1.0 - 24.0 * s2)


def eisenstein_p(q: float, eps: float = EPS_DEFAULT) -> float:
    """P(q) = 1 - 24 * sum q^{2n}/(1-q^{2n})^2 (equals the weight-2 Lambert sum)."""
    return special_values(q, eps).big_p


def _check_lattice_distance(z: complex, q: float) -> None:
    p = q * q
    n_star = round(np.log(abs(z)) / np.log(p)) if abs(z) != 1.0 else 0
    pole = p**n_star
    if abs(z - pole) < LATTICE_TOL * abs(pole):
        raise PoleAtLattice(f"z={z} within {LATTICE_TOL} of lattice point {pole}")


# u/(1-u)^2 and its first two Euler derivatives; wp and its phi-derivatives
# are lattice sums of these.
def _m0(u):
    return u / (1.0 - u) ** 2


def _m1(u):
    return u * (1.0 + u) / (1.0 - u) ** 3


def _m2(u):
    return u * (1.0 + 4.0 * u + u * u) / (1.0 - u) ** 4


def _lattice_fold(f, z, q: float, sign: float, eps: float):
    p = q * q
    total = f(z)
    pm = p
    for _ in range(TRUNC_MAX):
        term = f(z * pm) + sign * f(pm / z)
        total = total + term
        pm *= p
        if np.max(np.abs(term)) < eps * (1.0 + np.max(np.abs(total))):
            return total
    raise UnsupportedModulus("lattice sum did not converge; q too close to 1")


def wp_of_z(z, q: float, eps: float = EPS_DEFAULT):
    """Weierstrass wp at the angle phi_z = -i*log(z), in the coordinate z."""
    check_modulus(q)
    z = np.asarray(z, dtype=complex)
    if z.ndim == 0:
        _check_lattice_distance(complex(z), q)
    sv = special_values(q, eps)
    const = -1 / 12 + (1 - sv.big_p) / 12  # -1/12 + 2*S2
    out = const - _lattice_fold(_m0, z, q, +1.0, eps)
    return complex(out) if out.ndim == 0 else out


def wp(phi, q: float, eps: float = EPS_DEFAULT):
    """Weierstrass wp(phi) on the lattice (2*pi, 2*pi*tau_q)."""
    return wp_of_z(np.exp(1j * np.asarray(phi)), q, eps)


def wp_derivs(phi, q: float, eps: float = EPS_DEFAULT):
    """(wp', wp'') at phi, by term-wise differentiation of the z-series."""
    check_modulus(q)
    z = np.exp(1j * np.asarray(phi, dtype=complex))
    if z.ndim == 0:
        _check_lattice_distance(complex(z), q)
    d1 = -1j * _lattice_fold(_m1, z, q, -1.0, eps)
    d2 = _lattice_fold(_m2, z, q, +1.0, eps)
    if z.ndim == 0:
        return complex(d1), complex(d2)
    return d1, d2


def wp_dual(phi, q: float, eps: float = EPS_DEFAULT):
    """wp via the imaginary transformation (series in exp(-2*pi*n/|tau|)).

    Valid for 0 < Re(phi) < 2*pi; fast for q near 1.  Diagnostic twin of
    :func:`wp` used in cross-checks.
    """
    lat = LatticeParams.from_q(q, eps)
    ta = lat.tau_abs
    phi = complex(phi)
    total = 1 / 12 + 0.25 / np.sinh(phi / (2 * ta)) ** 2
    en = np.exp(-2 * np.pi / ta)
    pm = en
    for n in range(1, TRUNC_MAX):
        term = -2 * pm / (1 - pm) ** 2 + 2 * n * pm * np.cosh(n * phi / ta) / (1 - pm)
        total += term
        pm *= en
        if abs(term) < eps * (1 + abs(total)) and n >= 4:
            break
    return total / ta**2


def wp_inverse(x: float, q: float, eps: float = EPS_DEFAULT) -> float:
    """The y >= 0 with wp(pi + i*y) = x, for x in [e2, e1].

    Evaluates y = (1/2) * int_x^{e1} ds/sqrt((e1-s)(s-e2)(s-e3)) after the
    substitutions s = e1 - t^2, t = t_max*sin(psi) which remove the endpoint
    singularities at both s = e1 and (when x = e2) s = e2.
    """
    sv = special_values(q, eps)
    tol = 1e-12 * (sv.e1 - sv.e3)
    if not sv.e2 - tol <= x <= sv.e1 + tol:
        raise OutOfBranch(f"x={x} outside [e2, e1] = [{sv.e2}, {sv.e1}]")
    x = min(max(x, sv.e2), sv.e1)
    tmax2 = sv.e1 - x
    if tmax2 == 0.0:
        return 0.0
    tmax = np.sqrt(tmax2)
    a, b = sv.e1 - sv.e2, sv.e1 - sv.e3

    def integrand(psi):
        s2 = tmax2 * np.sin(psi) ** 2
        return tmax * np.cos(psi) / np.sqrt((a - s2) * (b - s2))

    y, _ = quad(integrand, 0.0, np.pi / 2, epsabs=1e-13, epsrel=1e-13, limit=200)
    return y


def ramanujan_rho1(z, q: float, method: str = "theta", eps: float = EPS_DEFAULT):
    """Ramanujan rho_1(z) = 1/2 + sum_{n != 0} z^n / (1 - q^{2n}).

    method="series" sums the bilateral series directly (needs q^2 < |z| < 1);
    method="theta" uses rho_1 = 1/2 - a_1 and is valid off the theta zeros.
    """
    z = np.asarray(z, dtype=complex)
    if method == "theta":
        return 0.5 - log_theta_deriv(1, z, q * q, eps)
    if method != "series":
        raise ValueError(f"unknown method {method!r}")
    az = np.abs(z)
    if np.any(az <= q * q) or np.any(az >= 1.0):
        raise OutOfAnnulus("series form needs q^2 < |z| < 1")
    total = 0.5 * np.ones_like(z)
    for n in range(1, TRUNC_MAX):
        qq = q ** (2 * n)
        term = (z**n - qq * z ** (-n)) / (1 - qq)
        total = total + term
        if np.max(np.abs(term)) < eps and n >= 8:
            break
    return complex(total) if total.ndim == 0 else total


def weierstrass_zeta(phi, q: float, eps: float = EPS_DEFAULT):
    """Weierstrass zeta(phi) via its Fourier form; needs |Im phi| < -2*log q."""
    check_modulus(q)
    phi = complex(phi)
    eta1 = np.pi * eisenstein_p(q, eps) / 12.0
    total = eta1 * phi / np.pi + 0.5 / np.tan(phi / 2.0)
    for n in range(1, TRUNC_MAX):
        qq = q ** (2 * n)
        term = 2.0 * qq / (1 - qq) * np.sin(n * phi)
        total += term
        if abs(term) < eps * (1 + abs(total)) and n >= 8:
            break
    return total


def annulus_to_slit_halfplane(z, q: float, method: str = "rho1", eps: float = EPS_DEFAULT):
    """Conformal map from the annulus onto the upper half-plane minus a slit.

    Production route is the Villat-kernel shortcut 2i*rho_1(z); the
    Weierstrass-zeta route (-2*(zeta(phi_z) + i*eta_1*log(z)/pi)) is retained
    as a diagnostic twin.  Sends -1 -> 0, +1 -> infinity, +-q -> i.
    """
    zc = complex(z)
    if not q < abs(zc) < 1.0:
        raise OutOfAnnulus(f"|z|={abs(zc)} outside ({q}, 1)")
    if method == "rho1":
        return 2j * ramanujan_rho1(zc, q, eps=eps)
    if method == "zeta":
        phi = -1j * np.log(zc)
        eta1 = np.pi * eisenstein_p(q, eps) / 12.0
        return -2.0 * (weierstrass_zeta(phi, q, eps) + 1j * (eta1 / np.pi) * np.log(zc))
    raise ValueError(f"unknown method {method!r}")
