"""Reproducing kernels of the annulus and the disk, and their conditioned forms.

The annulus kernels are all theta-function closed forms in the variable
z*conj(w); bilateral mode sums are retained as independent oracles.  The
disk variants are the q -> 0 rational limits and are implemented directly
(never by evaluating annulus formulas at tiny q).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .elliptic import eisenstein_p, special_values, wp_of_z
from .errors import (
    DegenerateAnchor,
    OutOfAnnulus,
    OutOfDisk,
    OutOfDomain,
    PoleAtPowerOfQ,
    UnsupportedModulus,
)
from .theta import EPS_DEFAULT, TRUNC_MAX, check_modulus, qpoch, theta, truncation_order

ANCHOR_MIN_SEPARATION = 1e-8


@lru_cache(maxsize=256)
def q0_constant(q: float, eps: float = EPS_DEFAULT) -> float:
    """q_0 = (q^2; q^2)_inf, the Dedekind-eta style prefactor."""
    check_modulus(q)
    return float(qpoch(q * q, q * q, eps=eps).real)


def in_annulus(z, q: float) -> bool:
    a = np.abs(z)
    return bool(np.all((a > q) & (a < 1.0)))


def _check_theta_pole(arg, q: float) -> None:
    p = q * q
    for v in np.asarray(arg, dtype=complex).ravel():
        n_star = round(np.log(abs(v)) / np.log(p))
        pole = p**n_star
        if abs(v - pole) < 1e-12 * abs(pole):
            raise PoleAtPowerOfQ(f"theta argument {v} at power q^{2 * n_star}")


def jordan_kronecker(z, a, q: float, method: str = "theta", eps: float = EPS_DEFAULT):
    """Jordan-Kronecker function f(z, a) = sum_n z^n / (1 - a q^{2n}).

    The theta closed form q0^2*theta(z*a)/(theta(z)*theta(a)) analytically
    continues the sum to the whole punctured plane; method="series" keeps the
    bilateral sum (valid for q^2 < |z| < 1) as an oracle.
    """
    check_modulus(q)
    p = q * q
    if method == "theta":
        _check_theta_pole(z, q)
        _check_theta_pole(a, q)
        return q0_constant(q, eps) ** 2 * theta(np.asarray(z) * a, p, eps) / (
            theta(z, p, eps) * theta(a, p, eps)
        )
    if method != "series":
        raise ValueError(f"unknown method {method!r}")
    az = abs(complex(z))
    if not p < az < 1.0:
        raise OutOfAnnulus(f"series mode needs q^2 < |z| < 1, got |z|={az}")
    total = 1.0 / (1.0 - a)
    for n in range(1, TRUNC_MAX):
        pn = p**n
        term = z**n / (1.0 - a * pn) + z ** (-n) * pn / (pn - a)
        total += term
        if abs(term) < eps * (1 + abs(total)) and n >= 8:
            break
    return total


def szego_annulus(z, w, r, q: float, method: str = "theta", eps: float = EPS_DEFAULT):
    """Weighted Szego kernel of the annulus, S(z, w; r) = f(z*conj(w), -r).

    r is the positive weight parameter; complex r is admitted for the
    analytic continuations used by the log-derivative identity.
    """
    if np.imag(r) == 0 and np.real(r) <= 0:
        raise OutOfDomain(f"weight r must be positive, got {r}")
    zw = np.asarray(z) * np.conj(np.asarray(w))
    return jordan_kronecker(zw, -r, q, method=method, eps=eps)


def szego_disk(z, w, r: float | None = None):
    """Szego kernel of the disk, optionally with inner weight r at the origin."""
    zw = np.asarray(z) * np.conj(np.asarray(w))
    if r is None:
        return 1.0 / (1.0 - zw)
    return (1.0 + r * zw) / ((1.0 + r) * (1.0 - zw))


def bergman_disk(z, w):
    """Bergman kernel of the disk, 1/(1 - z*conj(w))^2."""
    zw = np.asarray(z) * np.conj(np.asarray(w))
    return 1.0 / (1.0 - zw) ** 2


def bergman_annulus(z, w, q: float, method: str = "series", eps: float = EPS_DEFAULT):
    """Bergman kernel of the annulus.

    Default is the mode sum; method="wp" uses the Weierstrass closed form
    -1/(2 log q)/zw - (wp(phi_zw) + P/12)/zw as an independent route.
    """
    check_modulus(q)
    if not (in_annulus(z, q) and in_annulus(w, q)):
        raise OutOfDomain("both points must lie in the annulus")
    zw = complex(np.asarray(z) * np.conj(np.asarray(w)))
    log_q = np.log(q)
    if method == "wp":
        big_p = eisenstein_p(q, eps)
        return -1.0 / (2.0 * log_q * zw) - (wp_of_z(zw, q, eps) + big_p / 12.0) / zw
    if method != "series":
        raise ValueError(f"unknown method {method!r}")
    total = -1.0 / (2.0 * log_q)
    for n in range(1, TRUNC_MAX):
        qq = q ** (2 * n)
        term = n * (zw**n + qq * zw ** (-n)) / (1.0 - qq)
        total += term
        if abs(term) < eps * (1 + abs(total)) and n >= 8:
            break
    return total / zw


def bergman(z, w, q: float | None = None, domain: str = "annulus", **kw):
    """Bergman kernel dispatcher over domain in {"disk", "annulus"}."""
    if domain == "disk":
        a = np.abs(np.asarray(z)), np.abs(np.asarray(w))
        if np.any(a[0] >= 1) or np.any(a[1] >= 1):
            raise OutOfDisk("points must lie inside the unit disk")
        return bergman_disk(z, w)
    if domain == "annulus":
        if q is None:
            raise UnsupportedModulus("annulus Bergman kernel needs q")
        return bergman_annulus(z, w, q, **kw)
    raise OutOfDomain(f"unknown domain {domain!r}")


@lru_cache(maxsize=256)
def szego_bergman_constant(q: float, eps: float = EPS_DEFAULT) -> float:
    """The constant a(q) in S(z,w)^2 = K(z,w) + a(q)/(z*conj(w)).

    Evaluated by its two independent expressions, e2 + P/12 + 1/(2 log q)
    and the alternating Lambert sum; they must agree to 1e-12.
    """
    check_modulus(q)
    sv = special_values(q, eps)
    expr1 = sv.e2 + sv.big_p / 12.0 + 1.0 / (2.0 * np.log(q))
    total = 0.0
    for n in range(1, TRUNC_MAX):
        term = -2.0 * (-1) ** n * n * q**n / (1.0 - q ** (2 * n))
        total += term
        if abs(term) < eps and n >= 8:
            break
    expr2 = total + 1.0 / (2.0 * np.log(q))
    if abs(expr1 - expr2) > 1e-12 * (1.0 + abs(expr1)):
        raise UnsupportedModulus(f"a(q) expressions disagree at q={q}: {expr1} vs {expr2}")
    return expr1


def slit_map(z, alpha, q: float, eps: float = EPS_DEFAULT):
    """Conformal map of the annulus onto the disk minus a circular slit.

    Vanishes at alpha, has modulus 1 on |z|=1 and modulus |alpha| on |z|=q;
    the elliptic counterpart of the disk Mobius map, to which it degenerates
    at q = 0.
    """
    z = np.asarray(z, dtype=complex)
    if q == 0.0:
        return (z - alpha) / (1.0 - np.conj(alpha) * z)
    p = q * q
    return z * theta(alpha / z, p, eps) / theta(np.conj(alpha) * z, p, eps)


def ahlfors_map(z, alpha, q: float, method: str = "product", eps: float = EPS_DEFAULT):
    """Two-to-one holomorphic map of the annulus onto the disk.

    Vanishes exactly at alpha and at its q-inversion partner -q/conj(alpha).
    method="theta" evaluates the equivalent single theta-ratio form.
    """
    check_modulus(q)
    z = np.asarray(z, dtype=complex)
    alpha_hat = -q / np.conj(alpha)
    if method == "product":
        return slit_map(z, alpha, q, eps) * slit_map(z, alpha_hat, q, eps) / z
    if method != "theta":
        raise ValueError(f"unknown method {method!r}")
    p = q * q
    ca = np.conj(alpha)
    num = theta(-q * z * ca, p, eps) * theta(alpha / z, p, eps)
    den = theta(-q * z / alpha, p, eps) * theta(ca * z, p, eps)
    return z * num / den


def conditional_kernel(base, anchors, z, w, tol: float = 1e-12):
    """Kernel conditioned to vanish at the anchors, by Schur-complement recursion.

    base is a hermitian kernel callable k(z, w); anchors are consumed in
    order, each step replacing k by k - k(.,a)k(a,.)/k(a,a).  The result is
    anchor-order independent up to roundoff.
    """
    anchors = list(anchors)
    for i in range(len(anchors)):
        for j in range(i + 1, len(anchors)):
            if abs(anchors[i] - anchors[j]) < ANCHOR_MIN_SEPARATION:
                raise DegenerateAnchor(
                    f"anchors {anchors[i]} and {anchors[j]} closer than "
                    f"{ANCHOR_MIN_SEPARATION}"
                )

    def step(k, a):
        kaa = k(a, a)
        if abs(kaa) <= tol:
            raise DegenerateAnchor(f"k(a,a)={kaa} at anchor {a}")

        def conditioned(x, y, _k=k, _a=a, _kaa=kaa):
            return _k(x, y) - _k(x, _a) * _k(_a, y) / _kaa

        return conditioned

    k = base
    for a in anchors:
        k = step(k, a)
    return k(z, w)


def conditional_szego_annulus(z, w, r: float, q: float, anchors, eps: float = EPS_DEFAULT):
    """Closed form of the conditioned weighted Szego kernel.

    The anchors re-weight the kernel (r -> r * prod |a|^2) and contribute a
    product of slit-map factors in each argument.
    """
    anchors = list(anchors)
    weight = r * float(np.prod([abs(a) ** 2 for a in anchors]))
    gz = np.prod([slit_map(z, a, q, eps) for a in anchors])
    gw = np.prod([slit_map(w, a, q, eps) for a in anchors])
    return szego_annulus(z, w, weight, q, eps=eps) * gz * np.conj(gw)


def log_deriv_residual(z, w, r: float, q: float, h: float = 1e-4, eps: float = EPS_DEFAULT):
    """Relative residual of the second log-derivative identity of the kernel.

    Compares d^2/dz d(conj w) log S(z,w;r), formed from 4-point central
    differences of S itself (no logs, so no branch-cut jumps), against
    theta(-r)/theta(-r (z conj w)^2) * S(z, w; r z conj w)^2.  The residual
    is finite-difference limited, around h^2 + 1e-16/h^2.
    """
    v = np.conj(complex(w))
    z = complex(z)

    def f(zz, vv):
        return jordan_kronecker(zz * vv, -r, q, eps=eps)

    f0 = f(z, v)
    fz = (f(z + h, v) - f(z - h, v)) / (2 * h)
    fv = (f(z, v + h) - f(z, v - h)) / (2 * h)
    fzv = (f(z + h, v + h) - f(z + h, v - h) - f(z - h, v + h) + f(z - h, v - h)) / (4 * h * h)
    lhs = (fzv * f0 - fz * fv) / (f0 * f0)
    zw = z * v
    p = q * q
    rhs = theta(-r, p, eps) / theta(-r * zw * zw, p, eps) * szego_annulus(z, w, r * zw, q, eps=eps) ** 2
    return abs(lhs - rhs) / abs(rhs)
