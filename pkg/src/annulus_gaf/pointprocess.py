"""Permanental-determinantal correlation functions and the critical weight curve.

The n-point correlation of the zero process is a perdet (permanent times
determinant) of the re-weighted Szego kernel matrix, with a theta prefactor;
the disk forms are the q -> 0 rational limits, implemented by substituting
theta(x) -> 1 - x in the same expressions.
"""

from __future__ import annotations

import math
from collections import namedtuple
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations

import numpy as np

from .elliptic import special_values, wp_inverse, wp_of_z
from .errors import (
    DimensionMismatch,
    OutOfAnnulus,
    OutOfDisk,
    OutOfDomain,
    OutOfRange,
    UnsupportedModulus,
)
from .kernels import in_annulus, q0_constant, szego_annulus, szego_disk
from .theta import EPS_DEFAULT, check_modulus, theta

COINCIDENCE_TOL = 1e-12
PERMANENT_NAIVE_MAX = 8
PERMANENT_MAX = 12

# r0(q) switches from the defining quadrature to the sqrt(q) asymptotic here:
# beyond it e1-e2 ~ exp(-pi^2/ln(1/q)) degrades in double precision while
# |r0 - sqrt(q)| is already < 1e-8.
R0_ASYMPTOTIC_Q = 0.6


@lru_cache(maxsize=16)
def _perms_with_signs(n: int):
    out = []
    for perm in permutations(range(n)):
        inv = sum(perm[i] > perm[j] for i in range(n) for j in range(i + 1, n))
        out.append((perm, -1.0 if inv % 2 else 1.0))
    return out


def _require_square(m) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    return m


def permanent(m, method: str = "auto"):
    """Permanent of a square matrix.

    Naive permutation sum up to 8x8, Ryser's inclusion-exclusion formula up
    to 12x12 (method="naive"/"ryser" forces a route).
    """
    m = _require_square(m)
    n = m.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    if method == "auto":
        method = "naive" if n <= PERMANENT_NAIVE_MAX else "ryser"
    if method == "naive":
        if n > PERMANENT_NAIVE_MAX:
            raise DimensionMismatch(f"naive permanent capped at n={PERMANENT_NAIVE_MAX}")
        idx = np.arange(n)
        return complex(sum(np.prod(m[idx, perm]) for perm, _ in _perms_with_signs(n)))
    if method == "ryser":
        if n > PERMANENT_MAX:
            raise DimensionMismatch(f"permanent capped at n={PERMANENT_MAX}")
        total = 0.0 + 0.0j
        for mask in range(1, 1 << n):
            cols = [j for j in range(n) if mask >> j & 1]
            rowsums = m[:, cols].sum(axis=1)
            total += (-1.0) ** len(cols) * np.prod(rowsums)
        return complex((-1.0) ** n * total)
    raise ValueError(f"unknown method {method!r}")


def determinant(m):
    """Determinant of a square matrix (LAPACK)."""
    return complex(np.linalg.det(_require_square(m).astype(complex)))


def perdet(m):
    """per(M) * det(M)."""
    m = _require_square(m)
    return permanent(m) * determinant(m)


def hyperdet23(c, method: str = "reduced"):
    """Gegenbauer hyperdeterminant of a cubic tensor, alternating in slots 2 and 3.

    (1/n!) sum over permutation triples with signs on the last two slots.
    The default factors out the first permutation by relabeling (an exact
    identity), leaving an n!^2 sum; method="triple" keeps the literal n!^3
    sum as an oracle.
    """
    c = np.asarray(c)
    if c.ndim != 3 or len(set(c.shape)) != 1:
        raise DimensionMismatch(f"expected an n x n x n tensor, got shape {c.shape}")
    n = c.shape[0]
    if n > 5:
        raise DimensionMismatch("hyperdet capped at n=5")
    perms = _perms_with_signs(n)
    rng_n = range(n)
    if method == "reduced":
        total = 0.0 + 0.0j
        for p2, s2 in perms:
            for p3, s3 in perms:
                prod = 1.0 + 0.0j
                for ell in rng_n:
                    prod *= c[ell, p2[ell], p3[ell]]
                total += s2 * s3 * prod
        return complex(total)
    if method == "triple":
        total = 0.0 + 0.0j
        for p1, _ in perms:
            for p2, s2 in perms:
                for p3, s3 in perms:
                    prod = 1.0 + 0.0j
                    for ell in rng_n:
                        prod *= c[p1[ell], p2[ell], p3[ell]]
                    total += s2 * s3 * prod
        return complex(total / math.factorial(n))
    raise ValueError(f"unknown method {method!r}")


def _coincident(points) -> bool:
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            if abs(points[i] - points[j]) < COINCIDENCE_TOL * (1.0 + abs(points[i])):
                return True
    return False


def rho_annulus(points, r: float, q: float, eps: float = EPS_DEFAULT) -> float:
    """n-point correlation of the annulus zero process w.r.t. Lebesgue/pi.

    theta(-r)/theta(-r prod|z_k|^4) * perdet[S(z_i, z_j; r prod|z_l|^2)];
    exactly 0 when two points coincide.
    """
    points = [complex(z) for z in points]
    if len(points) > PERMANENT_NAIVE_MAX:
        raise DimensionMismatch(f"correlation order capped at {PERMANENT_NAIVE_MAX}")
    if not all(in_annulus(z, q) for z in points):
        raise OutOfAnnulus("all points must satisfy q < |z| < 1")
    if _coincident(points):
        return 0.0
    p = q * q
    prod2 = float(np.prod([abs(z) ** 2 for z in points]))
    mat = np.array(
        [[szego_annulus(zi, zj, r * prod2, q, eps=eps) for zj in points] for zi in points]
    )
    pref = theta(-r, p, eps) / theta(-r * prod2 * prod2, p, eps)
    return float((pref * perdet(mat)).real)


def rho_disk(points, r: float) -> float:
    """n-point correlation of the disk zero process (q -> 0 limit form)."""
    points = [complex(z) for z in points]
    if len(points) > PERMANENT_NAIVE_MAX:
        raise DimensionMismatch(f"correlation order capped at {PERMANENT_NAIVE_MAX}")
    if not all(abs(z) < 1.0 for z in points):
        raise OutOfDisk("all points must satisfy |z| < 1")
    if _coincident(points):
        return 0.0
    prod2 = float(np.prod([abs(z) ** 2 for z in points]))
    mat = np.array([[szego_disk(zi, zj, r * prod2) for zj in points] for zi in points])
    pref = (1.0 + r) / (1.0 + r * prod2 * prod2)
    return float((pref * perdet(mat)).real)


def density_annulus(abs_z, r: float, q: float, eps: float = EPS_DEFAULT):
    """Radial zero density q0^4 theta(-r,-r s^4) / theta(-r s^2, s^2)^2, s = |z|."""
    check_modulus(q)
    s = np.asarray(abs_z, dtype=float)
    if np.any(s <= q) or np.any(s >= 1.0):
        raise OutOfAnnulus("density defined for q < |z| < 1")
    p = q * q
    s2 = s * s
    q0 = q0_constant(q, eps)
    val = (
        q0**4
        * theta(-r, p, eps)
        * theta(-r * s2 * s2, p, eps)
        / (theta(-r * s2, p, eps) * theta(s2, p, eps)) ** 2
    )
    return np.real(val) if np.ndim(val) else float(np.real(val))


def density_disk(abs_z, r: float):
    """Radial zero density (1+r)(1+r s^4) / ((1+r s^2)^2 (1-s^2)^2) on the disk."""
    s = np.asarray(abs_z, dtype=float)
    if np.any(s >= 1.0):
        raise OutOfDisk("density defined for |z| < 1")
    s2 = s * s
    val = (1 + r) * (1 + r * s2 * s2) / ((1 + r * s2) ** 2 * (1 - s2) ** 2)
    return val if np.ndim(val) else float(val)


def _theta_env(q, eps):
    """Evaluator for theta factors: annulus thetas, or their 1-x disk limits."""
    if q is None:
        return lambda x: 1.0 - np.asarray(x, dtype=complex) if np.ndim(x) else 1.0 - complex(x)
    check_modulus(q)
    p = q * q
    return lambda x: theta(x, p, eps)


def unfolded_g(z, w, r: float, q: float | None = None, domain: str = "annulus",
               eps: float = EPS_DEFAULT) -> float:
    """Unfolded 2-correlation rho2(z,w)/(rho1(z) rho1(w)), by its closed form.

    domain="disk" (or q=None) evaluates the rational q -> 0 limit directly.
    """
    z, w = complex(z), complex(w)
    if domain == "disk":
        q = None
    if q is None:
        if not (abs(z) < 1 and abs(w) < 1):
            raise OutOfDisk("points must lie in the unit disk")
    else:
        if not (in_annulus(z, q) and in_annulus(w, q)):
            raise OutOfDomain("points must lie in the annulus")
    th = _theta_env(q, eps)
    a2, b2 = abs(z) ** 2, abs(w) ** 2
    pref = (th(-r * a2) * th(-r * b2) * th(-r * a2 * a2 * b2) * th(-r * a2 * b2 * b2)) ** 2 / (
        th(-r) * th(-r * a2 * a2) * th(-r * b2 * b2) * th(-r * a2 * a2 * b2 * b2)
        * th(-r * a2 * b2) ** 4
    )
    zw = z * np.conj(w)
    brack = 1.0 - (th(a2) * th(b2) / (th(-r * a2 * a2 * b2) * th(-r * a2 * b2 * b2))) ** 2 * abs(
        th(-r * zw * a2 * b2)
    ) ** 4 / abs(th(zw)) ** 4
    return float((pref * brack).real)


def g_extremes(a: float, b: float, r: float, q: float | None = None, sign: int = 1,
               eps: float = EPS_DEFAULT) -> float:
    """Angular extremes of the unfolded 2-correlation at fixed radii a, b.

    sign=-1 gives g(-a, b; r), the maximum over relative angle; sign=+1 gives
    g(a, b; r), the minimum.  q=None evaluates the disk limit.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if q is not None and not (q < a < 1 and q < b < 1):
        raise OutOfAnnulus("radii must lie in (q, 1)")
    if q is None and not (0 < a <= 1 and 0 < b <= 1):
        raise OutOfRange("radii must lie in (0, 1]")
    th = _theta_env(q, eps)
    s = float(sign)
    pref = b**2 * (th(s * a / b) * th(-r * a * a) * th(-r * b * b)) ** 2 / (
        th(-r) * th(-r * a**4) * th(-r * b**4) * th(s * a * b) ** 4 * th(-r * a * a * b * b) ** 3
    )
    brack = th(-r * a**4 * b * b) * th(-r * a * a * b**4) * th(s * a * b) ** 2 + th(a * a) * th(
        b * b
    ) * th(-s * r * a**3 * b**3) ** 2
    return float((pref * brack).real)


def g_same_ray(x: float, r: float, q: float, eps: float = EPS_DEFAULT) -> float:
    """Unfolded correlation of the colliding pair (q/x, x), x in (sqrt(q), 1).

    The two points sit on one ray through the origin and merge as
    x -> sqrt(q); the closed form vanishes quadratically there.
    """
    if not np.sqrt(q) < x < 1.0:
        raise OutOfRange(f"x={x} outside (sqrt(q), 1)")
    th = _theta_env(q, eps)
    x2 = x * x
    pref = (
        r**2
        * th(q * x2) ** 2
        * (th(-r * x2) * th(-x2 / r)) ** 3
        / (x2 * th(q) ** 2 * th(-r) ** 4 * th(-r * x2 * x2) * th(-x2 * x2 / r))
    )
    brack = 1.0 + (th(-r * q) * th(x2)) ** 2 / (th(q) ** 2 * th(-r * x2) * th(-x2 / r))
    return float((pref * brack).real)


def g_same_ray_coefficient(r: float, q: float, eps: float = EPS_DEFAULT) -> float:
    """Coefficient c(r) of the quadratic vanishing of g_same_ray at x = sqrt(q)."""
    th = _theta_env(q, eps)
    q0 = q0_constant(q, eps)
    return float(
        (8 * q0**4 * r**3 * th(-q * r) ** 6 / (q * q * th(q) ** 2 * th(-r) ** 6)).real
    )


def g_antipodal_csq(c: float, r: float, q: float | None = None,
                    eps: float = EPS_DEFAULT, extend: bool = False) -> float:
    """Antipodal unfolded correlation as a function of the squared radius c = x^2.

    extend=True admits c slightly above 1 on the analytic continuation of
    the closed form (used by the derivative stencils at c = 1).
    """
    hi = 1.2 if extend else 1.0
    if q is not None and not q * q < c <= hi:
        raise OutOfRange(f"c={c} outside (q^2, {hi}]")
    if q is None and not 0.0 < c <= hi:
        raise OutOfRange(f"c={c} outside (0, {hi}]")
    th = _theta_env(q, eps)
    pref = c * th(-r * c) ** 4 * (th(-1.0) * th(-r * c**3)) ** 2 / (
        th(-r) * th(-c) ** 2 * th(-r * c * c) ** 5
    )
    brack = 1.0 + (th(c) * th(r * c**3)) ** 2 / (th(-c) * th(-r * c**3)) ** 2
    return float((pref * brack).real)


def g_antipodal(x: float, r: float, q: float | None = None, eps: float = EPS_DEFAULT) -> float:
    """Unfolded correlation of the antipodal pair (-x, x)."""
    if q is not None and not q < x < 1.0:
        raise OutOfRange(f"x={x} outside (q, 1)")
    return g_antipodal_csq(x * x, r, q, eps)


def kappa(r: float, q: float, eps: float = EPS_DEFAULT) -> float:
    """Coefficient of the quartic decay of the antipodal correlation at the edges.

    kappa = 5 wp(phi_{-r})^2 + 2 e1 wp(phi_{-r}) - (e1^2 + g2/2); its sign
    decides whether g_antipodal approaches 1 from below or above.
    """
    if r <= 0:
        raise OutOfRange("r must be positive")
    sv = special_values(q, eps)
    w = wp_of_z(complex(-r), q, eps).real
    return 5.0 * w * w + 2.0 * sv.e1 * w - (sv.e1**2 + sv.g2 / 2.0)


def kappa_disk(r: float) -> float:
    """q -> 0 limit of kappa: -(r^4 + 12 r^3 - 58 r^2 + 12 r + 1)/(16 (1+r)^4)."""
    if r < 0:
        raise OutOfRange("r must be nonnegative")
    return -(r**4 + 12 * r**3 - 58 * r**2 + 12 * r + 1) / (16.0 * (1 + r) ** 4)


# q -> 0 critical weight 2*sqrt(6) - 3 - 2*sqrt(8 - 3*sqrt(6))
R_CRITICAL_DISK = 2.0 * np.sqrt(6.0) - 3.0 - 2.0 * np.sqrt(8.0 - 3.0 * np.sqrt(6.0))


@dataclass(frozen=True)
class CriticalCurvePoint:
    """One point of the sign-change curve r = r0(q) of kappa."""

    q: float
    r0: float
    wp_plus: float
    kappa_at: float | None


def critical_weight(q: float, eps: float = EPS_DEFAULT) -> CriticalCurvePoint:
    """The weight r0(q) where kappa changes sign, q < r0 < 1.

    r0 = exp(-(1/2) int_{wp+}^{e1} ds/sqrt((e1-s)(s-e2)(s-e3))) with
    wp+ = -e1/5 + sqrt(24 e1^2 + 10 g2)/10.  Above R0_ASYMPTOTIC_Q the
    integrand degenerates in double precision and the exponentially accurate
    asymptotic r0 = sqrt(q) is returned instead (kappa_at is None there).
    """
    if not 0.0 < q <= 0.95:
        raise UnsupportedModulus(f"q={q} outside (0, 0.95]")
    sv = special_values(q, eps)
    wp_plus = -sv.e1 / 5.0 + np.sqrt(24.0 * sv.e1**2 + 10.0 * sv.g2) / 10.0
    if q > R0_ASYMPTOTIC_Q:
        r0 = float(np.sqrt(q))
        kappa_at = None
    else:
        y = wp_inverse(wp_plus, q, eps)
        r0 = float(np.exp(-y))
        kappa_at = kappa(r0, q, eps)
    if not q < r0 < 1.0:
        raise UnsupportedModulus(f"computed r0={r0} violates q < r0 < 1")
    return CriticalCurvePoint(q=q, r0=r0, wp_plus=float(wp_plus), kappa_at=kappa_at)


# Central stencils on offsets (-2h, -h, 0, +h, +2h); the closed form is
# analytic at c = 1 so the right half lives on its continuation.
_STENCILS = {
    1: [1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12],  # O(h^4)
    2: [-1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12],  # O(h^4)
    3: [-0.5, 1.0, 0.0, -1.0, 0.5],  # O(h^2)
    4: [1.0, -4.0, 6.0, -4.0, 1.0],  # O(h^2)
}


def g_antipodal_derivs_at_one(r: float, q: float, h: float = 2e-2,
                              eps: float = EPS_DEFAULT):
    """First four derivatives of g_antipodal_csq at c = 1 by central stencils.

    The quartic contact (first three derivatives vanish, the fourth equals
    24*kappa(r)) makes one-sided stencils cancellation-prone; central
    5-point stencils on the analytic continuation with one Richardson level
    on the even-error orders keep the relative error of the fourth
    derivative below ~1e-5.
    """

    def stencil(order, step):
        vals = [
            g_antipodal_csq(1.0 + k * step, r, q, eps, extend=True) for k in (-2, -1, 0, 1, 2)
        ]
        return sum(c * v for c, v in zip(_STENCILS[order], vals)) / step**order

    d1 = stencil(1, h)
    d2 = stencil(2, h)
    # error series of the central 3rd/4th stencils is even in h
    d3 = (4.0 * stencil(3, h / 2) - stencil(3, h)) / 3.0
    d4 = (4.0 * stencil(4, h / 2) - stencil(4, h)) / 3.0
    return d1, d2, d3, d4


def dtilde(a: float, b: float, s: float) -> float:
    """Lower bound surrogate for the disk attraction test: nonnegative on the
    unit box exactly in the repulsive phase."""
    p = lambda x: x + 1.0 / x
    return p(a**7 * b**4 * s**5) + 13.0 * p(a**3 * b**2 * s**3) - 46.0 * p(a**4 * b**2 * s)


PhaseScan = namedtuple("PhaseScan", ["max_g", "argmax", "min_dtilde"])


def repulsive_phase_check(r: float, grid_n: int = 200) -> PhaseScan:
    """Scan the disk maximizer g(-a, b; r) on an (a, b) grid.

    Returns the grid maximum (< 1 exactly in the repulsive phase r < r_c),
    its location, and the minimum of the dtilde diagnostic at s = sqrt(r).
    """
    if grid_n > 400:
        raise OutOfRange("grid_n capped at 400")
    if r < 0:
        raise OutOfRange("r must be nonnegative")
    grid = (np.arange(grid_n) + 0.5) / grid_n
    best, arg = -np.inf, (0.0, 0.0)
    min_dt = np.inf
    s = np.sqrt(r)
    for a in grid:
        for b in grid:
            g = g_extremes(a, b, r, q=None, sign=-1)
            if g > best:
                best, arg = g, (float(a), float(b))
            if s > 0:
                dt = dtilde(a, b, s)
                if dt < min_dt:
                    min_dt = dt
    return PhaseScan(max_g=float(best), argmax=arg, min_dtilde=float(min_dt))


def frobenius_residual(points, s: float, q: float, eps: float = EPS_DEFAULT) -> float:
    """Relative residual of the elliptic Cauchy-determinant evaluation.

    Compares the theta-product expression for the Gram determinant of the
    weighted Szego kernel against det[S(z_i, z_j; s)] with its prefactor.
    """
    points = [complex(z) for z in points]
    n = len(points)
    if n > 6:
        raise DimensionMismatch("frobenius check capped at n=6")
    if not all(in_annulus(z, q) for z in points):
        raise OutOfAnnulus("all points must satisfy q < |z| < 1")
    p = q * q
    lhs = q0_constant(q, eps) ** (2 * n)
    for i in range(n):
        for j in range(i + 1, n):
            lhs *= (
                abs(points[j]) ** 2
                * theta(points[i] / points[j], p, eps)
                * theta(np.conj(points[i]) / np.conj(points[j]), p, eps)
            )
    for i in range(n):
        for j in range(n):
            lhs /= theta(points[i] * np.conj(points[j]), p, eps)
    mat = np.array([[szego_annulus(zi, zj, s, q, eps=eps) for zj in points] for zi in points])
    prod2 = float(np.prod([abs(z) ** 2 for z in points]))
    rhs = theta(-s, p, eps) / theta(-s * prod2, p, eps) * determinant(mat)
    return float(abs(lhs - rhs) / max(abs(rhs), abs(lhs)))
