"""Sampling Gaussian Laurent series, locating their zeros, and Monte Carlo checks.

Coefficients are standard complex Gaussians (E|zeta|^2 = 1, each component
N(0, 1/2)) scaled by the deterministic mode weights of the target covariance.
Zeros come from the companion matrix (small degree) or a Gauss-Seidel
Aberth-Ehrlich iteration (numba), both polished by Newton steps on the
Laurent series itself.  Replica RNG streams derive from (seed, replica), so
serial and parallel schedules agree.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from . import kernels
from .errors import (
    InsufficientStatistics,
    NonConvergedRoot,
    OutOfDomain,
    TruncationInsufficient,
)
from .pointprocess import density_annulus, density_disk, g_antipodal
from .theta import check_modulus

TAIL_TOL = 1e-10
RESIDUAL_TOL = 1e-8
DEFAULT_MODE_CAP = 600
COMPANION_MAX_DEGREE = 400


@dataclass(frozen=True)
class LaurentSample:
    """One draw of a truncated Gaussian Laurent series."""

    coeffs: np.ndarray  # complex coefficients for modes n_min .. n_min+len-1
    n_min: int
    q: float
    r: float
    modes: int
    seed: object
    kind: str  # "annulus" | "disk" | "annulus_sq"

    @property
    def powers(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_min + len(self.coeffs))


@dataclass(frozen=True)
class ZeroSet:
    """Zeros found inside the margin annulus, with the polish residual."""

    zeros: np.ndarray
    inner: float
    outer: float
    residual_max: float


@dataclass(frozen=True)
class EstimateWithError:
    """Monte Carlo scalar with its standard error."""

    value: float
    std_error: float
    n_samples: int


def _complex_gaussians(rng, n: int) -> np.ndarray:
    z = rng.standard_normal((n, 2))
    return (z[:, 0] + 1j * z[:, 1]) / np.sqrt(2.0)


def annulus_mode_scales(q: float, r: float, n: np.ndarray) -> np.ndarray:
    """Deterministic weights 1/sqrt(1 + r q^{2n}), overflow-safe for n << 0."""
    out = np.empty(len(n), dtype=float)
    pos = n >= 0
    out[pos] = 1.0 / np.sqrt(1.0 + r * q ** (2.0 * n[pos]))
    m = -n[~pos]
    out[~pos] = q**m / np.sqrt(q ** (2.0 * m) + r)
    return out


def gaf2_mode_scales(q: float, n: np.ndarray) -> np.ndarray:
    """Weights of the squared-kernel GAF: sqrt((n+1)/(1-q^{2(n+1)})), with the
    n = -1 mode carrying sqrt(a(q) - 1/(2 log q))."""
    a = kernels.szego_bergman_constant(q)
    c_m1 = a - 1.0 / (2.0 * np.log(q))
    assert c_m1 > 0.0
    out = np.empty(len(n), dtype=float)
    for i, nn in enumerate(n):
        if nn == -1:
            out[i] = np.sqrt(c_m1)
        elif nn >= 0:
            out[i] = np.sqrt((nn + 1.0) / (1.0 - q ** (2.0 * (nn + 1))))
        else:
            m = -(nn + 1)  # (n+1)/(1-q^{2(n+1)}) = m q^{2m}/(1-q^{2m}) for n <= -2
            out[i] = np.sqrt(m * q ** (2.0 * m) / (1.0 - q ** (2.0 * m)))
    return out


def sample_gaf_annulus(q: float, r: float, modes: int, seed) -> LaurentSample:
    """Draw the annulus GAF with covariance S(z, w; r), modes -N..N."""
    check_modulus(q)
    if modes < 1:
        raise ValueError("modes must be >= 1")
    n = np.arange(-modes, modes + 1)
    rng = np.random.default_rng(seed)
    coeffs = _complex_gaussians(rng, len(n)) * annulus_mode_scales(q, r, n)
    return LaurentSample(coeffs, -modes, q, r, modes, seed, "annulus")


def sample_gaf_disk(r: float, modes: int, seed) -> LaurentSample:
    """Draw the disk GAF with covariance (1 + r z conj(w))/((1+r)(1 - z conj(w)))."""
    if modes < 1:
        raise ValueError("modes must be >= 1")
    rng = np.random.default_rng(seed)
    coeffs = _complex_gaussians(rng, modes + 1)
    coeffs[0] /= np.sqrt(1.0 + r)
    return LaurentSample(coeffs, 0, 0.0, r, modes, seed, "disk")


def sample_gaf2_annulus(q: float, modes: int, seed) -> LaurentSample:
    """Draw the GAF whose covariance is the squared Szego kernel S(z, w)^2."""
    check_modulus(q)
    n = np.arange(-modes, modes + 1)
    rng = np.random.default_rng(seed)
    coeffs = _complex_gaussians(rng, len(n)) * gaf2_mode_scales(q, n)
    return LaurentSample(coeffs, -modes, q, q, modes, seed, "annulus_sq")


def gaf_eval(sample: LaurentSample, z):
    """Evaluate the truncated Laurent series at z (vectorized)."""
    z = np.asarray(z, dtype=complex)
    c = sample.coeffs
    k0 = -sample.n_min
    pos = c[k0:] if k0 >= 0 else c
    out = np.polynomial.polynomial.polyval(z, pos)
    if k0 > 0:
        u = 1.0 / z
        neg = c[:k0][::-1]  # a_{-1}, a_{-2}, ...
        out = out + u * np.polynomial.polynomial.polyval(u, neg)
    return out


def gaf_eval_deriv(sample: LaurentSample, z):
    """Evaluate the series derivative sum n a_n z^{n-1} at z (vectorized)."""
    z = np.asarray(z, dtype=complex)
    n = sample.powers
    c = sample.coeffs * n
    k0 = -sample.n_min
    pos = c[k0 + 1:] if k0 >= 0 else c
    out = np.polynomial.polynomial.polyval(z, pos)
    if k0 > 0:
        u = 1.0 / z
        neg = c[:k0][::-1]
        out = out + u * u * np.polynomial.polynomial.polyval(u, neg)
    return out


def default_mode_cutoff(q: float, margin: float, tol: float = 1e-12,
                        cap: int = DEFAULT_MODE_CAP) -> int:
    """Mode cutoff so the tail at the margin radii is below tol, capped."""
    ratio = max(q, 1.0 - margin)
    n = int(np.ceil(np.log(tol) / np.log(ratio)))
    return min(max(n, 16), cap)


def _tail_bound(sample: LaurentSample, inner: float, outer: float) -> float:
    n = sample.modes
    q, r = sample.q, sample.r
    grow = np.sqrt(n + 2.0) if sample.kind == "annulus_sq" else 1.0
    tail = grow * outer ** (n + 1) / (1.0 - outer)
    if sample.n_min < 0:
        ratio = q / inner
        amp = 1.0 / np.sqrt(r) if sample.kind == "annulus" else grow / q
        tail += amp * ratio ** (n + 1) / (1.0 - ratio)
    return tail


@njit(cache=True)
def _aberth(c, dc, r_in, r_out, tol, max_iter):  # pragma: no cover - via find_zeros
    d = c.shape[0] - 1
    # two-ring start matching the cluster structure of truncated Laurent
    # series (rings hug both natural boundaries); r_in == r_out is a circle
    x = np.empty(d, np.complex128)
    h = d // 2
    for k in range(d):
        if k < h:
            rad, m, kk = r_in, h, k
        else:
            rad, m, kk = r_out, d - h, k - h
        ang = 2.0 * np.pi * kk / m + 0.35 + 0.1 * (k >= h)
        x[k] = rad * (1.0 + 1e-3 * np.cos(3.7 * k)) * (np.cos(ang) + 1j * np.sin(ang))
    frozen = np.zeros(d, np.bool_)
    for _ in range(max_iter):
        n_active = 0
        for i in range(d):
            if frozen[i]:
                continue
            xi = x[i]
            pv = c[0]
            dv = dc[0]
            for j in range(1, d):
                pv = pv * xi + c[j]
                dv = dv * xi + dc[j]
            pv = pv * xi + c[d]
            if pv == 0.0:
                frozen[i] = True
                continue
            ssum = 0.0 + 0.0j
            for j in range(d):
                if j != i:
                    ssum += 1.0 / (xi - x[j])
            denom = dv - pv * ssum
            if denom == 0.0:
                continue
            delta = pv / denom
            x[i] = xi - delta
            if abs(delta) < tol * (1e-300 + abs(x[i])):
                frozen[i] = True
            else:
                n_active += 1
        if n_active == 0:
            break
    return x


def _poly_roots(coeffs_ascending: np.ndarray, method: str, rings=(1.0, 1.0)) -> np.ndarray:
    c = coeffs_ascending[::-1].astype(np.complex128)  # descending
    degree = len(c) - 1
    if method == "auto":
        # The companion eigenproblem is only trustworthy while the coefficient
        # grading stays within double range: the annulus Laurent polynomials
        # span ~q^N at the bottom and eigenvalue roundoff then fabricates
        # phantom mid-band roots.  Evaluation-based Aberth is immune (Horner
        # in the band is conditioned like eps/|X|), so auto only picks the
        # companion route for mildly graded polynomials.
        nz = np.abs(c[c != 0])
        graded = nz.min() / nz.max() < 1e-8
        method = "companion" if degree <= COMPANION_MAX_DEGREE and not graded else "aberth"
    if method == "companion":
        return np.roots(c)
    if method == "aberth":
        dc = c[:-1] * np.arange(degree, 0, -1)
        return _aberth(c, dc, rings[0], rings[1], 1e-11, 220)
    raise ValueError(f"unknown method {method!r}")


def _local_scale(sample: LaurentSample, z: np.ndarray) -> np.ndarray:
    if sample.kind == "annulus":
        return np.sqrt(
            np.array([kernels.szego_annulus(v, v, sample.r, sample.q).real for v in z])
        )
    if sample.kind == "disk":
        return np.sqrt(np.array([kernels.szego_disk(v, v, sample.r).real for v in z]))
    return np.array([abs(kernels.szego_annulus(v, v, sample.q, sample.q)) for v in z])


def find_zeros(sample: LaurentSample, margin: float, method: str = "auto",
               polish_steps: int = 5) -> ZeroSet:
    """Zeros of the sample inside the margin annulus (or disk).

    The polynomial z^N X(z) is solved globally, roots are filtered to
    inner < |z| < outer and polished by Newton on the Laurent form.  Raises
    TruncationInsufficient when the discarded tail of the series is not
    below TAIL_TOL at the margin radii, and NonConvergedRoot if a polished
    root's residual stays above RESIDUAL_TOL times the local GAF scale.
    """
    q = sample.q
    if sample.kind == "disk":
        if not 0.0 < margin < 0.5:
            raise OutOfDomain("disk margin must be in (0, 1/2)")
        inner, outer = 0.0, 1.0 - margin
    else:
        if not 0.0 < margin < (1.0 - q) / 4.0:
            raise OutOfDomain(f"margin must be in (0, {(1 - q) / 4})")
        inner, outer = q + margin, 1.0 - margin
    if _tail_bound(sample, max(inner, 1e-12), outer) > TAIL_TOL:
        raise TruncationInsufficient(
            f"series tail at radii ({inner}, {outer}) exceeds {TAIL_TOL}; "
            f"raise modes above {sample.modes} or widen the margin"
        )
    rings = (1.0, 1.0) if sample.kind == "disk" else (max(q, 0.05), 1.0)
    roots = _poly_roots(sample.coeffs, method, rings)
    a = np.abs(roots)
    pad = 0.05
    cand = roots[(a > inner * (1 - pad)) & (a < outer * (1 + pad))]
    for _ in range(polish_steps):
        if len(cand) == 0:
            break
        cand = cand - gaf_eval(sample, cand) / gaf_eval_deriv(sample, cand)
    a = np.abs(cand)
    keep = (a > inner) & (a < outer)
    zeros = cand[keep]
    if len(zeros) > 1:  # dedupe polish collisions
        order = np.argsort(zeros.real * 1e6 + zeros.imag)
        zeros = zeros[order]
        distinct = [zeros[0]]
        for v in zeros[1:]:
            if min(abs(v - u) for u in distinct) > 1e-9 * (1.0 + abs(v)):
                distinct.append(v)
        zeros = np.array(distinct)
    if len(zeros):
        resid = np.abs(gaf_eval(sample, zeros)) / _local_scale(sample, zeros)
        residual_max = float(resid.max())
        if residual_max > RESIDUAL_TOL:
            raise NonConvergedRoot(f"max polished residual {residual_max} > {RESIDUAL_TOL}")
    else:
        residual_max = 0.0
    return ZeroSet(zeros=zeros, inner=inner, outer=outer, residual_max=residual_max)


def argument_principle_count(sample: LaurentSample, radius: float,
                             n_points: int = 8192) -> int:
    """Number of zeros with |z| < radius, by the winding of X on the circle.

    The truncated Laurent series has a pole of order N at the origin, which
    is added back to the winding number.
    """
    phi = 2.0 * np.pi * np.arange(n_points + 1) / n_points
    vals = gaf_eval(sample, radius * np.exp(1j * phi))
    winding = np.unwrap(np.angle(vals))
    w = (winding[-1] - winding[0]) / (2.0 * np.pi)
    return int(np.rint(w)) + max(0, -sample.n_min)


@dataclass(frozen=True)
class MCDensityResult:
    """Per-bin intensity estimates against the analytic radial density."""

    edges: np.ndarray
    estimates: list
    expected: np.ndarray
    z_scores: np.ndarray
    residual_max: float = field(default=0.0)


def _bin_measure(lo: float, hi: float) -> float:
    # Lebesgue/pi measure of the annular bin
    return hi * hi - lo * lo


def mc_density(q: float, r: float, n_samples: int, radial_bins: int, seed,
               margin: float | None = None, modes: int | None = None,
               method: str = "aberth") -> MCDensityResult:
    """Monte Carlo radial intensity histogram against the analytic density.

    Disk mode is selected by q = 0.  Estimates are per-bin intensities with
    respect to Lebesgue/pi; expected values are bin averages of the density
    (midpoint-rule integrals on a fine subgrid).
    """
    disk = q == 0.0
    if margin is None:
        margin = 0.25 if disk else 0.02 * (1.0 - q)
    if modes is None:
        modes = default_mode_cutoff(q, margin)
    lo = 0.0 if disk else q + margin
    hi = 1.0 - margin
    edges = np.linspace(lo, hi, radial_bins + 1)
    counts = np.zeros((n_samples, radial_bins))
    residual_max = 0.0
    for i in range(n_samples):
        sample = (
            sample_gaf_disk(r, modes, (seed, i))
            if disk
            else sample_gaf_annulus(q, r, modes, (seed, i))
        )
        zs = find_zeros(sample, margin, method=method)
        residual_max = max(residual_max, zs.residual_max)
        counts[i], _ = np.histogram(np.abs(zs.zeros), bins=edges)
    measures = np.array([_bin_measure(edges[k], edges[k + 1]) for k in range(radial_bins)])
    mean = counts.mean(axis=0) / measures
    se = counts.std(axis=0, ddof=1) / np.sqrt(n_samples) / measures
    expected = np.empty(radial_bins)
    for k in range(radial_bins):
        # bin average of the density: (2 int s rho(s) ds) / (hi^2 - lo^2)
        sub = np.linspace(edges[k], edges[k + 1], 401)
        mid = 0.5 * (sub[:-1] + sub[1:])
        dens = density_disk(mid, r) if disk else density_annulus(mid, r, q)
        integral = float(np.sum(2.0 * mid * dens) * (sub[1] - sub[0]))
        expected[k] = integral / measures[k]
    z = np.abs(mean - expected) / se
    ests = [EstimateWithError(float(m), float(e), n_samples) for m, e in zip(mean, se)]
    return MCDensityResult(edges, ests, expected, z, residual_max)


@dataclass(frozen=True)
class MCPairResult:
    """Unfolded pair estimate at the antipodal geometry, and its analytic value."""

    estimate: EstimateWithError
    analytic: float
    n_joint: int


def _cell_intensity_integral(center: complex, cell: float, r: float, q: float,
                             n: int = 61) -> float:
    g = (np.arange(n) + 0.5) / n * 2.0 * cell - cell
    dx, dy = np.meshgrid(g, g)
    pts = center + dx + 1j * dy
    mask = np.abs(pts - center) < cell
    dens = density_annulus(np.abs(pts[mask]), r, q) if q > 0 else density_disk(
        np.abs(pts[mask]), r
    )
    area = (2.0 * cell / n) ** 2
    return float(np.sum(dens) * area / np.pi)


def mc_pair_statistic(q: float, r: float, x: float, n_samples: int, seed,
                      cell: float = 0.035, n_rotations: int = 12,
                      margin: float | None = None, modes: int | None = None,
                      method: str = "aberth") -> MCPairResult:
    """Monte Carlo estimate of the unfolded antipodal 2-correlation at (-x, x).

    Counts joint zero occupancy of disk cells around the rotated pair
    (-x e^{i t}, x e^{i t}) (rotation invariance makes every rotation an
    estimate of the same quantity), unfolds by the analytic one-point
    integrals over the cells, and compares to g_antipodal(x; r).
    """
    if margin is None:
        margin = min(0.02 * (1.0 - q), (x - cell - q) / 2.0)
    if not (q + margin < x - cell and x + cell < 1.0 - margin):
        raise OutOfDomain("pair cells must lie inside the margin annulus")
    if modes is None:
        modes = default_mode_cutoff(q, margin)
    thetas = np.pi * (np.arange(n_rotations) + 0.31) / n_rotations
    centers = x * np.exp(1j * thetas)
    stats = np.zeros(n_samples)
    joint = 0
    for i in range(n_samples):
        sample = sample_gaf_annulus(q, r, modes, (seed, i))
        zeros = find_zeros(sample, margin, method=method).zeros
        tot = 0.0
        if len(zeros):
            d_plus = np.abs(zeros[:, None] - centers[None, :]) < cell
            d_minus = np.abs(zeros[:, None] + centers[None, :]) < cell
            na = d_plus.sum(axis=0)
            nb = d_minus.sum(axis=0)
            prod = na * nb
            joint += int(prod.sum())
            tot = float(prod.sum()) / n_rotations
        stats[i] = tot
    if joint < 50:
        raise InsufficientStatistics(f"only {joint} joint pair events; need >= 50")
    denom = _cell_intensity_integral(complex(x), cell, r, q) ** 2
    value = stats.mean() / denom
    se = stats.std(ddof=1) / np.sqrt(n_samples) / denom
    return MCPairResult(
        estimate=EstimateWithError(float(value), float(se), n_samples),
        analytic=g_antipodal(x, r, q),
        n_joint=joint,
    )


def conditional_covariance_check(q: float, r: float, anchors, probes,
                                 n_samples: int, seed,
                                 modes: int | None = None) -> float:
    """Max standardized residual between sampled and analytic conditioned covariance.

    Samples the conditioned GAF directly as gamma(z) * X^{r prod |a|^2}(z)
    (the slit-map prefactor times the re-weighted GAF) and compares its
    empirical covariance on the probe pairs with the Schur-complement kernel.
    """
    anchors = [complex(a) for a in anchors]
    probes = [complex(z) for z in probes]
    weight = r * float(np.prod([abs(a) ** 2 for a in anchors]))
    if modes is None:
        rho_hi = max(abs(z) for z in probes)
        rho_lo = min(abs(z) for z in probes)
        ratio = max(rho_hi, q / rho_lo)
        modes = min(max(int(np.ceil(np.log(1e-12) / np.log(ratio))), 32), DEFAULT_MODE_CAP)
    n = np.arange(-modes, modes + 1)
    scales = annulus_mode_scales(q, weight, n)
    rng = np.random.default_rng((seed, 0))
    zmat = np.asarray(probes)[:, None] ** n[None, :]  # (probes, modes)
    gam = np.array([np.prod([kernels.slit_map(z, a, q) for a in anchors]) for z in probes])
    raw = rng.standard_normal((n_samples, len(n), 2))
    coeffs = (raw[..., 0] + 1j * raw[..., 1]) / np.sqrt(2.0) * scales[None, :]
    y = (coeffs @ zmat.T) * gam[None, :]
    base = lambda a, b: kernels.szego_annulus(a, b, r, q)
    worst = 0.0
    for ia in range(len(probes)):
        for ib in range(len(probes)):
            prods = y[:, ia] * np.conj(y[:, ib])
            expected = kernels.conditional_kernel(base, anchors, probes[ia], probes[ib])
            for part in (np.real, np.imag):
                vals = part(prods)
                se = vals.std(ddof=1) / np.sqrt(n_samples)
                resid = abs(vals.mean() - part(expected)) / max(se, 1e-300)
                worst = max(worst, resid)
    return worst
