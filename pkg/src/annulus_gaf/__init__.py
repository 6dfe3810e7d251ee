"""Numerics for zeros of Gaussian Laurent series on an annulus.

Weighted Szego/Bergman kernels in theta-function closed form, Weierstrass
elliptic machinery, permanental-determinantal correlation functions with
their critical weight curve, and Monte Carlo validation by direct sampling
of the Gaussian analytic functions.
"""

__version__ = "0.1.0"

from . import errors
from .elliptic import (
    LatticeParams,
    SpecialValues,
    annulus_to_slit_halfplane,
    eisenstein_p,
    ramanujan_rho1,
    special_values,
    weierstrass_zeta,
    wp,
    wp_derivs,
    wp_inverse,
    wp_of_z,
)
from .gaf import (
    EstimateWithError,
    LaurentSample,
    ZeroSet,
    argument_principle_count,
    conditional_covariance_check,
    default_mode_cutoff,
    find_zeros,
    gaf_eval,
    mc_density,
    mc_pair_statistic,
    sample_gaf2_annulus,
    sample_gaf_annulus,
    sample_gaf_disk,
)
from .identity_suite import run_identity_suite
from .kernels import (
    ahlfors_map,
    bergman,
    bergman_annulus,
    bergman_disk,
    conditional_kernel,
    conditional_szego_annulus,
    jordan_kronecker,
    log_deriv_residual,
    q0_constant,
    slit_map,
    szego_annulus,
    szego_bergman_constant,
    szego_disk,
)
from .pointprocess import (
    R_CRITICAL_DISK,
    CriticalCurvePoint,
    critical_weight,
    density_annulus,
    density_disk,
    determinant,
    frobenius_residual,
    g_antipodal,
    g_antipodal_csq,
    g_antipodal_derivs_at_one,
    g_extremes,
    g_same_ray,
    g_same_ray_coefficient,
    hyperdet23,
    kappa,
    kappa_disk,
    perdet,
    permanent,
    repulsive_phase_check,
    rho_annulus,
    rho_disk,
    unfolded_g,
)
from .theta import log_theta_deriv, qpoch, theta, theta_prime_at_one, theta_prod, theta_series
