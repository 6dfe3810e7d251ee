"""q-series bedrock: Pochhammer products, the theta function and its log derivatives.

Everything here works with the nome ``p`` directly; the kernel modules pass
``p = q**2``.  Values are plain complex scalars, but every routine also accepts
numpy arrays and broadcasts over them.
"""

from __future__ import annotations

import numpy as np

from .errors import NonConvergent, PoleAtZero, UnsupportedModulus, ZeroArgument

EPS_DEFAULT = 1e-14
TRUNC_MIN = 8
TRUNC_MAX = 20_000

# Above this modulus the geometric products need >300 terms and double
# precision degrades; refuse rather than silently lose digits.
Q_MAX = 0.95

# |theta| below this (times 1 + |z|) counts as a pole for division guards.
POLE_TOL = 1e-13


def check_modulus(q: float) -> None:
    """Reject moduli outside the supported range (0, Q_MAX]."""
    if not 0.0 < q <= Q_MAX:
        raise UnsupportedModulus(f"q={q} outside supported range (0, {Q_MAX}]")


def truncation_order(p: float, eps: float = EPS_DEFAULT) -> int:
    """Smallest N with p**N < eps, clamped to [TRUNC_MIN, TRUNC_MAX]."""
    if p <= 0.0:
        return TRUNC_MIN
    if p >= 1.0:
        raise NonConvergent(f"nome p={p} is not < 1")
    n = int(np.ceil(np.log(eps) / np.log(p)))
    return min(max(n, TRUNC_MIN), TRUNC_MAX)


def qpoch(a, p: float, n: int | None = None, eps: float = EPS_DEFAULT):
    """q-Pochhammer symbol (a; p)_n, with n=None meaning the infinite product.

    The infinite product is truncated once the running factor a*p**i drops
    below eps in magnitude (the tail is then below eps relatively, since the
    remaining factors are 1 - O(a*p**i)).
    """
    if p < 0.0:
        raise NonConvergent(f"nome p={p} must be nonnegative")
    if n is None and p >= 1.0:
        raise NonConvergent(f"infinite product requires p < 1, got p={p}")
    a = np.asarray(a)
    out = np.ones_like(a, dtype=complex)
    term = a.astype(complex)
    limit = truncation_order(p, eps) if n is None else int(n)
    for i in range(limit):
        out = out * (1.0 - term)
        term = term * p
        if n is None and i >= TRUNC_MIN and np.max(np.abs(term)) < eps:
            break
    if out.ndim == 0:
        return complex(out)
    return out


def theta(z, p: float, eps: float = EPS_DEFAULT):
    """Multiplicative theta function (z; p)_inf (p/z; p)_inf.

    Holomorphic on the punctured plane with simple zeros exactly at the
    integer powers p**i, i in Z.
    """
    z = np.asarray(z)
    if np.any(z == 0):
        raise ZeroArgument("theta(z; p) requires z != 0")
    if p == 0.0:
        out = 1.0 - z.astype(complex)
        return complex(out) if out.ndim == 0 else out
    return qpoch(z, p, eps=eps) * qpoch(p / z, p, eps=eps)


def theta_prod(zs, p: float):
    """Product of theta factors over an iterable of arguments (fold)."""
    out = 1.0 + 0.0j
    for z in zs:
        out = out * theta(z, p)
    return out


def theta_series(z, p: float, eps: float = EPS_DEFAULT):
    """Theta by the Laurent sum (1/(p;p)_inf) * sum_n (-1)^n p^binom(n,2) z^n.

    Independent route to :func:`theta` (Jacobi triple product); converges
    super-geometrically, truncated when the p^binom(n,2) weight of both wings
    falls below eps.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise ZeroArgument("theta_series(z; p) requires z != 0")
    if p == 0.0:
        out = 1.0 - z
        return complex(out) if out.ndim == 0 else out
    total = np.ones_like(z)
    azmax = max(np.max(np.abs(z)), np.max(1.0 / np.abs(z)))
    n = 1
    while True:
        # binom(-n, 2) = n(n+1)/2: the negative wing carries p^{n(n+1)/2} = w * p^n
        w = p ** (n * (n - 1) // 2)
        total = total + (-1) ** n * w * z**n + (-1) ** n * w * p**n * z ** (-n)
        if w * azmax**n < eps and n >= 4:
            break
        n += 1
        if n > TRUNC_MAX:
            raise NonConvergent("theta_series did not converge")
    total = total / qpoch(p, p, eps=eps)
    return complex(total) if total.ndim == 0 else total


def theta_prime_at_one(p: float, eps: float = EPS_DEFAULT) -> float:
    """d theta(z;p)/dz at z=1, equal to -((p;p)_inf)^2."""
    v = qpoch(p, p, eps=eps)
    return -float((v * v).real)


# (u d/du)^n log(1-u) for n = 1..4; the theta log derivative is a lattice sum
# of these with argument u = z p^m or p^m / z.
def _euler_log1m(order: int, u):
    if order == 1:
        return -u / (1.0 - u)
    if order == 2:
        return -u / (1.0 - u) ** 2
    if order == 3:
        return -u * (1.0 + u) / (1.0 - u) ** 3
    if order == 4:
        return -u * (1.0 + 4.0 * u + u * u) / (1.0 - u) ** 4
    raise ValueError(f"order must be 1..4, got {order}")


def log_theta_deriv(order: int, z, p: float, eps: float = EPS_DEFAULT):
    """n-th Euler log derivative a_n(z) = (z d/dz)^n log theta(z; p), n = 1..4.

    Computed from the term-wise differentiated product logarithm; refuses to
    evaluate within POLE_TOL of a theta zero.
    """
    if order not in (1, 2, 3, 4):
        raise ValueError(f"order must be 1..4, got {order}")
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise ZeroArgument("log_theta_deriv requires z != 0")
    tv = theta(z, p, eps=eps)
    if np.any(np.abs(tv) < POLE_TOL * (1.0 + np.abs(z))):
        raise PoleAtZero("z is (numerically) a zero of theta")
    sign = (-1.0) ** order
    total = _euler_log1m(order, z)
    if p > 0.0:
        pm = p
        for _ in range(truncation_order(p, eps)):
            term = _euler_log1m(order, z * pm) + sign * _euler_log1m(order, pm / z)
            total = total + term
            pm *= p
            if np.max(np.abs(term)) < eps * (1.0 + np.max(np.abs(total))):
                break
    return complex(total) if total.ndim == 0 else total
