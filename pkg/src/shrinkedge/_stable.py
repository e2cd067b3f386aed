"""Overflow-safe hyperbolic building blocks.

Every secular and norm expression in this package is written in a divided
form whose factors are ``kappa*coth(kappa)``, ``kappa*tanh(kappa*eps)`` and
exponentially rescaled ``sinh``/``cosh`` combinations.  The helpers here
evaluate those factors without ever forming ``sinh``/``cosh`` of a large
argument: root arguments reach 1e3 and beyond when an eigenvalue escapes
like 1/eps.  All functions accept scalars or numpy arrays.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "coth",
    "kappa_coth_kappa",
    "dk_kappa_coth_kappa",
    "kappa_tanh",
    "dk_kappa_tanh",
    "phi_split",
    "scaled_sinh2_plus",
    "scaled_sinh2_minus",
    "sqrt_up",
]


def coth(t):
    """coth(t) = 1 + 2/expm1(2t) for t > 0; exact as t -> 0+ and t -> inf."""
    with np.errstate(over="ignore"):
        return 1.0 + 2.0 / np.expm1(2.0 * t)


def kappa_coth_kappa(k):
    """k*coth(k) with the removable value 1 at k = 0."""
    with np.errstate(over="ignore", invalid="ignore"):
        val = k + 2.0 * k / np.expm1(2.0 * k)
    return np.where(np.asarray(k) == 0.0, 1.0, val)


def _k_over_sinh2(k):
    # k/sinh(k)^2 = 4k e^{-2k} / (1 - e^{-2k})^2, underflows cleanly to 0
    u = np.exp(-2.0 * np.asarray(k, dtype=float))
    with np.errstate(invalid="ignore", divide="ignore"):
        return 4.0 * k * u / (1.0 - u) ** 2


def dk_kappa_coth_kappa(k):
    """d/dk [k*coth(k)] = coth(k) - k/sinh(k)^2, series-switched near 0."""
    k = np.asarray(k, dtype=float)
    small = 2.0 * k / 3.0 - 4.0 * k**3 / 45.0 + 4.0 * k**5 / 315.0
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        large = coth(k) - _k_over_sinh2(k)
    return np.where(k < 0.01, small, large)


def kappa_tanh(k, eps):
    """k*tanh(k*eps); tanh saturates, no overflow possible."""
    return k * np.tanh(k * eps)


def dk_kappa_tanh(k, eps):
    """d/dk [k*tanh(k*eps)] = tanh(t) + t/cosh(t)^2 with t = k*eps."""
    t = np.asarray(k, dtype=float) * eps
    tc = np.minimum(t, 300.0)  # cosh overflows past ~710; the term is 0 there
    return np.tanh(t) + tc / np.cosh(tc) ** 2


def phi_split(k):
    """Phi(k) = 2*coth(k) - 2k/sinh(k)^2, the long-edge norm weight.

    Equals 2*d/dk[k coth k]; tends to 4k/3 at 0 and to 2 at infinity.
    """
    return 2.0 * dk_kappa_coth_kappa(k)


def scaled_sinh2_plus(t):
    """e^{-2t} * (sinh 2t + 2t), the short-edge norm factor; stable for all t >= 0."""
    t = np.asarray(t, dtype=float)
    return -np.expm1(-4.0 * t) / 2.0 + 2.0 * t * np.exp(-2.0 * t)


def scaled_sinh2_minus(k):
    """e^{-2k} * (sinh 2k - 2k), the long-edge norm factor.

    The direct form cancels like k^3 near 0, so a series is used below 0.02.
    """
    k = np.asarray(k, dtype=float)
    series = np.exp(-2.0 * k) * (
        4.0 * k**3 / 3.0 + 4.0 * k**5 / 15.0 + 8.0 * k**7 / 315.0 + 4.0 * k**9 / 2835.0
    )
    direct = -np.expm1(-4.0 * k) / 2.0 - 2.0 * k * np.exp(-2.0 * k)
    return np.where(k < 0.02, series, direct)


def sqrt_up(lam) -> complex:
    """Principal-type square root with Im(sqrt) >= 0, fixed globally."""
    k = complex(np.sqrt(complex(lam)))
    if k.imag < 0.0:
        k = -k
    return k
