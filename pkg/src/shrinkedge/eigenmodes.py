"""Explicit negative-eigenvalue eigenfunctions and their edge localization.

A negative eigenvalue -kappa^2 carries the eigenfunction

    psi_s(x_eps) = C_s cosh(kappa x_eps)   on the short edge,
    psi_e(x)     = C_e sinh(kappa x)       on the unit edge,

with the coefficient ratio pinned by one junction condition (the other holds
automatically at a secular root).  Norms come from the closed forms

    ||psi_s||^2 = (sinh(2 kappa eps) + 2 kappa eps) / (4 kappa) |C_s|^2,
    ||psi_e||^2 = (sinh(2 kappa)   - 2 kappa)     / (4 kappa) |C_e|^2,

evaluated throughout in exponentially rescaled form: kappa reaches 1/eps
scales, so raw sinh/cosh are never formed.  Grids are stored in the
rescaled short-edge variable, which makes eps * ||psi_s||_grid^2 the
physical short-edge mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._stable import (
    kappa_coth_kappa,
    kappa_tanh,
    phi_split,
    scaled_sinh2_minus,
    scaled_sinh2_plus,
)
from .errors import NotAnEigenvalue
from .grids import GridFunction, cumulative_simpson, default_grid_size
from .secular import SpectralPoint, secular_neg
from .vertex_model import (
    Rank0,
    Rank1,
    Rank2,
    VertexCondition,
    Z_INF,
    validate,
    vertex_matrices,
)

__all__ = ["Eigenmode", "LocalizationReport", "localization", "build_eigenmode",
           "mode_residual"]

SECULAR_TOL = 1e-8


@dataclass(frozen=True)
class LocalizationReport:
    """Squared-norm split of a normalized eigenfunction across the two edges."""

    norm_s_sq: float
    norm_e_sq: float


@dataclass(frozen=True)
class Eigenmode:
    point: SpectralPoint
    c_s: complex
    c_e: complex
    psi_s: GridFunction
    psi_e: GridFunction


def _require_root(vc: VertexCondition, point: SpectralPoint):
    if isinstance(vc, Rank2):
        raise NotAnEigenvalue("the decoupled condition has no negative eigenvalues")
    val = float(secular_neg(vc, point.epsilon, point.kappa))
    if abs(val) > SECULAR_TOL:
        raise NotAnEigenvalue(
            f"secular value {val:.3e} at kappa={point.kappa:.6g} exceeds {SECULAR_TOL:g}"
        )


def _rank0_factors(vc: Rank0, epsilon: float, kappa: float):
    p_fac = float(kappa_tanh(kappa, epsilon)) + vc.a
    q_fac = float(kappa_coth_kappa(kappa)) + vc.b
    return p_fac, q_fac


def _norm_split(vc: VertexCondition, epsilon: float, kappa: float):
    t = kappa * epsilon
    if isinstance(vc, Rank1):
        if vc.z is Z_INF:
            return 1.0, 0.0
        z2 = abs(complex(vc.z)) ** 2
        num = float(scaled_sinh2_plus(t)) * z2
        cosh_sq = ((1.0 + math.exp(-2.0 * t)) / 2.0) ** 2
        den = num + float(phi_split(kappa)) * cosh_sq
        ns = num / den
        return ns, 1.0 - ns
    a, c = vc.a, vc.c
    if c == 0.0:
        p_fac, q_fac = _rank0_factors(vc, epsilon, kappa)
        # decoupled coupling: the root belongs to exactly one factor
        return (1.0, 0.0) if abs(p_fac) <= abs(q_fac) else (0.0, 1.0)
    u = math.exp(-2.0 * t)
    num = float(scaled_sinh2_plus(t)) * abs(c) ** 2
    robin_sq = (kappa * (1.0 - u) / 2.0 + a * (1.0 + u) / 2.0) ** 2
    den = num + float(phi_split(kappa)) * robin_sq
    ns = num / den
    return ns, 1.0 - ns


def localization(vc: VertexCondition, point: SpectralPoint) -> LocalizationReport:
    """Edge localization of the normalized eigenfunction at a secular root."""
    vc = validate(vc)
    _require_root(vc, point)
    ns, ne = _norm_split(vc, point.epsilon, point.kappa)
    return LocalizationReport(ns, ne)


def _phase_s(vc: VertexCondition, epsilon: float, kappa: float) -> complex:
    if isinstance(vc, Rank1):
        z = complex(vc.z)
        return -z / abs(z) if z != 0.0 else 1.0
    c = vc.c
    if c == 0.0:
        return 1.0
    p_fac, _ = _rank0_factors(vc, epsilon, kappa)
    sign = 1.0 if p_fac >= 0.0 else -1.0
    return (-c / abs(c)) * sign


def _amplitudes(vc: VertexCondition, epsilon: float, kappa: float):
    """Rescaled amplitudes (complex short-edge, real unit-edge) of the mode.

    psi_s(y) = amp_s/2 (e^{-t(1-y)} + e^{-t(1+y)}), t = kappa*eps, and
    psi_e(x) = amp_e/2 (e^{-kappa(1-x)} - e^{-kappa(1+x)}); i.e. amp = C e^{t}.
    """
    t = kappa * epsilon
    ns, ne = _norm_split(vc, epsilon, kappa)
    amp_s = math.sqrt(4.0 * kappa * ns / float(scaled_sinh2_plus(t))) if ns > 0 else 0.0
    amp_e = (
        math.sqrt(4.0 * kappa * ne / float(scaled_sinh2_minus(kappa))) if ne > 0 else 0.0
    )
    ph_s = _phase_s(vc, epsilon, kappa) if (ne > 0.0 and ns > 0.0) else 1.0
    return amp_s * ph_s, amp_e


def build_eigenmode(vc: VertexCondition, point: SpectralPoint,
                    n_s: Optional[int] = None, n_e: Optional[int] = None,
                    check: bool = True) -> Eigenmode:
    """Normalized eigenfunction grids for a verified secular root.

    Node counts default to ~200 per decay length so that Simpson quadrature
    of |psi|^2 reproduces the closed-form norms to ~1e-10 relative.  The
    phase convention is C_e >= 0 when the unit-edge part is nonzero, else
    C_s >= 0.  The returned raw coefficients underflow to 0 for kappa beyond
    ~700; the grids themselves are built from rescaled amplitudes and remain
    exact.
    """
    vc = validate(vc)
    if check:
        _require_root(vc, point)
    elif isinstance(vc, Rank2):
        raise NotAnEigenvalue("the decoupled condition has no negative eigenvalues")
    kappa, epsilon = point.kappa, point.epsilon
    t = kappa * epsilon
    amp_s, amp_e = _amplitudes(vc, epsilon, kappa)

    n_e = n_e or default_grid_size(max(kappa, 1.0))
    n_s = n_s or default_grid_size(max(t, 1.0))
    x = np.linspace(0.0, 1.0, n_e)
    y = np.linspace(0.0, 1.0, n_s)
    psi_e = GridFunction(amp_e * 0.5 * (np.exp(-kappa * (1.0 - x)) - np.exp(-kappa * (1.0 + x))))
    psi_s = GridFunction(amp_s * 0.5 * (np.exp(-t * (1.0 - y)) + np.exp(-t * (1.0 + y))))

    return Eigenmode(
        point=point,
        c_s=complex(amp_s * math.exp(-t)) if amp_s else 0.0,
        c_e=complex(amp_e * math.exp(-kappa)) if amp_e else 0.0,
        psi_s=psi_s,
        psi_e=psi_e,
    )


def mode_residual(vc: VertexCondition, point: SpectralPoint, mode: Eigenmode) -> float:
    """Max normalized defect of the mode: both equations plus all four ends.

    The interior equations are checked in integrated (Volterra) form, e.g.
    psi_s(y) = psi_s(0) + (kappa eps)^2 int_0^y (y-s) psi_s(s) ds on the
    short edge; a difference stencil there would amplify rounding by
    1/(eps h)^2 and drown the signal.  The short-edge identity carries no
    linear term, so it enforces the Neumann end as well.  Junction traces
    and derivatives come from the rescaled amplitudes, so the junction
    defect directly measures how well kappa solves the secular equation.
    """
    vc = validate(vc)
    kappa, epsilon = point.kappa, point.epsilon
    t = kappa * epsilon

    # short edge: psi'' = t^2 psi with psi'(0) = 0, anchored at y = 0
    v = mode.psi_s.values
    y = mode.psi_s.x
    dx = mode.psi_s.dx
    pref = cumulative_simpson(v, dx)
    pref_m = cumulative_simpson(y * v, dx)
    defect = v - (v[0] + t * t * (y * pref - pref_m))
    r_s = float(np.max(np.abs(defect))) / max(float(np.max(np.abs(v))), 1e-300)

    # unit edge: psi'' = kappa^2 psi, anchored at x = 1 (values decay leftward)
    amp_s, amp_e = _amplitudes(vc, epsilon, kappa)
    u_t = math.exp(-2.0 * t)
    u_k = math.exp(-2.0 * kappa)
    w = mode.psi_e.values
    x = mode.psi_e.x
    dxe = mode.psi_e.dx
    # int_x^1 (s - x) psi(s) ds via complementary prefix integrals
    pref = cumulative_simpson(w, dxe)
    pref_m = cumulative_simpson(x * w, dxe)
    tail = (pref_m[-1] - pref_m) - x * (pref[-1] - pref)
    dpsi_e1 = amp_e * kappa * (1.0 + u_k) / 2.0
    recon = w[-1] - dpsi_e1 * (1.0 - x) + kappa**2 * tail
    r_e = float(np.max(np.abs(w - recon))) / max(float(np.max(np.abs(w))), 1e-300)

    r_dir = abs(mode.psi_e.values[0])

    psi_s1 = amp_s * (1.0 + u_t) / 2.0
    psi_e1 = amp_e * (1.0 - u_k) / 2.0
    dpsi_s1 = amp_s * kappa * (1.0 - u_t) / 2.0   # d/dx_eps at the junction
    cap_u = np.array([psi_s1, psi_e1], complex)
    cap_up = np.array([-dpsi_s1, -dpsi_e1], complex)
    p, q, tmat = vertex_matrices(vc)
    scale = max(float(np.max(np.abs(cap_u))),
                float(np.max(np.abs(cap_up))) / (1.0 + kappa), 1e-300)
    r_p = float(np.max(np.abs(p @ cap_u))) / scale
    r_q = float(np.max(np.abs(q @ cap_up - tmat @ (q @ cap_u)))) / (
        (1.0 + kappa) * (1.0 + float(np.linalg.norm(tmat))) * scale
    )

    return float(max(r_e, r_s, float(r_dir), r_p, r_q))
