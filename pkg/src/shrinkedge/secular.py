"""Secular functions, negative-spectrum root finding and rate fitting.

Negative eigenvalues -kappa^2 solve a scalar transcendental equation whose
divided (overflow-safe) form is evaluated by :func:`secular_neg`:

* rank 1, finite z:   k coth k + |z|^2 k tanh(k eps) + mu (1 + |z|^2) = 0
* rank 1, z = inf:    k tanh(k eps) + mu = 0
* rank 0:             (k tanh(k eps) + a) (k coth k + b) - |c|^2 = 0
* rank 2:             no roots (a positive sentinel is returned).

Roots are located in three charts matched to how each branch escapes:
the bounded branch in the original variable near its eps = 0 root, the
1/eps branch in rho = kappa*sqrt(eps) near sqrt(-a) (or sqrt(-mu)), and
the eps^(-2/3) branch in tau = kappa*eps^(1/3) near |c|^(2/3).  Each chart
equation is an exact reparametrization of the divided form, so a root found
in a chart is polished directly on the unscaled equation afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ._rootfind import bisect, expand_bracket
from ._stable import (
    coth,
    dk_kappa_coth_kappa,
    dk_kappa_tanh,
    kappa_coth_kappa,
    kappa_tanh,
)
from .errors import AmbiguousRate, CountMismatch, NoRoot
from .vertex_model import (
    Rank1,
    Rank2,
    VertexCondition,
    Z_INF,
    classify,
    validate,
)

__all__ = [
    "SpectralPoint",
    "RateFit",
    "ADMISSIBLE_RATES",
    "g0",
    "h0",
    "secular_neg",
    "d_secular_neg",
    "find_negative_eigenvalues",
    "scan_real_poles",
    "fit_rate",
    "nearest_admissible_rate",
]

EPS_MAX = 0.2
RESIDUAL_TOL = 1e-9
MERGE_RTOL = 1e-8

# lambda ~ -alpha * eps^rate for the three branch kinds
ADMISSIBLE_RATES = {"B": 0.0, "C": -2.0 / 3.0, "S": -1.0}


@dataclass(frozen=True)
class SpectralPoint:
    """One located negative eigenvalue: lam = -kappa^2 exactly."""

    epsilon: float
    kappa: float
    lam: float
    kind: str
    alpha_predicted: Optional[float] = None

    def __post_init__(self):
        if not self.epsilon > 0.0:
            raise ValueError("epsilon must be positive")
        if not self.kappa > 0.0:
            raise ValueError("kappa must be positive")
        if self.lam != -self.kappa**2:
            raise ValueError("lam must equal -kappa^2 exactly")

    @classmethod
    def make(cls, epsilon: float, kappa: float, kind: str,
             alpha: Optional[float] = None) -> "SpectralPoint":
        return cls(epsilon, kappa, -kappa**2, kind, alpha)


@dataclass(frozen=True)
class RateFit:
    """Least-squares rate of log|lam| against log(eps) plus the leading coefficient."""

    slope: float
    coeff: float
    residual: float

    def __post_init__(self):
        if self.residual < 0.0:
            raise ValueError("residual must be nonnegative")


def g0(epsilon: float, k, z, mu: float):
    """Characteristic function of the rank-1 coupling with finite z.

    g0(eps, k) = (k cos k + mu sin k) cos(k eps)
                 - |z|^2 (k sin(k eps) - mu cos(k eps)) sin k

    Holomorphic in both arguments; its zeros are square roots of
    eigenvalues.  Accepts real or complex k, scalar or array.
    """
    if z is Z_INF:
        raise ValueError("g0 requires finite z; use the rescaled limit for z=inf")
    k = np.asarray(k)
    z2 = abs(complex(z)) ** 2
    return (k * np.cos(k) + mu * np.sin(k)) * np.cos(k * epsilon) - z2 * (
        k * np.sin(k * epsilon) - mu * np.cos(k * epsilon)
    ) * np.sin(k)


def h0(epsilon: float, k, a: float, b: float, c):
    """Characteristic function of the rank-0 coupling.

    h0(eps, k) = -(k sin(k eps) - a cos(k eps)) (k cos k + b sin k)
                 - |c|^2 sin k cos(k eps)
    """
    k = np.asarray(k)
    c2 = abs(complex(c)) ** 2
    return -(k * np.sin(k * epsilon) - a * np.cos(k * epsilon)) * (
        k * np.cos(k) + b * np.sin(k)
    ) - c2 * np.sin(k) * np.cos(k * epsilon)


def secular_neg(vc: VertexCondition, epsilon: float, kappa):
    """Divided-form secular value at k = i*kappa; a root means an eigenvalue.

    All hyperbolic ratios are evaluated in rescaled form, so kappa of order
    1/eps is safe.  Rank 2 has no negative spectrum and returns 1.0.
    """
    kappa = np.asarray(kappa, dtype=float)
    if isinstance(vc, Rank2):
        return np.ones_like(kappa)
    if isinstance(vc, Rank1):
        if vc.z is Z_INF:
            return kappa_tanh(kappa, epsilon) + vc.mu
        z2 = abs(complex(vc.z)) ** 2
        return (
            kappa_coth_kappa(kappa)
            + z2 * kappa_tanh(kappa, epsilon)
            + vc.mu * (1.0 + z2)
        )
    a, b, c2 = vc.a, vc.b, abs(vc.c) ** 2
    return (kappa_tanh(kappa, epsilon) + a) * (kappa_coth_kappa(kappa) + b) - c2


def d_secular_neg(vc: VertexCondition, epsilon: float, kappa):
    """kappa-derivative of :func:`secular_neg` (same dispatch, same scaling)."""
    kappa = np.asarray(kappa, dtype=float)
    if isinstance(vc, Rank2):
        return np.zeros_like(kappa)
    if isinstance(vc, Rank1):
        if vc.z is Z_INF:
            return dk_kappa_tanh(kappa, epsilon)
        z2 = abs(complex(vc.z)) ** 2
        return dk_kappa_coth_kappa(kappa) + z2 * dk_kappa_tanh(kappa, epsilon)
    a, b = vc.a, vc.b
    return dk_kappa_tanh(kappa, epsilon) * (kappa_coth_kappa(kappa) + b) + (
        kappa_tanh(kappa, epsilon) + a
    ) * dk_kappa_coth_kappa(kappa)


def _newton_polish(vc, epsilon, kappa, lo, hi, steps=4):
    """A few safeguarded Newton steps on the divided form inside [lo, hi]."""
    for _ in range(steps):
        f = float(secular_neg(vc, epsilon, kappa))
        if f == 0.0:
            return kappa
        df = float(d_secular_neg(vc, epsilon, kappa))
        if df == 0.0 or not math.isfinite(df):
            return kappa
        nxt = kappa - f / df
        if not (lo <= nxt <= hi) or not math.isfinite(nxt):
            return kappa
        if abs(nxt - kappa) <= 1e-16 * kappa:
            return nxt
        kappa = nxt
    return kappa


# --- chart equations (exact reparametrizations of the divided form) --------

def _chart_S_rank0(a, b, c2, epsilon):
    sq = math.sqrt(epsilon)
    rho0 = math.sqrt(-a)

    def f(rho):
        k = rho / sq
        return (rho * math.tanh(rho * sq) / sq + a) * (
            rho * float(coth(k)) + sq * b
        ) - sq * c2

    lo, hi = expand_bracket(f, 0.5 * rho0, 2.0 * rho0, 1e-8 * rho0, 64.0 * rho0)
    return bisect(f, lo, hi, rtol=1e-13) / sq


def _chart_C_rank0(b, c2, epsilon):
    cb = epsilon ** (1.0 / 3.0)
    tau0 = c2 ** (1.0 / 3.0)  # |c|^(2/3)

    def f(tau):
        k = tau / cb
        return (tau * math.tanh(tau * cb * cb) / (cb * cb)) * (
            tau * float(coth(k)) + cb * b
        ) - c2

    lo, hi = expand_bracket(f, 0.5 * tau0, 2.0 * tau0, 1e-8 * tau0, 64.0 * tau0)
    return bisect(f, lo, hi, rtol=1e-13) / cb


def _chart_S_rank1_inf(mu, epsilon):
    sq = math.sqrt(epsilon)
    rho0 = math.sqrt(-mu)

    def f(rho):
        return rho * math.tanh(rho * sq) / sq + mu

    lo, hi = expand_bracket(f, 0.5 * rho0, 2.0 * rho0, 1e-8 * rho0, 64.0 * rho0)
    return bisect(f, lo, hi, rtol=1e-13) / sq


def _chart_B(vc, epsilon, kappa_star):
    """Bounded-branch root in (0, kappa_star]; kappa_star is the eps = 0 root."""
    f = lambda k: float(secular_neg(vc, epsilon, k))
    hi = kappa_star
    fhi = f(hi)
    if fhi == 0.0:
        return hi
    lo = 1e-12 * max(1.0, kappa_star)
    if (f(lo) > 0.0) == (fhi > 0.0):
        # not analytically expected; give the bracket a little headroom
        lo, hi = expand_bracket(f, lo, hi, 1e-300, kappa_star * 1.5 + 10.0)
    return bisect(f, lo, hi, rtol=1e-13)


def _chart_distance(kappa, epsilon, kind, charts):
    center = charts[kind]
    x = {"B": kappa, "S": kappa * math.sqrt(epsilon),
         "C": kappa * epsilon ** (1.0 / 3.0)}[kind]
    return abs(x - center) / center


def _dense_scan(vc, epsilon, expected, charts):
    """Backstop when chart brackets fail: locate every root by a sign scan.

    A coarse global grid is refined with a fine window around each expected
    chart center, so close pairs near a chart boundary are still separated.
    """
    k_hi = 20.0 / math.sqrt(epsilon) + 10.0
    pieces = [np.geomspace(1e-8, 0.2, 600), np.linspace(0.2, k_hi, 40000)]
    for kind in expected:
        center = charts[kind] / {"B": 1.0, "S": math.sqrt(epsilon),
                                 "C": epsilon ** (1.0 / 3.0)}[kind]
        pieces.append(np.linspace(0.4 * center, 2.5 * center, 4000))
    grid = np.unique(np.concatenate(pieces))
    vals = np.asarray(secular_neg(vc, epsilon, grid))
    sign = np.sign(vals)
    idx = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    roots = []
    for i in idx:
        f = lambda k: float(secular_neg(vc, epsilon, k))
        r = bisect(f, float(grid[i]), float(grid[i + 1]), rtol=1e-13)
        roots.append(_newton_polish(vc, epsilon, r, float(grid[i]), float(grid[i + 1])))
    roots.extend(float(grid[j]) for j in np.nonzero(vals == 0.0)[0])
    roots = sorted(roots)
    # cluster duplicates found by overlapping grid pieces
    merged = []
    for r in roots:
        if not merged or abs(r - merged[-1]) > MERGE_RTOL * max(r, merged[-1]):
            merged.append(r)
    roots = merged
    if len(roots) != len(expected):
        return None
    if len(roots) == 1:
        kind = min(expected, key=lambda kk: _chart_distance(roots[0], epsilon, kk, charts))
        return [(kind, roots[0])]
    # two roots: pick the kind assignment with the smaller total chart distance
    k1, k2 = expected
    straight = _chart_distance(roots[0], epsilon, k1, charts) + _chart_distance(
        roots[1], epsilon, k2, charts
    )
    swapped = _chart_distance(roots[0], epsilon, k2, charts) + _chart_distance(
        roots[1], epsilon, k1, charts
    )
    pairing = (k1, k2) if straight <= swapped else (k2, k1)
    return list(zip(pairing, roots))


def find_negative_eigenvalues(vc: VertexCondition, epsilon: float) -> list[SpectralPoint]:
    """All negative eigenvalues of the operator at the given edge length.

    Roots are found in the chart matched to their predicted kind, polished to
    |d kappa / kappa| <= 1e-12 on the divided form, and cross-checked against
    the predicted count (classification table for rank 1, the matrix/closed
    form count for rank 0).  A failed cross-check falls back to a dense sign
    scan (the asymptotic charts can overlap for eps beyond ~0.02) and raises
    ``CountMismatch`` if the mismatch persists.
    """
    vc = validate(vc)
    if not 0.0 < epsilon <= EPS_MAX:
        raise ValueError(f"epsilon must lie in (0, {EPS_MAX}], got {epsilon:g}")
    preds = classify(vc)
    if not preds:
        return []
    alpha = {p.kind: p.alpha for p in preds}
    expected = [p.kind for p in preds]

    charts = {}
    if "B" in alpha:
        charts["B"] = math.sqrt(alpha["B"])  # the eps = 0 root itself
    if "S" in alpha:
        charts["S"] = math.sqrt(alpha["S"])
    if "C" in alpha:
        charts["C"] = alpha["C"] ** 0.5  # |c|^(2/3)

    def solve_kind(kind: str) -> float:
        if isinstance(vc, Rank1):
            if kind == "S":
                return _chart_S_rank1_inf(vc.mu, epsilon)
            return _chart_B(vc, epsilon, charts["B"])
        if kind == "B":
            return _chart_B(vc, epsilon, charts["B"])
        if kind == "S":
            return _chart_S_rank0(vc.a, vc.b, abs(vc.c) ** 2, epsilon)
        return _chart_C_rank0(vc.b, abs(vc.c) ** 2, epsilon)

    pairs = []
    failed = False
    try:
        for kind in expected:
            root = solve_kind(kind)
            root = _newton_polish(vc, epsilon, root, root * 0.5, root * 2.0)
            pairs.append((kind, root))
    except NoRoot:
        failed = True

    if not failed:
        roots = sorted(r for _, r in pairs)
        for r in roots:
            if abs(float(secular_neg(vc, epsilon, r))) > RESIDUAL_TOL:
                failed = True
        for r1, r2 in zip(roots, roots[1:]):
            if abs(r2 - r1) <= MERGE_RTOL * max(r1, r2):
                failed = True  # chart roots collided: outside asymptotic regime

    if failed:
        pairs = _dense_scan(vc, epsilon, expected, charts)
        if pairs is None:
            raise CountMismatch(
                f"expected {len(expected)} root(s) of kinds {expected} at "
                f"eps={epsilon:g}, bracketing failed"
            )

    points = [
        SpectralPoint.make(epsilon, root, kind, alpha.get(kind))
        for kind, root in pairs
    ]
    points.sort(key=lambda p: p.kappa)
    return points


def scan_real_poles(vc: VertexCondition, epsilon: float, k_max: float) -> np.ndarray:
    """Real k in (0, k_max] where the positive-spectrum characteristic vanishes.

    Rank 2 scans cos(k eps) sin(k); rank 1 scans g0 (for z = inf the rescaled
    limit (k sin(k eps) - mu cos(k eps)) sin k); rank 0 scans h0.  Sign scan
    with step min(pi/8, pi*eps/8) plus bisection; roots of even multiplicity
    can be missed.
    """
    vc = validate(vc)
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    if k_max > 200.0 / epsilon:
        raise ValueError("k_max exceeds the 200/eps guard")

    if isinstance(vc, Rank2):
        chi = lambda k: np.cos(np.asarray(k) * epsilon) * np.sin(np.asarray(k))
    elif isinstance(vc, Rank1):
        if vc.z is Z_INF:
            mu = vc.mu
            chi = lambda k: (
                np.asarray(k) * np.sin(np.asarray(k) * epsilon)
                - mu * np.cos(np.asarray(k) * epsilon)
            ) * np.sin(np.asarray(k))
        else:
            chi = lambda k: np.real(g0(epsilon, k, vc.z, vc.mu))
    else:
        chi = lambda k: np.real(h0(epsilon, k, vc.a, vc.b, vc.c))

    step = min(np.pi / 8.0, np.pi * epsilon / 8.0)
    n = int(np.ceil(k_max / step)) + 1
    grid = np.linspace(step * 1e-3, k_max, n)
    vals = np.asarray(chi(grid), dtype=float)
    sign = np.sign(vals)
    roots = [float(grid[j]) for j in np.nonzero(vals == 0.0)[0]]
    for i in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
        roots.append(bisect(lambda k: float(chi(k)), float(grid[i]), float(grid[i + 1]),
                            rtol=1e-15))
    return np.array(sorted(roots))


def nearest_admissible_rate(slope: float) -> tuple[str, float]:
    """Closest of the three admissible escape rates {0, -2/3, -1}."""
    kind = min(ADMISSIBLE_RATES, key=lambda kk: abs(slope - ADMISSIBLE_RATES[kk]))
    return kind, ADMISSIBLE_RATES[kind]


def fit_rate(points: Sequence[SpectralPoint]) -> RateFit:
    """Fit lam(eps) ~ -coeff * eps^slope over a log-spaced sweep of one branch.

    Slope is the least-squares slope of log|lam| against log eps; coeff is the
    median of |lam| * eps^(-r) with r the nearest admissible rate.  Raises
    ``AmbiguousRate`` when the fitted slope is farther than 0.15 from every
    admissible rate.
    """
    if len(points) < 4:
        raise ValueError("need at least 4 points to fit a rate")
    kinds = {p.kind for p in points}
    if len(kinds) != 1:
        raise ValueError(f"rate fit requires a single branch, got kinds {kinds}")
    eps = np.array([p.epsilon for p in points])
    if len(np.unique(eps)) != len(eps):
        raise ValueError("epsilon values must be distinct")
    lam = np.array([abs(p.lam) for p in points])
    x = np.log(eps)
    y = np.log(lam)
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    _, rate = nearest_admissible_rate(float(slope))
    if abs(slope - rate) > 0.15:
        raise AmbiguousRate(
            f"slope {slope:.4f} is not near any admissible rate (0, -2/3, -1)"
        )
    coeff = float(np.median(lam * eps ** (-rate)))
    return RateFit(float(slope), coeff, residual)
