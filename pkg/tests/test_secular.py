import math

import numpy as np
import pytest

from shrinkedge import counting
from shrinkedge.errors import AmbiguousRate, CountMismatch
from shrinkedge.secular import (
    SpectralPoint,
    d_secular_neg,
    find_negative_eigenvalues,
    fit_rate,
    g0,
    h0,
    nearest_admissible_rate,
    scan_real_poles,
    secular_neg,
)
from shrinkedge.vertex_model import Rank0, Rank1, Rank2, Z_INF, classify

from conftest import KAPPA_RHS2, KAPPA_RHS3, oracle_bisect


# --- characteristic functions -------------------------------------------------

def test_g0_zero_at_half_pi():
    assert abs(g0(0.0, np.pi / 2.0, 0.0, 0.0)) < 1e-15


def test_g0_closed_form_at_pi():
    for eps in (0.0, 0.05, 0.3):
        want = -np.pi * np.cos(np.pi * eps)
        assert abs(g0(eps, np.pi, 0.0, 0.0) - want) < 1e-13


def test_g0_rejects_infinite_z():
    with pytest.raises(ValueError):
        g0(0.1, 1.0, Z_INF, 0.0)


def test_h0_taylor_at_zero_eps():
    rng = np.random.default_rng(2)
    for _ in range(20):
        a, b = rng.normal(size=2)
        c = complex(rng.normal(), rng.normal())
        k = complex(rng.normal(), rng.normal())
        want = (a * b - abs(c) ** 2) * np.sin(k) + a * k * np.cos(k)
        assert abs(h0(0.0, k, a, b, c) - want) < 1e-12 * (1 + abs(k)) ** 2


def test_h0_resonant_factorization():
    b = 2.5
    for k in (0.7, 2.0 + 1.0j):
        want = -k * np.sin(k * 0.1) * (k * np.cos(k) + b * np.sin(k))
        assert abs(h0(0.1, k, 0.0, b, 0.0) - want) < 1e-13


def test_h0_nonzero_off_axis():
    k = np.sqrt(1j)
    for eps in (1e-3, 1e-2, 0.1):
        assert abs(h0(eps, k, 0.0, 0.0, complex(-1.0))) > 1e-12


def test_secular_matches_characteristic_at_imaginary_k():
    # h0(eps, i kappa) = i cosh(kappa eps) sinh(kappa) * divided_form(kappa)
    vc = Rank0(1.0, 0.0, complex(2.0))
    eps, kappa = 0.05, 2.2
    lhs = h0(eps, 1j * kappa, vc.a, vc.b, vc.c)
    want = 1j * math.cosh(kappa * eps) * math.sinh(kappa) * float(
        secular_neg(vc, eps, kappa)
    )
    assert abs(lhs - want) < 1e-12 * abs(want)


def test_secular_neg_cases():
    # no positive solution for the decoupled short Robin end with mu >= 0
    vc = Rank1(Z_INF, 1.0)
    for kappa in (0.1, 1.0, 50.0, 2000.0):
        assert float(secular_neg(vc, 0.05, kappa)) > 0.0
    # definition of the eps = 0 root
    assert abs(float(secular_neg(Rank1(0.0, -2.0), 0.0, KAPPA_RHS2))) < 1e-12
    # positive sentinel for full decoupling
    assert float(secular_neg(Rank2(), 1e-3, 5.0)) == 1.0


def test_secular_neg_overflow_safe():
    vc = Rank0(-1.0, -3.0, 0.0)
    val = float(secular_neg(vc, 1e-6, 1e6))
    assert np.isfinite(val)
    assert np.isfinite(float(d_secular_neg(vc, 1e-6, 1e6)))


def test_scaled_substitution_near_root():
    # kappa = eps^(-1/3) nearly solves the cross-coupled equation
    eps = 1e-6
    val = float(secular_neg(Rank0(0.0, 0.0, complex(-1.0)), eps, eps ** (-1.0 / 3.0)))
    assert abs(val) < 1e-3


# --- root finding ---------------------------------------------------------------

def test_find_cross_coupled_scaling():
    pts = find_negative_eigenvalues(Rank0(0.0, 0.0, complex(-1.0)), 1e-3)
    assert len(pts) == 1
    assert -1.3 <= pts[0].lam * 1e-3 ** (2.0 / 3.0) <= -0.7


def test_find_two_roots_against_oracle():
    eps = 1e-3
    pts = find_negative_eigenvalues(Rank0(-1.0, -3.0, 0.0), eps)
    assert [p.kind for p in pts] == ["B", "S"]
    # oracle roots: the equation factorizes for c = 0
    want_b = KAPPA_RHS3
    want_s = oracle_bisect(lambda k: k * math.tanh(k * eps) - 1.0, 1.0, 1e4)
    assert abs(pts[0].kappa - want_b) < 1e-10 * want_b
    assert abs(pts[1].kappa - want_s) < 1e-9 * want_s
    assert abs(pts[1].kappa * math.sqrt(eps) - 1.0) < 0.01


def test_find_rank2_empty():
    assert find_negative_eigenvalues(Rank2(), 1e-2) == []
    assert find_negative_eigenvalues(Rank1(Z_INF, 0.5), 1e-2) == []


def test_point_invariants_and_residual():
    for vc in (Rank0(0.0, 0.0, complex(-1.0)), Rank0(-1.0, -3.0, complex(1.0)),
               Rank1(complex(-1.0), -2.0), Rank1(Z_INF, -1.0)):
        for eps in (1e-2, 1e-4, 1e-6):
            for p in find_negative_eigenvalues(vc, eps):
                assert p.lam == -p.kappa**2
                assert abs(float(secular_neg(vc, eps, p.kappa))) <= 1e-9
                if p.alpha_predicted is not None:
                    assert p.alpha_predicted > 0


def test_chart_root_matches_unscaled_equation():
    # re-solve the 1/eps root directly on the divided form by plain bisection
    vc = Rank0(-1.0, 0.0, complex(1.0))
    eps = 1e-5
    (p,) = find_negative_eigenvalues(vc, eps)
    f = lambda k: float(secular_neg(vc, eps, k))
    direct = oracle_bisect(f, 0.5 / math.sqrt(eps), 2.0 / math.sqrt(eps))
    assert abs(p.kappa - direct) <= 1e-10 * direct


def test_s_branch_second_order_structure():
    vc = Rank0(-1.0, 0.0, complex(1.0))
    for eps in (1e-4, 1e-6):
        (p,) = find_negative_eigenvalues(vc, eps)
        assert abs(p.kappa * math.sqrt(eps) - 1.0) <= 2.0 * math.sqrt(eps)


def test_count_consistency_random():
    rng = np.random.default_rng(31)
    for _ in range(120):
        vc = Rank0(rng.uniform(-5, 5), rng.uniform(-5, 5),
                   complex(rng.uniform(0, 3) * np.exp(1j * rng.uniform(0, 2 * np.pi))))
        n = counting.count_negative(vc, 1e-3)
        assert len(find_negative_eigenvalues(vc, 1e-3)) == n


def test_moderate_eps_fallback_keeps_kinds():
    # at eps = 0.15 the 1/eps root sits below the bounded one; the dense
    # backstop must still label the pair correctly
    pts = find_negative_eigenvalues(Rank0(-1.0, -3.0, 0.0), 0.15)
    kinds = {p.kind: p.kappa for p in pts}
    assert set(kinds) == {"B", "S"}
    assert abs(kinds["B"] - KAPPA_RHS3) < 1e-9  # factorized: exactly the fixed root
    assert kinds["S"] < kinds["B"]


def test_backstop_when_both_roots_share_a_chart_window():
    # near eps ~ 0.04 both roots of this coupling sit inside the scaled
    # chart's bracket, so its endpoint signs agree and only the dense scan
    # can separate them (regression for a bracketing dead end)
    vc = Rank0(-1.2540176596518582, -4.394653100262671,
               complex(0.5142267259130824, 0.67988523534667))
    pts = find_negative_eigenvalues(vc, 0.03987172926080924)
    assert len(pts) == 2
    assert {p.kind for p in pts} == {"B", "S"}
    for p in pts:
        assert abs(float(secular_neg(vc, p.epsilon, p.kappa))) <= 1e-9


def test_moderate_eps_random_count_agreement():
    rng = np.random.default_rng(54)
    for _ in range(60):
        vc = Rank0(rng.uniform(-5, 5), rng.uniform(-5, 5),
                   complex(rng.uniform(0, 3) * np.exp(1j * rng.uniform(0, 2 * np.pi))))
        eps = 10.0 ** rng.uniform(np.log10(0.02), np.log10(0.2))
        assert len(find_negative_eigenvalues(vc, eps)) == counting.count_negative(vc, eps)


def test_eps_domain_checks():
    with pytest.raises(ValueError):
        find_negative_eigenvalues(Rank2(), 0.0)
    with pytest.raises(ValueError):
        find_negative_eigenvalues(Rank2(), 0.3)


# --- positive-spectrum pole scan ------------------------------------------------

def test_scan_rank2_dirichlet_spectrum():
    roots = scan_real_poles(Rank2(), 0.1, 10.0)
    want = [np.pi, 2 * np.pi, 3 * np.pi]
    assert len(roots) == 3
    assert np.max(np.abs(roots - want)) < 1e-9


def test_scan_coupled_smallest_root():
    eps = 1e-4
    roots = scan_real_poles(Rank1(complex(-1.0), 0.0), eps, 2.0)
    assert len(roots) >= 1
    assert abs(roots[0] - np.pi / 2.0) < 0.01
    for r in roots:
        assert abs(g0(eps, r, complex(-1.0), 0.0)) <= 1e-9 * (1.0 + r) ** 2


def test_scan_infinite_direction_uses_rescaled_limit():
    # poles split into sin(k) zeros and roots of k sin(k eps) = mu cos(k eps)
    eps, mu = 0.1, 1.0
    roots = scan_real_poles(Rank1(Z_INF, mu), eps, 10.0)
    for n in (1, 2, 3):
        assert np.min(np.abs(roots - n * np.pi)) < 1e-9
    short = oracle_bisect(lambda k: k * math.sin(k * eps) - mu * math.cos(k * eps),
                          0.1, np.pi / (2 * eps) - 1e-6)
    assert np.min(np.abs(roots - short)) < 1e-9


def test_scan_residual_small():
    vc = Rank0(1.0, 0.5, complex(0.5))
    eps = 0.07
    roots = scan_real_poles(vc, eps, 12.0)
    assert len(roots) > 0
    for r in roots:
        assert abs(h0(eps, r, vc.a, vc.b, vc.c)) <= 1e-9 * (1.0 + r) ** 2


def test_scan_guard():
    with pytest.raises(ValueError):
        scan_real_poles(Rank2(), 1e-3, 1e6)


# --- rate fitting ----------------------------------------------------------------

def _points(eps_vals, lam_fn, kind):
    return [SpectralPoint.make(e, math.sqrt(-lam_fn(e)), kind) for e in eps_vals]


def test_fit_rate_constant_branch():
    fit = fit_rate(_points(np.geomspace(1e-2, 1e-5, 6), lambda e: -4.0, "B"))
    assert abs(fit.slope) < 1e-12
    assert abs(fit.coeff - 4.0) < 1e-12
    assert fit.residual < 1e-12


def test_fit_rate_recovers_escape_rates():
    fit = fit_rate(_points(np.geomspace(1e-2, 1e-6, 8),
                           lambda e: -2.0 * e ** (-2.0 / 3.0), "C"))
    assert abs(fit.slope + 2.0 / 3.0) < 1e-10
    assert abs(fit.coeff - 2.0) < 1e-10


def test_fit_rate_ambiguous():
    with pytest.raises(AmbiguousRate):
        fit_rate(_points(np.geomspace(1e-2, 1e-5, 6), lambda e: -e ** (-0.4), "S"))


def test_fit_rate_input_validation():
    pts = _points(np.geomspace(1e-2, 1e-3, 3), lambda e: -1.0, "B")
    with pytest.raises(ValueError):
        fit_rate(pts)
    mixed = _points([1e-2, 1e-3], lambda e: -1.0, "B") + _points(
        [1e-4, 1e-5], lambda e: -1.0, "S"
    )
    with pytest.raises(ValueError):
        fit_rate(mixed)


def test_nearest_admissible_rate():
    assert nearest_admissible_rate(-0.01) == ("B", 0.0)
    assert nearest_admissible_rate(-0.69) == ("C", -2.0 / 3.0)
    assert nearest_admissible_rate(-0.95) == ("S", -1.0)
