import math

import numpy as np
import pytest

from shrinkedge import counting
from shrinkedge._stable import (
    dk_kappa_coth_kappa,
    kappa_coth_kappa,
    phi_split,
    scaled_sinh2_minus,
    scaled_sinh2_plus,
)
from shrinkedge.errors import InvalidRank, NoRoot, NonHermitian, WrongBranch
from shrinkedge.vertex_model import (
    Rank0,
    Rank1,
    Rank2,
    Z_INF,
    classify,
    nonresonant_short_edge,
    nonresonant_threshold,
    solve_kappa0,
    solve_kappa1,
    validate,
    vc_from_json,
    vc_to_json,
    vertex_matrices,
)

from conftest import KAPPA_RHS2, KAPPA_RHS3, KAPPA_RHS4, oracle_kcoth_root


# --- stable helpers ---------------------------------------------------------

def test_kappa_coth_kappa_reference_values():
    # k coth k at k=1 equals (e^2+1)/(e^2-1)
    want = (math.e**2 + 1.0) / (math.e**2 - 1.0)
    assert abs(float(kappa_coth_kappa(1.0)) - want) < 1e-15
    assert float(kappa_coth_kappa(0.0)) == 1.0
    assert abs(float(kappa_coth_kappa(1e-8)) - 1.0) < 1e-15
    # saturates to k without overflow
    assert float(kappa_coth_kappa(1000.0)) == 1000.0
    assert float(kappa_coth_kappa(1e6)) == 1e6


def test_derivative_series_matches_direct_form():
    # compare the series branch with the divided form near the switch point
    for k in (0.009, 0.0101, 0.02, 0.5, 5.0):
        h = 1e-6 * max(k, 1e-3)
        fd = (float(kappa_coth_kappa(k + h)) - float(kappa_coth_kappa(k - h))) / (2 * h)
        assert abs(float(dk_kappa_coth_kappa(k)) - fd) < 1e-7


def test_phi_split_reference():
    for k in (0.5, 2.0, 10.0):
        want = 2.0 / math.tanh(k) - 2.0 * k / math.sinh(k) ** 2
        assert abs(float(phi_split(k)) - want) < 1e-13
    assert abs(float(phi_split(50.0)) - 2.0) < 1e-15
    assert abs(float(phi_split(1e-6)) - 4e-6 / 3.0) < 1e-18


def test_scaled_sinh_factors():
    for t in (1e-6, 0.01, 0.019, 0.021, 0.3, 2.0, 50.0):
        want_plus = math.exp(-2 * t) * (math.sinh(2 * t) + 2 * t)
        assert abs(float(scaled_sinh2_plus(t)) - want_plus) <= 1e-14 * max(want_plus, 1e-30)
    for k in (0.019, 0.021, 0.3, 2.0, 50.0):
        want_minus = math.exp(-2 * k) * (math.sinh(2 * k) - 2 * k)
        assert abs(float(scaled_sinh2_minus(k)) - want_minus) <= 1e-11 * want_minus
    # large argument saturates to 1/2, no overflow
    assert abs(float(scaled_sinh2_minus(2000.0)) - 0.5) < 1e-15


# --- validate ---------------------------------------------------------------

def test_validate_identity_case():
    vc = Rank0(0.0, 0.0, complex(-1.0))
    assert validate(vc) == vc


def test_validate_neumann_kirchhoff():
    vc = validate(Rank1(complex(-1.0), 0.0))
    assert vc.z == -1.0 and vc.mu == 0.0


def test_validate_rejects_complex_real_fields():
    with pytest.raises(NonHermitian):
        validate(Rank0(0.0, complex(1.0, 2.0), 0j))
    with pytest.raises(NonHermitian):
        validate(Rank1(complex(1.0), complex(0.0, 1.0)))


def test_validate_unknown_tag():
    with pytest.raises(InvalidRank):
        validate("not a vertex condition")


def test_validate_canonicalizes_explicit_infinity():
    assert validate(Rank1(float("inf"), -1.0)).z is Z_INF
    # a large finite number is left alone
    assert validate(Rank1(1e300, -1.0)).z == 1e300


def test_projection_invariants_random_z():
    rng = np.random.default_rng(5)
    for _ in range(50):
        z = complex(rng.normal(), rng.normal()) * rng.uniform(0, 3)
        p, q, t = vertex_matrices(validate(Rank1(z, rng.normal())))
        assert np.max(np.abs(p @ p - p)) < 1e-14
        assert np.max(np.abs(p.conj().T - p)) < 1e-14
        assert np.max(np.abs(p @ q)) < 1e-14
        assert abs(np.trace(p).real - 1.0) < 1e-14  # rank one


def test_rank0_coupling_matrix_hermitian():
    _, _, t = vertex_matrices(Rank0(1.0, -2.0, complex(0.3, 0.7)))
    assert np.max(np.abs(t - t.conj().T)) == 0.0


# --- root solvers -----------------------------------------------------------

def test_solve_kappa1_frozen_and_oracle():
    got = solve_kappa1(0.0, -2.0)
    assert abs(got - KAPPA_RHS2) < 1e-12
    assert abs(got - oracle_kcoth_root(2.0)) < 1e-9
    assert abs(got - 1.915) < 5e-4  # coarse sanity on the frozen value itself


def test_solve_kappa1_no_root_at_threshold():
    with pytest.raises(NoRoot):
        solve_kappa1(0.0, -1.0)
    with pytest.raises(NoRoot):
        solve_kappa1(Z_INF, -1.0)


def test_solve_kappa1_coupled():
    assert abs(solve_kappa1(complex(-1.0), -2.0) - KAPPA_RHS4) < 1e-12


def test_solve_kappa0_branches():
    assert abs(solve_kappa0(-1.0, -3.0, 0.0) - KAPPA_RHS3) < 1e-12
    assert abs(solve_kappa0(0.0, -3.0, 0.0) - KAPPA_RHS3) < 1e-12
    with pytest.raises(NoRoot):
        solve_kappa0(1.0, 0.0, 0.0)
    with pytest.raises(WrongBranch):
        solve_kappa0(0.0, 0.0, complex(1.0))


def test_root_residual_random_rhs():
    rng = np.random.default_rng(11)
    for rhs in 1.0 + 10.0 ** rng.uniform(-6, 3, size=100):
        r = solve_kappa1(0.0, -rhs)
        assert abs(float(kappa_coth_kappa(r)) - rhs) <= 1e-10 * max(1.0, rhs)


def test_kappa_coth_kappa_increasing():
    # monotone to machine precision everywhere (1-ulp wobble near the minimum)
    grid = np.geomspace(1e-8, 2e3, 4000)
    vals = np.asarray(kappa_coth_kappa(grid))
    assert np.all(np.diff(vals) >= -4e-16)
    # strictly increasing wherever the growth is resolvable in double precision
    grid = np.geomspace(1e-5, 2e3, 2000)
    vals = np.asarray(kappa_coth_kappa(grid))
    assert np.all(np.diff(vals) > 0.0)


# --- classification ---------------------------------------------------------

def test_classify_cross_coupled_example():
    (pred,) = classify(Rank0(0.0, 0.0, complex(-1.0)))
    assert pred.kind == "C" and abs(pred.alpha - 1.0) < 1e-15


def test_classify_rank2_empty():
    assert classify(Rank2()) == []


def test_classify_two_branch_row(frozen_roots):
    preds = classify(Rank0(-1.0, -3.0, 0.0))
    assert [p.kind for p in preds] == ["B", "S"]
    assert abs(preds[0].alpha - frozen_roots[3.0] ** 2) < 1e-10
    assert preds[1].alpha == 1.0


def test_classify_rank1_bounded(frozen_roots):
    (pred,) = classify(Rank1(complex(-1.0), -2.0))
    assert pred.kind == "B"
    assert abs(pred.alpha - frozen_roots[4.0] ** 2) < 1e-10


def test_classify_boundary_equalities():
    # threshold of the rank-1 condition: root degenerates, no branch
    assert classify(Rank1(0.0, -1.0)) == []
    # |c|^2 = a(b+1) with a < 0 falls to the single 1/eps branch
    preds = classify(Rank0(-1.0, -3.0, complex(math.sqrt(2.0))))
    assert [p.kind for p in preds] == ["S"]
    # |c|^2 = a(b+1) with a > 0: no branch
    assert classify(Rank0(1.0, 0.0, complex(1.0))) == []


def test_classify_alpha_c_fractional_power():
    (pred,) = classify(Rank0(0.0, 5.0, complex(0.0, 2.0)))
    assert abs(pred.alpha - 2.0 ** (4.0 / 3.0)) < 1e-14


def test_classify_length_two_iff_window():
    rng = np.random.default_rng(42)
    for _ in range(300):
        a = rng.uniform(-5, 5)
        b = rng.uniform(-5, 5)
        c = rng.uniform(0, 3) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        vc = Rank0(a, b, complex(c))
        preds = classify(vc)
        assert len(preds) <= 2
        assert len({p.kind for p in preds}) == len(preds)
        in_window = abs(c) ** 2 - a * b < a < 0
        assert (len(preds) == 2) == in_window


def test_classify_count_agreement_random():
    rng = np.random.default_rng(7)
    for _ in range(200):
        a = rng.uniform(-5, 5)
        b = rng.uniform(-5, 5)
        c = rng.uniform(0, 3) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        vc = Rank0(a, b, complex(c))
        assert len(classify(vc)) == counting.count_negative(vc, 1e-3)
    for _ in range(200):
        mu = rng.uniform(-5, 5)
        z = rng.uniform(0, 3) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        n = len(classify(Rank1(complex(z), mu)))
        assert n == (1 if -mu * (1 + abs(z) ** 2) > 1 else 0)


# --- non-resonance predicates ------------------------------------------------

def test_nonresonant_short_edge():
    assert nonresonant_short_edge(Rank1(Z_INF, 0.0)) is False
    assert nonresonant_short_edge(Rank0(0.0, 5.0, 0.0)) is False
    assert nonresonant_short_edge(Rank0(0.0, 0.0, complex(-1.0))) is True
    assert nonresonant_short_edge(Rank1(Z_INF, -1.0)) is True
    assert nonresonant_short_edge(Rank2()) is True


def test_nonresonant_threshold():
    assert nonresonant_threshold(Rank0(1.0, 1.0, 0.0)) is False
    assert nonresonant_threshold(Rank1(complex(-1.0), 0.0)) is True
    assert nonresonant_threshold(Rank2()) is True
    assert nonresonant_threshold(Rank1(Z_INF, 3.0)) is False


# --- JSON encoding ------------------------------------------------------------

def test_json_roundtrip():
    cases = [
        Rank2(),
        Rank1(complex(0.5, -0.25), 1.5),
        Rank1(Z_INF, -1.0),
        Rank0(1.0, -2.0, complex(0.5, 0.5)),
    ]
    for vc in cases:
        assert vc_from_json(vc_to_json(vc)) == validate(vc)


def test_json_parsing_variants():
    vc = vc_from_json('{"rank_p": 1, "z": "inf", "mu": -1}')
    assert vc.z is Z_INF and vc.mu == -1.0
    vc = vc_from_json('{"rank_p": 0, "a": 0, "b": 0, "c": {"re": -1, "im": 0}}')
    assert vc == Rank0(0.0, 0.0, complex(-1.0))
    vc = vc_from_json('{"rank_p": 0, "a": 1, "b": 2, "c": -1.5}')
    assert vc.c == -1.5


def test_json_rejects_bad_rank_and_complex_b():
    with pytest.raises(InvalidRank):
        vc_from_json('{"rank_p": 3}')
    with pytest.raises(InvalidRank):
        vc_from_json('{"no_rank": 1}')
    with pytest.raises(NonHermitian):
        vc_from_json('{"rank_p": 0, "a": 0, "b": {"re": 0, "im": 1}, "c": 0}')
