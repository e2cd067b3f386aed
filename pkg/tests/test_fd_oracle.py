import numpy as np
import pytest

from shrinkedge import counting
from shrinkedge.errors import MeshTooCoarse
from shrinkedge.fd_oracle import (
    assemble,
    convergence_order,
    lowest_eigenvalues,
    negative_count,
    sturm_count,
)
from shrinkedge.secular import find_negative_eigenvalues
from shrinkedge.vertex_model import Rank0, Rank1, Rank2, Z_INF


def _dense(op):
    n = op.n
    k = np.zeros((n, n), complex)
    m = np.zeros((n, n), complex)
    k[np.arange(n), np.arange(n)] = op.k_diag
    m[np.arange(n), np.arange(n)] = op.m_diag
    i = np.arange(n - 1)
    k[i, i + 1] = op.k_off
    k[i + 1, i] = np.conj(op.k_off)
    m[i, i + 1] = op.m_off
    m[i + 1, i] = np.conj(op.m_off)
    return k, m


def _dense_eigs(op):
    k, m = _dense(op)
    ell = np.linalg.cholesky(m)
    inv = np.linalg.inv(ell)
    return np.linalg.eigvalsh(inv @ k @ inv.conj().T)


def test_mesh_guard():
    with pytest.raises(MeshTooCoarse):
        assemble(Rank2(), 0.1, 8, 100)


def test_dof_counts_per_rank():
    n_s, n_e = 20, 30
    assert assemble(Rank0(1, 2, 0.5j), 0.1, n_s, n_e).n == n_s + 1 + n_e
    assert assemble(Rank1(complex(0.3), 0.0), 0.1, n_s, n_e).n == n_s + n_e
    assert assemble(Rank1(Z_INF, 1.0), 0.1, n_s, n_e).n == n_s + n_e
    assert assemble(Rank2(), 0.1, n_s, n_e).n == n_s + n_e - 1


def test_sturm_count_matches_dense_eigenvalues():
    rng = np.random.default_rng(6)
    for vc in (Rank2(), Rank1(complex(-1.0), -2.0), Rank1(Z_INF, -1.0),
               Rank0(-1.0, -3.0, complex(0.7, 0.4))):
        op = assemble(vc, 0.05, 16, 24)
        eigs = _dense_eigs(op)
        for sigma in rng.uniform(-50.0, 300.0, size=12):
            assert sturm_count(op, float(sigma)) == int(np.sum(eigs < sigma))


def test_lowest_eigenvalues_match_dense():
    op = assemble(Rank0(-1.0, -3.0, complex(0.5)), 0.05, 20, 28)
    got = lowest_eigenvalues(op, 4)
    want = np.sort(_dense_eigs(op))[:4]
    assert np.max(np.abs(np.array(got) - want) / np.maximum(1.0, np.abs(want))) < 1e-7


def test_decoupled_spectrum_converges_to_dirichlet():
    op = assemble(Rank2(), 0.1, 400, 400)
    vals = lowest_eigenvalues(op, 2)
    assert abs(vals[0] - np.pi**2) < 1e-3
    assert abs(vals[1] - 4 * np.pi**2) < 2e-2
    assert negative_count(op) == 0


def test_inertia_matches_counts():
    cases = [
        (Rank1(Z_INF, -1.0), 1),
        (Rank1(complex(-1.0), -2.0), 1),
        (Rank0(-1.0, -3.0, 0.0), 2),
        (Rank0(-1.0, 0.0, complex(1.0)), 1),
        (Rank0(0.0, -3.0, 0.0), 1),
        (Rank0(0.0, 0.0, complex(-1.0)), 1),
        (Rank0(1.0, 0.0, complex(2.0)), 1),
        (Rank2(), 0),
    ]
    for eps in (1e-1, 1e-2):
        for vc, want in cases:
            op = assemble(vc, eps, 1000, 1000)
            assert negative_count(op) == want
            if isinstance(vc, Rank0):
                assert want == counting.count_negative(vc, eps)


def test_rayleigh_ritz_upper_bounds_decrease():
    vc = Rank0(1.0, 0.0, complex(2.0))
    eps = 1e-2
    (pt,) = find_negative_eigenvalues(vc, eps)
    prev = np.inf
    for n in (100, 200, 400):
        val = lowest_eigenvalues(assemble(vc, eps, n, n), 1)[0]
        assert val >= pt.lam - 1e-10  # discrete values bound the true one above
        assert val <= prev + 1e-12
        prev = val


def test_short_edge_bound_scaling():
    # the lowest eigenvalue never drops much below -C/eps across the rows
    worst = 0.0
    for vc in (Rank1(Z_INF, -1.0), Rank0(-1.0, -3.0, 0.0),
               Rank0(0.0, 0.0, complex(-1.0))):
        for eps in (1e-1, 1e-2):
            val = lowest_eigenvalues(assemble(vc, eps, 500, 500), 1)[0]
            worst = max(worst, -val * eps)
    assert worst <= 4.0


def test_convergence_order_quadratic():
    assert abs(convergence_order(Rank2(), 0.1) - 2.0) <= 0.3
    assert abs(convergence_order(Rank1(complex(-1.0), -2.0), 1e-2) - 2.0) <= 0.3
    # short-edge-localized branch, mesh spans the short edge
    assert abs(convergence_order(Rank1(Z_INF, -1.0), 1e-2) - 2.0) <= 0.5


def test_positive_spectrum_matches_pole_scan():
    # square roots of the positive eigenvalues are the scanned real poles
    from shrinkedge.secular import scan_real_poles

    vc = Rank0(1.0, 0.0, complex(2.0))
    eps = 0.1
    roots = scan_real_poles(vc, eps, 12.0)
    op = assemble(vc, eps, 2000, 2000)
    assert negative_count(op) == 1
    pos = [v for v in lowest_eigenvalues(op, 6) if v > 0]
    assert len(roots) <= len(pos)
    for r, v in zip(roots, pos):
        assert abs(r * r - v) / v < 1e-4


def test_oracle_against_secular_roots():
    eps = 1e-2
    for vc in (Rank0(-1.0, -3.0, 0.0), Rank0(0.0, 0.0, complex(-1.0)),
               Rank1(complex(-1.0), -2.0)):
        pts = find_negative_eigenvalues(vc, eps)
        op = assemble(vc, eps, 2000, 2000)
        assert negative_count(op) == len(pts)
        got = lowest_eigenvalues(op, len(pts))
        want = sorted(p.lam for p in pts)
        for g, w in zip(got, want):
            assert abs(g - w) / abs(w) < 5e-3
