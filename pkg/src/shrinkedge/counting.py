"""Negative-eigenvalue count for rank-0 couplings via a 3x3 matrix inertia.

The count of negative eigenvalues of the graph operator equals the number of
positive eigenvalues of a small Hermitian matrix assembled from the vertex
data and the Dirichlet-to-Neumann map of the graph at zero energy.  The 4x4
construction (vertex encoding pair, DtN block) reduces to the 3x3 matrix

    D_eps = [[-1/eps, 1/eps, 0], [1/eps, -a-1/eps, -c], [0, -conj(c), -b-1]]

whose positive-eigenvalue count is independent of eps and is also given in
closed form:

    2   if |c|^2 - a*b < a < 0,
    1   if |c|^2 - a*b > a,  or  |c|^2 = a*(b+1) and a + b + 1 < 0,
    0   otherwise.

Both routes are computed and compared; disagreement raises ``Inconsistent``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import Inconsistent, NonHermitian
from .vertex_model import Rank0, validate

__all__ = [
    "CountReport",
    "build_E0",
    "build_D_infty",
    "build_D_eps",
    "vertex_encoding",
    "dtn_at_zero",
    "build_D",
    "hermitian3_eigs",
    "closed_form_count",
    "count_report",
    "count_negative",
]

COND_TWO = "|c|^2 - a*b < a < 0"
COND_ONE_STRICT = "|c|^2 - a*b > a"
COND_ONE_EQUALITY = "|c|^2 = a*(b+1), a+b+1 < 0"
COND_NONE = "none"


def build_E0() -> np.ndarray:
    """Rank-one coupling block subtracted with weight 1/eps."""
    return np.array([[1.0, -1.0, 0.0], [-1.0, 1.0, 0.0], [0.0, 0.0, 0.0]], complex)


def build_D_infty(a: float, b: float, c: complex) -> np.ndarray:
    """eps-independent part of the reduced matrix."""
    c = complex(c)
    return np.array(
        [[0.0, 0.0, 0.0], [0.0, -a, -c], [0.0, -np.conj(c), -b - 1.0]], complex
    )


def build_D_eps(a: float, b: float, c: complex, epsilon: float) -> np.ndarray:
    """Reduced 3x3 Hermitian matrix D_eps = D_infty - E0/eps."""
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    return build_D_infty(a, b, c) - build_E0() / epsilon


def vertex_encoding(a: float, b: float, c: complex):
    """4x4 pair (A, B) encoding the Robin coupling and the two pinned ends."""
    c = complex(c)
    amat = np.zeros((4, 4), complex)
    amat[1, 1], amat[1, 2] = -a, -c
    amat[2, 1], amat[2, 2] = -np.conj(c), -b
    amat[3, 3] = 1.0
    bmat = np.diag([1.0, 1.0, 1.0, 0.0]).astype(complex)
    return amat, bmat


def dtn_at_zero(epsilon: float) -> np.ndarray:
    """Dirichlet-to-Neumann map of the two bare edges at zero energy."""
    e = 1.0 / epsilon
    return np.array(
        [
            [-e, e, 0.0, 0.0],
            [e, -e, 0.0, 0.0],
            [0.0, 0.0, -1.0, 1.0],
            [0.0, 0.0, 1.0, -1.0],
        ],
        complex,
    )


def build_D(a: float, b: float, c: complex, epsilon: float) -> np.ndarray:
    """Full 4x4 matrix A@B* + B@M@B*; its top-left 3x3 block is D_eps."""
    amat, bmat = vertex_encoding(a, b, c)
    m = dtn_at_zero(epsilon)
    return amat @ bmat.conj().T + bmat @ m @ bmat.conj().T


def hermitian3_eigs(m) -> np.ndarray:
    """Ascending eigenvalues of a 3x3 Hermitian matrix by cyclic Jacobi sweeps.

    The unitary two-sided rotations keep eigenvalues accurate to machine
    precision times the matrix norm, including clustered spectra.
    """
    a = np.array(m, dtype=complex)
    if a.shape != (3, 3):
        raise ValueError("expected a 3x3 matrix")
    scale = np.linalg.norm(a)
    if np.max(np.abs(a - a.conj().T)) > 1e-14 * max(1.0, scale):
        raise NonHermitian("matrix is not Hermitian")
    a = (a + a.conj().T) / 2.0
    if scale == 0.0:
        return np.zeros(3)
    for _ in range(60):
        off2 = abs(a[0, 1]) ** 2 + abs(a[0, 2]) ** 2 + abs(a[1, 2]) ** 2
        if off2 <= (1e-16 * scale) ** 2:
            break
        for p, q in ((0, 1), (0, 2), (1, 2)):
            apq = a[p, q]
            if abs(apq) == 0.0:
                continue
            phase = apq / abs(apq)
            tau = (a[q, q].real - a[p, p].real) / (2.0 * abs(apq))
            t = (1.0 if tau >= 0.0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
            cth = 1.0 / np.sqrt(1.0 + t * t)
            sth = t * cth
            u = np.eye(3, dtype=complex)
            u[p, p] = cth
            u[q, q] = cth
            u[p, q] = sth * phase
            u[q, p] = -sth * np.conj(phase)
            a = u.conj().T @ a @ u
    return np.sort(np.diag(a).real)


def closed_form_count(a: float, b: float, c: complex) -> tuple[int, str]:
    """Count and matched condition from the closed-form classification."""
    a, b, c = float(a), float(b), complex(c)
    d = abs(c) ** 2 - a * b
    if d < a and a < 0.0:
        return 2, COND_TWO
    if d > a:
        return 1, COND_ONE_STRICT
    if d == a and a + b + 1.0 < 0.0:
        # d == a is |c|^2 = a*(b+1); the boundary case carries one eigenvalue
        return 1, COND_ONE_EQUALITY
    return 0, COND_NONE


@dataclass(frozen=True)
class CountReport:
    count: int
    via_inertia: int
    via_closed_form: int
    conditions_matched: str


def count_report(vc: Rank0, epsilon: float) -> CountReport:
    """Count negative eigenvalues by matrix inertia and by the closed form.

    For eps <= 1e-6 the inertia is taken on the congruence-scaled matrix
    diag(sqrt(eps), sqrt(eps), 1) * D_eps * diag(sqrt(eps), sqrt(eps), 1),
    which has the same signature but no 1/eps entries.  Eigenvalues within
    1e-9 of zero (relative to the norm) count as zero; the closed form is
    authoritative on those boundary cases by construction of the comparison.
    """
    vc = validate(vc)
    if not isinstance(vc, Rank0):
        raise TypeError("matrix count is defined for rank-0 couplings only")
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    a, b, c = vc.a, vc.b, vc.c
    if epsilon <= 1e-6:
        # scaled congruent image of D_eps, assembled directly
        r = np.sqrt(epsilon)
        m = np.array(
            [
                [-1.0, 1.0, 0.0],
                [1.0, -a * epsilon - 1.0, -c * r],
                [0.0, -np.conj(c) * r, -b - 1.0],
            ],
            complex,
        )
    else:
        m = build_D_eps(a, b, c, epsilon)
    eigs = hermitian3_eigs(m)
    tol = 1e-9 * max(np.linalg.norm(np.asarray(m)), 1e-300)
    via_inertia = int(np.sum(eigs > tol))
    n_zero = int(np.sum(np.abs(eigs) <= tol))
    via_closed, cond = closed_form_count(a, b, c)
    # a zero-tolerance eigenvalue may legitimately sit on either side at the
    # equality boundary; the closed form decides there, anything else is a bug
    if not via_inertia <= via_closed <= via_inertia + n_zero:
        raise Inconsistent(
            f"inertia count {via_inertia} (+{n_zero} near zero) != closed-form "
            f"count {via_closed} for a={a:g}, b={b:g}, c={c}, eps={epsilon:g}"
        )
    return CountReport(via_closed, via_inertia, via_closed, cond)


def count_negative(vc: Rank0, epsilon: float) -> int:
    """Number of negative eigenvalues (0, 1 or 2) for a rank-0 coupling."""
    return count_report(vc, epsilon).count
