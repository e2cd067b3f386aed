"""Vertex-condition data model, classification and transcendental roots.

The operator acts as -d^2/dx^2 on a short edge of length ``eps`` (Neumann at
its free end) glued to a unit edge (Dirichlet at its free end).  The coupling
at the junction is parametrized by an orthogonal projection P on C^2 together
with a Hermitian map T on ker P, split into three shapes by rank P:

* rank 2 -- full Dirichlet decoupling, no parameters;
* rank 1 -- a direction ``z`` in C u {inf} and a real strength ``mu``;
* rank 0 -- a Hermitian 2x2 coupling ``[[a, c], [conj(c), b]]``.

``classify`` maps a condition to its predicted negative-eigenvalue branches:
type B tends to a finite limit -alpha, type S escapes like -alpha/eps, and
type C escapes at the fractional rate -alpha*eps^(-2/3).  The limiting
coefficients involve the unique positive roots of ``k*coth(k) = rhs``
computed by :func:`solve_kappa1` / :func:`solve_kappa0`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Union

import numpy as np

from ._rootfind import bisect
from ._stable import dk_kappa_coth_kappa, kappa_coth_kappa
from .errors import InvalidRank, NoRoot, NonHermitian, WrongBranch

__all__ = [
    "Z_INF",
    "Rank2",
    "Rank1",
    "Rank0",
    "VertexCondition",
    "EigPrediction",
    "validate",
    "classify",
    "solve_kappa1",
    "solve_kappa0",
    "nonresonant_short_edge",
    "nonresonant_threshold",
    "vertex_matrices",
    "vc_from_json",
    "vc_to_json",
]


class _ZInfinity:
    """Dedicated tag for z = infinity; never enters arithmetic."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Z_INF"


Z_INF = _ZInfinity()


@dataclass(frozen=True)
class Rank2:
    """Full-rank projection: both edge traces pinned to zero at the junction."""


@dataclass(frozen=True)
class Rank1:
    """Rank-one projection along (1, z) with Hermitian strength mu on its kernel."""

    z: Union[complex, _ZInfinity]
    mu: float


@dataclass(frozen=True)
class Rank0:
    """No projection; generalized Robin coupling U' = [[a, c], [conj(c), b]] U."""

    a: float
    b: float
    c: complex


VertexCondition = Union[Rank2, Rank1, Rank0]


@dataclass(frozen=True)
class EigPrediction:
    """One predicted negative-eigenvalue branch: kind in {B, S, C}, leading alpha > 0."""

    kind: str
    alpha: float

    def __post_init__(self):
        if self.kind not in ("B", "S", "C"):
            raise ValueError(f"unknown branch kind {self.kind!r}")
        if not self.alpha > 0.0:
            raise ValueError("alpha must be positive")


def _real_part(x, what: str) -> float:
    x = complex(x)
    if x.imag != 0.0:
        raise NonHermitian(f"{what} must be real, got {x}")
    return float(x.real)


def validate(vc: VertexCondition) -> VertexCondition:
    """Check invariants and return a canonicalized copy of ``vc``.

    Raises ``NonHermitian`` when a real field carries an imaginary part and
    ``InvalidRank`` for unknown tags.  An explicitly infinite ``z`` (the tag,
    or a float/complex infinity) is canonicalized to ``Z_INF``; large finite
    values are left untouched.
    """
    if isinstance(vc, Rank2):
        return vc
    if isinstance(vc, Rank1):
        mu = _real_part(vc.mu, "mu")
        z = vc.z
        if not isinstance(z, _ZInfinity):
            z = complex(z)
            if np.isinf(z.real) or np.isinf(z.imag):
                z = Z_INF
        out = Rank1(z=z, mu=mu)
        if not isinstance(out.z, _ZInfinity):
            p, q, _ = vertex_matrices(out)
            eye = np.eye(2)
            for name, defect in (
                ("P^2 = P", p @ p - p),
                ("P* = P", p.conj().T - p),
                ("P(I-P) = 0", p @ (eye - p)),
                ("Q = I - P", q - (eye - p)),
            ):
                if np.max(np.abs(defect)) > 1e-14:
                    raise InvalidRank(f"projection invariant {name} violated")
        return out
    if isinstance(vc, Rank0):
        return Rank0(
            a=_real_part(vc.a, "a"),
            b=_real_part(vc.b, "b"),
            c=complex(vc.c),
        )
    raise InvalidRank(f"unknown vertex condition {type(vc).__name__}")


def vertex_matrices(vc: VertexCondition):
    """Return (P, Q, T) as 2x2 complex arrays; T is extended by zero off ker P."""
    if isinstance(vc, Rank2):
        return np.eye(2, dtype=complex), np.zeros((2, 2), complex), np.zeros((2, 2), complex)
    if isinstance(vc, Rank1):
        if vc.z is Z_INF:
            p = np.diag([0.0, 1.0]).astype(complex)
            q = np.diag([1.0, 0.0]).astype(complex)
        else:
            # project onto the span of (1, conj(z)); normalized construction
            # keeps huge |z| from overflowing
            u = np.array([1.0, np.conj(complex(vc.z))], complex)
            u = u / np.linalg.norm(u)
            p = np.outer(u, u.conj())
            q = np.eye(2) - p
        return p, q, vc.mu * q
    if isinstance(vc, Rank0):
        t = np.array([[vc.a, vc.c], [np.conj(vc.c), vc.b]], complex)
        return np.zeros((2, 2), complex), np.eye(2, dtype=complex), t
    raise InvalidRank(f"unknown vertex condition {type(vc).__name__}")


def _kcoth_root(rhs: float) -> float:
    """Unique positive root of k*coth(k) = rhs, rhs > 1, to ~1e-15 relative."""
    lo, hi = 1e-12, max(10.0, rhs + 2.0)
    f = lambda k: float(kappa_coth_kappa(k)) - rhs
    k = bisect(f, lo, hi, rtol=1e-12)
    for _ in range(3):  # Newton polish; k*coth(k) is smooth and increasing
        step = f(k) / float(dk_kappa_coth_kappa(k))
        k_new = k - step
        if not lo <= k_new <= hi:
            break
        k = k_new
    return k


def solve_kappa1(z, mu: float) -> float:
    """Root of k*coth(k) = -mu*(1+|z|^2) for the rank-1 bounded branch.

    Raises ``NoRoot`` when -mu*(1+|z|^2) <= 1 (the left side has minimum 1)
    and for z = inf, where no bounded branch exists.
    """
    if isinstance(z, _ZInfinity):
        raise NoRoot("bounded branch requires finite z")
    rhs = -float(mu) * (1.0 + abs(complex(z)) ** 2)
    if rhs <= 1.0:
        raise NoRoot(f"k*coth(k) = {rhs:g} <= 1 has no positive root")
    return _kcoth_root(rhs)


def solve_kappa0(a: float, b: float, c) -> float:
    """Root of k*coth(k) = (|c|^2 - a*b)/a (a != 0) or = -b (a = c = 0).

    Raises ``WrongBranch`` for a = 0, c != 0 (that branch escapes at the
    cubic-root rate and has no fixed root) and ``NoRoot`` when the right
    side does not exceed 1.
    """
    a = float(a)
    c = complex(c)
    if a == 0.0:
        if c != 0.0:
            raise WrongBranch("a = 0 with c != 0 has no bounded-branch root")
        rhs = -float(b)
    else:
        rhs = (abs(c) ** 2 - a * float(b)) / a
    if rhs <= 1.0:
        raise NoRoot(f"k*coth(k) = {rhs:g} <= 1 has no positive root")
    return _kcoth_root(rhs)


def classify(vc: VertexCondition) -> list[EigPrediction]:
    """Predicted negative-eigenvalue branches for ``vc``.

    The list is empty when no negative eigenvalues exist, and never longer
    than two; two branches occur exactly when |c|^2 - a*b < a < 0.  Boundary
    equalities follow the strict inequalities of the classification table:
    e.g. mu*(1+|z|^2) = -1 yields no branch (the root degenerates to 0).
    """
    vc = validate(vc)
    if isinstance(vc, Rank2):
        return []
    if isinstance(vc, Rank1):
        if vc.z is Z_INF:
            if vc.mu < 0.0:
                return [EigPrediction("S", abs(vc.mu))]
            return []
        if vc.mu * (1.0 + abs(complex(vc.z)) ** 2) < -1.0:
            return [EigPrediction("B", solve_kappa1(vc.z, vc.mu) ** 2)]
        return []
    a, b, c = vc.a, vc.b, vc.c
    c2 = abs(c) ** 2
    if a < 0.0:
        if c2 < a * (b + 1.0):
            return [
                EigPrediction("B", solve_kappa0(a, b, c) ** 2),
                EigPrediction("S", abs(a)),
            ]
        return [EigPrediction("S", abs(a))]
    if a == 0.0:
        if c != 0.0:
            return [EigPrediction("C", abs(c) ** (4.0 / 3.0))]
        if b + 1.0 < 0.0:
            return [EigPrediction("B", solve_kappa0(a, b, c) ** 2)]
        return []
    if c2 > a * (b + 1.0):
        return [EigPrediction("B", solve_kappa0(a, b, c) ** 2)]
    return []


def nonresonant_short_edge(vc: VertexCondition) -> bool:
    """Short-edge non-resonance: junction data cannot live on the short edge alone.

    False exactly for (rank 1, z = inf, mu = 0) and (rank 0, a = c = 0); in
    those two cases the shrinking edge decouples with Neumann ends and keeps
    an order-one trace in the resolvent limit.
    """
    vc = validate(vc)
    if isinstance(vc, Rank1):
        return not (vc.z is Z_INF and vc.mu == 0.0)
    if isinstance(vc, Rank0):
        return not (vc.a == 0.0 and vc.c == 0.0)
    return True


def nonresonant_threshold(vc: VertexCondition) -> bool:
    """Threshold non-resonance of the stretched comparison problem.

    False exactly for (rank 1, z = inf) and for every rank-0 condition:
    in those cases the rescaled graph with a half-line lead supports an
    eigenfunction constant on the finite edge, embedded at the bottom of
    the continuous spectrum.
    """
    vc = validate(vc)
    if isinstance(vc, Rank1):
        return vc.z is not Z_INF
    if isinstance(vc, Rank0):
        return False
    return True


# ---------------------------------------------------------------------------
# JSON encoding:
#   {"rank_p": 2}
#   {"rank_p": 1, "z": {"re": x, "im": y} | "inf", "mu": m}
#   {"rank_p": 0, "a": a, "b": b, "c": {"re": x, "im": y}}
# Plain numbers are accepted wherever a complex scalar is expected.
# ---------------------------------------------------------------------------

def _scalar_from(obj) -> complex:
    if isinstance(obj, dict):
        return complex(float(obj.get("re", 0.0)), float(obj.get("im", 0.0)))
    if isinstance(obj, (int, float)):
        return complex(obj)
    raise InvalidRank(f"cannot parse scalar {obj!r}")


def _scalar_to(x: complex):
    x = complex(x)
    return {"re": x.real, "im": x.imag}


def vc_from_json(data) -> VertexCondition:
    """Build a vertex condition from a JSON string or already-parsed dict."""
    if isinstance(data, (str, bytes)):
        data = json.loads(data)
    if not isinstance(data, dict) or "rank_p" not in data:
        raise InvalidRank("vertex condition JSON must be an object with 'rank_p'")
    rank = data["rank_p"]
    if rank == 2:
        return validate(Rank2())
    if rank == 1:
        z = data.get("z", "inf")
        z = Z_INF if z == "inf" else _scalar_from(z)
        return validate(Rank1(z=z, mu=_scalar_from(data.get("mu", 0.0))))
    if rank == 0:
        return validate(
            Rank0(
                a=_scalar_from(data.get("a", 0.0)),
                b=_scalar_from(data.get("b", 0.0)),
                c=_scalar_from(data.get("c", 0.0)),
            )
        )
    raise InvalidRank(f"rank_p must be 0, 1 or 2, got {rank!r}")


def vc_to_json(vc: VertexCondition) -> dict:
    """Inverse of :func:`vc_from_json`."""
    vc = validate(vc)
    if isinstance(vc, Rank2):
        return {"rank_p": 2}
    if isinstance(vc, Rank1):
        z = "inf" if vc.z is Z_INF else _scalar_to(vc.z)
        return {"rank_p": 1, "z": z, "mu": vc.mu}
    return {"rank_p": 0, "a": vc.a, "b": vc.b, "c": _scalar_to(vc.c)}
