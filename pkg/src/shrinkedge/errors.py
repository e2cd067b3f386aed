"""Exception hierarchy shared across the package."""


class ShrinkEdgeError(Exception):
    """Base class for all library errors."""


class InvalidRank(ShrinkEdgeError):
    """Vertex condition carries an unknown tag or projection rank."""


class NonHermitian(ShrinkEdgeError):
    """Coupling data that must be real/Hermitian carries an imaginary part."""


class NoRoot(ShrinkEdgeError):
    """The transcendental equation has no positive root for these parameters."""


class WrongBranch(ShrinkEdgeError):
    """Root requested on a branch that does not exist for these parameters."""


class CountMismatch(ShrinkEdgeError):
    """Located secular roots disagree with the predicted eigenvalue count."""


class AmbiguousRate(ShrinkEdgeError):
    """Fitted decay rate is not close to any admissible exponent."""


class GridTooCoarse(ShrinkEdgeError):
    """Grid has too few nodes for the requested quadrature."""


class NearPole(ShrinkEdgeError):
    """Spectral parameter too close to a resolvent pole."""


class AmbiguousOrder(ShrinkEdgeError):
    """Successive-ratio slopes too inconsistent to assign an order."""


class NotAnEigenvalue(ShrinkEdgeError):
    """Supplied point does not solve the secular equation."""


class Inconsistent(ShrinkEdgeError):
    """Matrix inertia and closed-form count disagree (implementation bug)."""


class MeshTooCoarse(ShrinkEdgeError):
    """Finite-element mesh below the minimal node count."""


class FactorizationBreakdown(ShrinkEdgeError):
    """LDL factorization hit a zero pivot at (or too close to) an exact shift."""
