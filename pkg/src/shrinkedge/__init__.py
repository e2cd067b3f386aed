"""Spectral toolkit for the Laplacian on a two-edge graph with a shrinking edge.

Negative-eigenvalue classification and root finding, explicit eigenfunctions
with edge localization, the closed-form resolvent, matrix-based eigenvalue
counting, and an independent finite-element cross-check, plus a CLI
(``shrinkedge``) driving sweeps and the verification suite.
"""

from .counting import CountReport, count_negative, count_report, hermitian3_eigs
from .eigenmodes import Eigenmode, LocalizationReport, build_eigenmode, localization, mode_residual
from .errors import (
    AmbiguousOrder,
    AmbiguousRate,
    CountMismatch,
    FactorizationBreakdown,
    GridTooCoarse,
    Inconsistent,
    InvalidRank,
    MeshTooCoarse,
    NearPole,
    NoRoot,
    NonHermitian,
    NotAnEigenvalue,
    ShrinkEdgeError,
    WrongBranch,
)
from .fd_oracle import DiscreteOperator, assemble, convergence_order, lowest_eigenvalues, negative_count
from .grids import GridFunction
from .resolvent import (
    BoundaryData,
    ProbeReport,
    ResolventSolution,
    apply_L,
    apply_L_eps,
    bfe_functional,
    boundary_data,
    coefficients,
    inner_product_eps,
    leading_order_probe,
    residual,
    resolve,
)
from .secular import (
    RateFit,
    SpectralPoint,
    find_negative_eigenvalues,
    fit_rate,
    g0,
    h0,
    scan_real_poles,
    secular_neg,
)
from .vertex_model import (
    EigPrediction,
    Rank0,
    Rank1,
    Rank2,
    VertexCondition,
    Z_INF,
    classify,
    nonresonant_short_edge,
    nonresonant_threshold,
    solve_kappa0,
    solve_kappa1,
    validate,
    vc_from_json,
    vc_to_json,
)

__version__ = "0.1.0"
