"""Verified enclosures of eigenvalues and eigenvectors of complex matrices.

An approximate eigenbasis turns the matrix into a nearly diagonal one; a
dominance (cone) condition on a diagonally scaled, shifted copy then
certifies a box around each simple eigenvector and its eigenvalue. All
bounds are computed in outward-rounded interval arithmetic.
"""

__version__ = "0.1.0"

from .approx import ApproxEigenSet, SolverConfig, approx_eigendecompose, pair_order
from .cone import (
    BlockSplit,
    DominanceReport,
    EigenEnclosure,
    SearchConfig,
    VerifyConfig,
    b_epsilon,
    check_condition,
    co_bound,
    enclose_eigenvector,
    epsilon_search,
    ex_bound,
    is_dominating,
    rayleigh_enclosure,
    rnorm,
    similarity,
    verify_all,
)
from .errors import (
    ConeEigError,
    DimensionMismatch,
    DivisionByZeroInterval,
    ExBoundUnavailable,
    IndexOutOfRange,
    NoConvergence,
    ParseError,
    SingularPivot,
    VerificationFailure,
    ZeroDenominator,
    ZeroLeadingCoefficient,
)
from .interval import CInterval, Interval, civ_hull, iv_hull
from .linalg import IMatrix, IVector, Without, gj_inverse, mat_mul, mat_vec, submatrix, sup_norm
from .polyroot import Polynomial, RootEnclosure, companion, enclose_roots, horner, normalize
