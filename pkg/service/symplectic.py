"""
Real symplectic linear algebra

Lagrangian frames, rank-based intersections, the Souriau map with its
complexification, and the doubled space omega (+) (-omega) used for two-path
Maslov indices.
"""

import logging
from typing import Optional, Tuple

import numpy as np
from scipy import linalg as la

from _types.data_models import (
    DOUBLED, STANDARD, IntersectionBasis, LagrangianFrame, SymplecticSpace
)
from _types.errors import BorderlineRankError, NonLagrangianError, SymplecticError

logger = logging.getLogger(__name__)

J2 = np.array([[0.0, 1.0], [-1.0, 0.0]])

DEFAULT_RANK_TOL = 1e-9
DEFAULT_ISOTROPY_TOL = 1e-8
BORDERLINE_FACTOR = 10.0


def make_standard_space(m: int) -> SymplecticSpace:
    """Build (R^{2m}, omega) with Omega = J (x) I_m."""
    if m < 1:
        raise SymplecticError(f"half dimension must be positive, got {m}")
    return SymplecticSpace(half_dim=m, omega_matrix=np.kron(J2, np.eye(m)), kind=STANDARD)


def double_space(space: SymplecticSpace) -> SymplecticSpace:
    """Build the doubled space with form Omega (+) (-Omega)."""
    if space.kind != STANDARD:
        raise SymplecticError("only a standard space can be doubled")
    omega = la.block_diag(space.omega_matrix, -space.omega_matrix)
    return SymplecticSpace(half_dim=2 * space.half_dim, omega_matrix=omega, kind=DOUBLED)


def _same_space(a: SymplecticSpace, b: SymplecticSpace) -> bool:
    return a.kind == b.kind and a.half_dim == b.half_dim


def isotropy_defect(space: SymplecticSpace, columns: np.ndarray) -> float:
    """max |A^T Omega A| for a frame A"""
    return float(np.max(np.abs(columns.T @ space.omega_matrix @ columns)))


def make_frame(space: SymplecticSpace, columns: np.ndarray,
               rank_tol: float = DEFAULT_RANK_TOL,
               isotropy_tol: float = DEFAULT_ISOTROPY_TOL) -> LagrangianFrame:
    """
    Orthonormalize a spanning set and validate it as a Lagrangian frame.

    Args:
        space: ambient symplectic space
        columns: 2m x m real matrix whose columns span the plane
        rank_tol: relative threshold on the pivoted-QR diagonal
        isotropy_tol: bound on max |Q^T Omega Q| after orthonormalization

    Returns:
        LagrangianFrame with orthonormal columns

    Raises:
        NonLagrangianError: rank deficient or not isotropic
    """
    columns = np.asarray(columns, dtype=float)
    m = space.half_dim
    if columns.shape != (2 * m, m):
        raise SymplecticError(f"frame must be {2 * m}x{m}, got {columns.shape}")
    if not np.all(np.isfinite(columns)):
        raise NonLagrangianError("frame has non-finite entries")

    q, r, _ = la.qr(columns, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag[0] == 0.0 or diag[-1] <= rank_tol * diag[0]:
        raise NonLagrangianError(
            f"frame is rank deficient (smallest pivot {diag[-1]:.3e}, largest {diag[0]:.3e})"
        )

    defect = isotropy_defect(space, q)
    if defect > isotropy_tol:
        raise NonLagrangianError(f"frame is not isotropic: max |A^T Omega A| = {defect:.3e}")
    return LagrangianFrame(space=space, columns=q)


def is_lagrangian(frame: LagrangianFrame, tol: float = 1e-10) -> bool:
    cols = frame.columns
    if cols.shape != (frame.space.dim, frame.space.half_dim):
        return False
    s = np.linalg.svd(cols, compute_uv=False)
    return bool(s[-1] > DEFAULT_RANK_TOL * s[0] and isotropy_defect(frame.space, cols) <= tol * s[0] ** 2)


def diagonal_plane(doubled: SymplecticSpace) -> LagrangianFrame:
    """Delta = {(p, p)} in the doubled space."""
    if doubled.kind != DOUBLED:
        raise SymplecticError("the diagonal plane lives in a doubled space")
    m = doubled.half_dim
    eye = np.eye(m)
    return make_frame(doubled, np.vstack([eye, eye]))


def direct_sum(first: LagrangianFrame, second: LagrangianFrame) -> LagrangianFrame:
    """The plane first (+) second in the doubled space of their common space."""
    if not _same_space(first.space, second.space) or first.space.kind != STANDARD:
        raise SymplecticError("direct sums need two frames of the same standard space")
    doubled = double_space(first.space)
    cols = la.block_diag(first.columns, second.columns)
    return LagrangianFrame(space=doubled, columns=cols)


def intersect(a: LagrangianFrame, b: LagrangianFrame, tol: float = DEFAULT_RANK_TOL,
              interval: Optional[Tuple[float, float]] = None) -> IntersectionBasis:
    """
    Intersection of two planes from the nullity of [A | -B].

    Singular values below tol * sigma_max count as zero; a singular value
    within a factor 10 of that threshold raises BorderlineRankError.
    """
    if not _same_space(a.space, b.space):
        raise SymplecticError("frames belong to different spaces")
    m = a.space.half_dim
    stacked = np.hstack([a.columns, -b.columns])
    _, s, vt = np.linalg.svd(stacked)
    threshold = tol * s[0]
    for value in s:
        if threshold / BORDERLINE_FACTOR < value < threshold * BORDERLINE_FACTOR:
            raise BorderlineRankError(float(value), float(threshold), interval)

    null = int(np.sum(s < threshold))
    if null == 0:
        return IntersectionBasis(vectors=np.zeros((2 * m, 0)), dim_real=0, singular_values=s)

    coeffs = vt[-null:].T
    # average the two representations of each null vector
    vectors = 0.5 * (a.columns @ coeffs[:m] + b.columns @ coeffs[m:])
    vectors = la.orth(vectors)
    return IntersectionBasis(vectors=vectors, dim_real=vectors.shape[1], singular_values=s)


def smallest_singular_value(a: LagrangianFrame, b: LagrangianFrame) -> float:
    return float(np.linalg.svd(np.hstack([a.columns, -b.columns]), compute_uv=False)[-1])


def souriau_map(x: LagrangianFrame, y: LagrangianFrame, tol: float = 1e-8) -> np.ndarray:
    """
    Complexified Souriau map S_X(Y) = (I - 2 P_Y)(2 P_X - I).

    S commutes with Omega, so it is complex linear for the structure i = -Omega.
    In the orthonormal basis [X, -Omega X] it becomes the m x m matrix
    U = X^T S X - i (Omega X)^T S X, whose -1 eigenspace has complex dimension
    dim(X cap Y).

    Raises:
        NonLagrangianError: U is not unitary to tol
    """
    if not _same_space(x.space, y.space):
        raise SymplecticError("frames belong to different spaces")
    n2 = x.space.dim
    eye = np.eye(n2)
    s_map = (eye - 2.0 * y.projection) @ (2.0 * x.projection - eye)
    xs = s_map @ x.columns
    omega_x = x.space.omega_matrix @ x.columns
    u = x.columns.T @ xs - 1j * (omega_x.T @ xs)

    defect = float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
    if defect > tol:
        raise NonLagrangianError(f"Souriau matrix is not unitary (defect {defect:.3e})")
    return u


def eigenphases(u: np.ndarray) -> np.ndarray:
    """Eigenphases alpha of U measured from -1: mu = exp(i (pi + alpha)), alpha in (-pi, pi]."""
    mu = np.linalg.eigvals(u)
    return np.angle(-mu)


def minus_one_multiplicity(u: np.ndarray, delta: float = 1e-6) -> int:
    """Number of eigenvalues of U within angular distance delta of pi."""
    return int(np.sum(np.abs(eigenphases(u)) <= delta))


def plane_gap(a: LagrangianFrame, b: LagrangianFrame) -> float:
    """Gap metric ||P_A - P_B||_2 on the Lagrangian Grassmannian."""
    if not _same_space(a.space, b.space):
        raise SymplecticError("frames belong to different spaces")
    return float(np.linalg.norm(a.projection - b.projection, 2))


def _random_unitary_frame(m: int, rng: np.random.Generator) -> np.ndarray:
    """Orthogonal 2m x 2m matrix commuting with J (x) I_m (a realified unitary)"""
    z = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    re, im = q.real, q.imag
    # with Omega = [[0, I], [-I, 0]], i acts as -Omega = [[0, -I], [I, 0]]
    return np.block([[re, -im], [im, re]])


def random_lagrangian(space: SymplecticSpace, rng: np.random.Generator) -> LagrangianFrame:
    """A random Lagrangian plane: the graph of a symmetric map, rotated by a random unitary."""
    if space.kind != STANDARD:
        raise SymplecticError("random planes are drawn in a standard space")
    m = space.half_dim
    sym = rng.normal(size=(m, m))
    sym = 0.5 * (sym + sym.T)
    graph = np.vstack([np.eye(m), sym])
    return make_frame(space, _random_unitary_frame(m, rng) @ graph)


def random_lagrangian_pair(space: SymplecticSpace, k: int,
                           rng: np.random.Generator) -> Tuple[LagrangianFrame, LagrangianFrame]:
    """
    A pair of Lagrangian planes meeting in exactly k dimensions.

    Y keeps k basis vectors of X and tilts the rest by angles bounded away
    from 0 and pi towards Omega X.
    """
    m = space.half_dim
    if not 0 <= k <= m:
        raise SymplecticError(f"intersection dimension must lie in [0, {m}]")
    x = random_lagrangian(space, rng)
    xc = x.columns
    oxc = space.omega_matrix @ xc
    phis = rng.uniform(0.3, np.pi - 0.3, size=m - k)
    tilted = np.cos(phis) * xc[:, k:] + np.sin(phis) * oxc[:, k:]
    y_cols = np.hstack([xc[:, :k], tilted])
    mix = rng.normal(size=(m, m)) + 3.0 * np.eye(m)
    return x, make_frame(space, y_cols @ mix)
