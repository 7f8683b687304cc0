"""Dense complex linear algebra kernels.

Matrices and vectors are plain numpy arrays.  Row vectors (left null
vectors, adjoint data) and column vectors are both stored as 1-D arrays;
the orientation is carried by how they are used (``psi @ M`` versus
``M @ phi``).
"""

import numpy as np
import scipy.linalg as spla

from .errors import (DimensionMismatch, NotRankDeficient, NotUnit,
                     NullSpaceTooLarge, SingularMatrix)

__all__ = [
    "as_matrix", "as_vector", "solve", "singular_values", "fix_phase",
    "right_null_vector", "left_null_vector", "orthonormal_complete",
    "TOL_RANK", "TOL_SINGULAR",
]

TOL_RANK = 1e-8
TOL_SINGULAR = 1e-14


def as_matrix(M, square=True):
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    if M.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got shape {M.shape}")
    if square and M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def as_vector(v, n=None):
    v = np.atleast_1d(np.asarray(v, dtype=complex))
    if v.ndim != 1:
        raise DimensionMismatch(f"expected a vector, got shape {v.shape}")
    if n is not None and v.shape[0] != n:
        raise DimensionMismatch(f"expected length {n}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    return v


def singular_values(M):
    return np.linalg.svd(as_matrix(M, square=False), compute_uv=False)


def solve(M, b, tol=TOL_SINGULAR):
    """Solve ``M x = b`` by pivoted LU.

    Parameters
    ----------
    M : (n, n) array_like
    b : (n,) array_like
    tol : float
        Reciprocal-condition threshold below which ``M`` is declared
        numerically singular.

    Returns
    -------
    x : ndarray
    cond : float
        2-norm condition number of ``M``.

    Raises
    ------
    SingularMatrix
    """
    M = as_matrix(M)
    b = as_vector(b, M.shape[0])
    s = singular_values(M)
    cond = np.inf if s[-1] == 0 else s[0] / s[-1]
    if s[0] == 0 or s[-1] <= tol * s[0]:
        raise SingularMatrix(f"matrix is numerically singular (cond={cond:.3e})", cond)
    lu, piv = spla.lu_factor(M, check_finite=False)
    return spla.lu_solve((lu, piv), b, check_finite=False), float(cond)


def fix_phase(v, rel=1e-8):
    """Rotate ``v`` so its first non-negligible entry is real positive."""
    v = np.asarray(v, dtype=complex)
    norm = np.linalg.norm(v)
    if norm == 0:
        return v.copy()
    k = int(np.argmax(np.abs(v) > rel * norm))
    return v * (abs(v[k]) / v[k])


def right_null_vector(M, tol_rank=TOL_RANK, scale=0.0):
    """Unit vector spanning the one-dimensional kernel of ``M``.

    Uses the smallest right singular vector.  The phase is fixed with
    :func:`fix_phase` so results are reproducible.  Singular values are
    compared against ``tol_rank * max(sigma_1, scale)``; pass ``scale`` when
    ``M`` is a sum of larger terms (for ``n = 1`` ``sigma_1`` is the
    smallest singular value itself).

    Raises
    ------
    NotRankDeficient
        If the smallest singular value exceeds ``tol_rank * sigma_1``.
    NullSpaceTooLarge
        If the second smallest singular value is also below tolerance.
    """
    M = as_matrix(M)
    _, s, vh = np.linalg.svd(M)
    thresh = tol_rank * max(s[0], scale)
    if s[-1] > thresh:
        raise NotRankDeficient(
            f"smallest singular value {s[-1]:.3e} exceeds {thresh:.3e}")
    if s.size > 1 and s[-2] <= thresh:
        raise NullSpaceTooLarge(
            f"kernel dimension > 1 (sigma_(n-1)={s[-2]:.3e})")
    return fix_phase(vh[-1].conj())


def left_null_vector(M, tol_rank=TOL_RANK, scale=0.0):
    """Row vector ``psi`` with ``psi @ M = 0`` (no conjugation)."""
    return right_null_vector(as_matrix(M).T, tol_rank, scale)


def orthonormal_complete(v1, tol=1e-10):
    """Complete a unit vector to a unitary basis.

    Returns a unitary matrix whose first column is exactly ``v1``; the
    remaining columns are ``H e_j`` for a Householder reflector ``H``
    mapping ``e_1`` to minus the phase-rotated ``v1``.  They depend continuously
    on ``v1`` wherever ``v1[0] != 0``.
    """
    v1 = as_vector(v1)
    if abs(np.linalg.norm(v1) - 1.0) > tol:
        raise NotUnit(f"|v1| = {np.linalg.norm(v1)!r} is not 1")
    n = v1.size
    phase = v1[0] / abs(v1[0]) if v1[0] != 0 else 1.0
    y = v1 / phase
    # e_1 + y never cancels since y[0] >= 0
    w = y.copy()
    w[0] += 1.0
    H = np.eye(n, dtype=complex) - 2.0 * np.outer(w, w.conj()) / np.vdot(w, w).real
    H[:, 0] = v1
    return H
