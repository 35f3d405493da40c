"""Small dense linear-algebra helpers shared across the package."""

from __future__ import annotations

import warnings

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve


class SingularBasis(np.linalg.LinAlgError):
    """A square subsystem whose factorization failed or looks singular."""


def solve_refined(M: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve M x = rhs by LU factorization plus one step of iterative refinement.

    Raises SingularBasis when the factorization fails, the pivots are
    negligible relative to the matrix scale, or the solution comes out
    non-finite.  (scipy's lu_factor only *warns* on exact singularity, so
    the pivot check is ours.)
    """
    M = np.asarray(M, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", LinAlgWarning)
            lu_piv = lu_factor(M)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SingularBasis(str(exc)) from exc
    pivots = np.abs(np.diagonal(lu_piv[0]))
    scale = max(1.0, float(np.abs(M).max()))
    if pivots.size and float(pivots.min()) <= 1e-14 * scale:
        raise SingularBasis("negligible pivot in LU factorization")
    x = lu_solve(lu_piv, rhs)
    x = x + lu_solve(lu_piv, rhs - M @ x)
    if not np.all(np.isfinite(x)):
        raise SingularBasis("solution has non-finite entries")
    return x


def null_direction(M: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    """Unit vector spanning the nullspace of a (k-1) x k matrix of full row rank.

    Raises SingularBasis when M is row-rank deficient (nullspace dimension
    above one), which for our callers signals a degenerate configuration.
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    k = M.shape[1]
    if M.shape[0] != k - 1:
        raise ValueError(f"expected a {k - 1} x {k} matrix, got {M.shape}")
    _, s, vh = np.linalg.svd(M)
    if k > 1 and s.size and s[-1] <= rtol * max(s[0], 1.0):
        raise SingularBasis("row-rank deficient subsystem")
    return vh[-1]


def orthonormal_plane(u: np.ndarray, v: np.ndarray, rtol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Gram-Schmidt an (u, v) pair into an orthonormal basis of their span."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    nu = np.linalg.norm(u)
    if nu <= rtol:
        raise ValueError("first spanning vector is numerically zero")
    e1 = u / nu
    w = v - (v @ e1) * e1
    nw = np.linalg.norm(w)
    if nw <= rtol * max(1.0, np.linalg.norm(v)):
        raise ValueError("spanning vectors are numerically parallel")
    return e1, w / nw


def haar_rotation(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal d x d matrix.

    QR of a standard Gaussian matrix with the sign fix that makes the
    diagonal of R positive, which removes the sign ambiguity of QR and
    yields the Haar measure on the orthogonal group.
    """
    Z = rng.standard_normal((d, d))
    Q, R = np.linalg.qr(Z)
    signs = np.sign(np.diag(R))
    signs[signs == 0.0] = 1.0
    return Q * signs
