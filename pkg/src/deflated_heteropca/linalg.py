"""Dense linear algebra primitives.

Matrices are plain 2-D ``numpy.ndarray`` objects of dtype float64. An
"orthonormal basis" is an ``(n, r)`` array whose columns are orthonormal.

Deterministic conventions used throughout:

* eigenpairs are ordered by eigenvalue magnitude, descending; ties are broken
  by signed value (descending) and then by the LAPACK output index;
* every returned eigen/singular vector is flipped so that its largest-magnitude
  entry is positive (entry ties go to the lowest row index).
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import ContractError, DimensionError, SingularityError

SYMMETRY_RTOL = 1e-10
SINGULAR_RTOL = 1e-12
_SIGN_TIE_RTOL = 1e-12


class SpectrumDecomposition(NamedTuple):
    """Leading eigenpairs of a symmetric matrix.

    ``values[k]`` pairs with column ``basis[:, k]``.
    """

    values: np.ndarray
    basis: np.ndarray

    def reconstruct(self) -> np.ndarray:
        """Return ``basis @ diag(values) @ basis.T``."""
        return (self.basis * self.values) @ self.basis.T


def as_matrix(M, name: str = "M") -> np.ndarray:
    """Coerce ``M`` to a finite 2-D float64 array."""
    A = np.asarray(M, dtype=float)
    if A.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ContractError(f"{name} contains non-finite entries")
    return A


def _as_square(M, name: str = "M") -> np.ndarray:
    A = as_matrix(M, name)
    if A.shape[0] != A.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {A.shape}")
    return A


def diag_project(M) -> np.ndarray:
    """Keep the diagonal of a square matrix and zero everything else."""
    A = _as_square(M)
    return np.diag(np.diag(A))


def offdiag_project(M) -> np.ndarray:
    """Zero the diagonal of a square matrix; off-diagonal entries are copied."""
    A = _as_square(M)
    out = A.copy()
    np.fill_diagonal(out, 0.0)
    return out


def canonical_signs(V: np.ndarray) -> np.ndarray:
    """Return a ``(k,)`` array of +/-1 that makes each column's dominant entry positive."""
    if V.shape[1] == 0:
        return np.ones(0)
    mags = np.abs(V)
    peak = mags.max(axis=0)
    # first row whose magnitude ties the column peak
    lead = np.argmax(mags >= peak * (1.0 - _SIGN_TIE_RTOL), axis=0)
    signs = np.sign(V[lead, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return signs


def _magnitude_order(values: np.ndarray) -> np.ndarray:
    idx = np.arange(values.size)
    return np.lexsort((idx, -values, -np.abs(values)))


def top_r_eigs(M, r: int) -> SpectrumDecomposition:
    """Leading ``r`` eigenpairs (by magnitude) of a symmetric matrix.

    A full symmetric eigendecomposition is computed and truncated. Inputs whose
    asymmetry is within ``1e-10`` of their norm are symmetrized first.

    Parameters
    ----------
    M : (n, n) array_like
        Symmetric matrix.
    r : int
        Number of eigenpairs, ``1 <= r <= n``.

    Returns
    -------
    SpectrumDecomposition
        ``values`` sorted by decreasing magnitude and the matching orthonormal
        ``basis`` of shape ``(n, r)``.
    """
    A = _as_square(M)
    n = A.shape[0]
    if not 1 <= r <= n:
        raise DimensionError(f"rank r={r} out of range [1, {n}]")
    asym = A - A.T
    S = 0.5 * (A + A.T)
    w, V = np.linalg.eigh(S)
    scale = np.max(np.abs(w)) if w.size else 0.0
    if np.linalg.norm(asym) > SYMMETRY_RTOL * scale:
        raise ContractError("matrix is not symmetric within tolerance")
    order = _magnitude_order(w)[:r]
    values = w[order]
    basis = V[:, order]
    basis = basis * canonical_signs(basis)
    return SpectrumDecomposition(values, basis)


def thin_svd(M, r: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Rank-``r`` truncated SVD ``M ~ left @ diag(values) @ right.T``.

    Signs follow the left factor's convention; the right factor is flipped
    to keep the product unchanged.
    """
    A = as_matrix(M)
    k = min(A.shape)
    if not 1 <= r <= k:
        raise DimensionError(f"rank r={r} out of range [1, {k}]")
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    left = U[:, :r]
    right = Vt[:r].T
    signs = canonical_signs(left)
    return left * signs, s[:r].copy(), right * signs


def _polar(H: np.ndarray, strict: bool) -> np.ndarray:
    U, s, Vt = np.linalg.svd(H)
    if strict and (s.size == 0 or s[-1] <= SINGULAR_RTOL * s[0]):
        raise SingularityError("matrix is rank deficient; sign matrix undefined")
    return U @ Vt


def sign_matrix(H) -> np.ndarray:
    """Orthogonal polar factor ``U V^T`` of a full-rank square matrix ``H = U S V^T``."""
    return _polar(_as_square(H, "H"), strict=True)


def _check_pair(U, Ustar) -> tuple[np.ndarray, np.ndarray]:
    U = as_matrix(U, "U")
    Ustar = as_matrix(Ustar, "Ustar")
    if U.shape != Ustar.shape:
        raise DimensionError(f"basis shapes differ: {U.shape} vs {Ustar.shape}")
    return U, Ustar


def optimal_rotation(U, Ustar) -> np.ndarray:
    """Orthogonal ``R`` minimizing ``||U R - Ustar||_F``, i.e. ``sgn(U^T Ustar)``.

    Raises SingularityError when ``U^T Ustar`` is rank deficient, in which
    case the minimizer is not unique.
    """
    U, Ustar = _check_pair(U, Ustar)
    return _polar(U.T @ Ustar, strict=True)


def _aligned_residual(U, Ustar) -> np.ndarray:
    U, Ustar = _check_pair(U, Ustar)
    # Any polar factor minimizes the Procrustes objective, so a degenerate
    # cross-Gram (e.g. orthogonal subspaces) still yields a valid distance.
    R = _polar(U.T @ Ustar, strict=False)
    return U @ R - Ustar


def dist_spectral(U, Ustar) -> float:
    """Spectral-norm error ``||U R_U - Ustar||`` after Procrustes alignment."""
    return float(np.linalg.norm(_aligned_residual(U, Ustar), 2))


def dist_two_inf(U, Ustar) -> float:
    """Largest row norm of ``U R_U - Ustar`` after Procrustes alignment."""
    D = _aligned_residual(U, Ustar)
    return float(np.sqrt((D**2).sum(axis=1)).max())


def incoherence(U) -> float:
    """Incoherence ``(n / r) * max_i ||U[i, :]||^2`` of an orthonormal basis."""
    U = as_matrix(U, "U")
    n, r = U.shape
    return float(n / r * (U**2).sum(axis=1).max())


def projector(U) -> np.ndarray:
    """Orthogonal projector ``U U^T`` onto the column span of ``U``."""
    U = as_matrix(U, "U")
    return U @ U.T


def orthonormality_error(U) -> float:
    """``max |U^T U - I|`` entrywise."""
    U = as_matrix(U, "U")
    return float(np.abs(U.T @ U - np.eye(U.shape[1])).max())
