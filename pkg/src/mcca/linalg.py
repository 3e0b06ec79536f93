"""Dense symmetric eigendecomposition, truncated SVD, and PSD inverse square
root.

Thin deterministic wrappers around LAPACK (via numpy): results are sorted
descending and carry a fixed sign convention, so repeated runs and archived
models are comparable entry for entry.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericalError
from .validation import check_matrix, check_symmetric

# Default eigenvalue floor for inverse square roots.  Ridge terms added to
# covariance matrices normally dominate it by many orders of magnitude.
DEFAULT_EIG_FLOOR = 1e-10


@dataclass(frozen=True)
class SymEigResult:
    """Eigenvalues (descending) and orthonormal eigenvectors (as columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True)
class SvdResult:
    """Top-k singular triplets: ``a ~= u @ diag(s) @ v.T``."""

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray
    k: int


def _fix_signs(vectors, partners=None):
    """Make the largest-magnitude entry of each column positive.

    Ties pick the lowest index (``argmax`` on the absolute values).  When
    ``partners`` is given (right singular vectors), its columns are flipped
    together with ``vectors`` so the product u s v^T is preserved.
    """
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    vectors = vectors * signs
    if partners is None:
        return vectors
    return vectors, partners * signs


def sym_eig(a) -> SymEigResult:
    """Eigendecomposition of a symmetric matrix, eigenvalues descending."""
    a = check_symmetric(a, name="a")
    eigenvalues, eigenvectors = np.linalg.eigh(a)
    order = np.argsort(eigenvalues)[::-1]
    eigenvalues = np.ascontiguousarray(eigenvalues[order])
    eigenvectors = _fix_signs(np.ascontiguousarray(eigenvectors[:, order]))
    return SymEigResult(eigenvalues, eigenvectors)


def inv_sqrt_psd(a, eig_floor: float = DEFAULT_EIG_FLOOR) -> np.ndarray:
    """Inverse square root of a symmetric PSD matrix.

    Eigenvalues below ``eig_floor`` are clamped to it before the power, so
    rank-deficient inputs stay usable.  Eigenvalues more negative than the
    roundoff allowance are rejected.
    """
    res = sym_eig(a)
    lam = res.eigenvalues
    tol = 1e-8 * max(1.0, float(lam[0]) if lam.size else 1.0)
    if lam.size and lam[-1] < -tol:
        raise NumericalError(
            f"matrix is not positive semidefinite (min eigenvalue {lam[-1]:.3e})"
        )
    clamped = np.maximum(lam, eig_floor)
    q = res.eigenvectors
    b = (q * (1.0 / np.sqrt(clamped))) @ q.T
    return (b + b.T) / 2.0


def svd_truncated(a, k: int) -> SvdResult:
    """Top-``k`` singular triplets of a dense matrix."""
    a = check_matrix(a, name="a")
    if not 1 <= k <= min(a.shape):
        raise ConfigError(f"k must be in [1, {min(a.shape)}], got {k}")
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    u = np.ascontiguousarray(u[:, :k])
    s = np.ascontiguousarray(s[:k])
    v = np.ascontiguousarray(vt[:k].T)
    # Sign is decided by the left vector; the right vector follows so the
    # reconstruction is unchanged.
    u, v = _fix_signs(u, v)
    return SvdResult(u, s, v, k)
