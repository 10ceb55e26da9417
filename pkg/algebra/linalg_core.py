"""
Complex Dense Linear Algebra for Space-Time Code Certification

This module wraps the numpy.linalg routines the toolkit relies on and adds
the shape / finiteness checks every caller would otherwise repeat:
- Matrix products and Kronecker (tensor) products
- Determinants (LU with partial pivoting, plus a cofactor-expansion oracle)
- Adjugate (cofactor) matrices, valid for singular inputs too
- SVD-based numerical rank and singular value spectra
- Unitarity checks

Every function accepts a single matrix or a stack of matrices (leading batch
axes) unless noted, so certification sweeps can stay vectorized.
"""

import logging
import sys
from itertools import permutations
from pathlib import Path
from typing import Union

import numpy as np

# Add project root to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from config.config import LOG_FORMAT, LOG_LEVEL, RANK_TOL, UNITARY_TOL

# Configure logging
logging.basicConfig(level=LOG_LEVEL, format=LOG_FORMAT)
logger = logging.getLogger(__name__)

# Dense complex matrix (or stack of matrices), complex128
ComplexMatrix = np.ndarray
Complex = Union[complex, np.ndarray]


# =============================================================================
# CONSTRUCTION / VALIDATION
# =============================================================================

def as_complex_matrix(a) -> ComplexMatrix:
    """
    Convert input to a complex128 array of at least two dimensions.

    Raises:
        ValueError: if the input is not a matrix or holds NaN/Inf entries
    """
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim < 2:
        raise ValueError(f"Expected a matrix, got array with shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("Matrix has non-finite entries")
    return arr


def _require_square(a: ComplexMatrix, op: str):
    if a.shape[-1] != a.shape[-2]:
        raise ValueError(f"{op} needs a square matrix, got {a.shape[-2]}x{a.shape[-1]}")


def dagger(a: ComplexMatrix) -> ComplexMatrix:
    """Conjugate transpose over the last two axes."""
    return np.conj(np.swapaxes(a, -1, -2))


# =============================================================================
# PRODUCTS
# =============================================================================

def matmul(a, b) -> ComplexMatrix:
    """
    Standard matrix product a @ b.

    Raises:
        ValueError: on inner dimension mismatch
    """
    a = as_complex_matrix(a)
    b = as_complex_matrix(b)
    if a.shape[-1] != b.shape[-2]:
        raise ValueError(
            f"Dimension mismatch: {a.shape[-2]}x{a.shape[-1]} times {b.shape[-2]}x{b.shape[-1]}"
        )
    return a @ b


def kron(a, b) -> ComplexMatrix:
    """Kronecker product; block (i, j) of the result is a[i, j] * b."""
    return np.kron(as_complex_matrix(a), as_complex_matrix(b))


# =============================================================================
# DETERMINANTS AND COFACTORS
# =============================================================================

def det(a) -> Complex:
    """
    Complex determinant via LU factorization with partial pivoting.

    Raises:
        ValueError: for non-square input
    """
    a = as_complex_matrix(a)
    _require_square(a, "det")
    return np.linalg.det(a)


def _permutation_sign(perm) -> int:
    sign = 1
    seen = list(perm)
    for i in range(len(seen)):
        while seen[i] != i:
            j = seen[i]
            seen[i], seen[j] = seen[j], seen[i]
            sign = -sign
    return sign


def cofactor_det(a) -> Complex:
    """
    Determinant by full permutation (Leibniz / cofactor) expansion.

    Only meant as an independent oracle for small matrices (n <= 4).
    """
    a = as_complex_matrix(a)
    _require_square(a, "cofactor_det")
    n = a.shape[-1]
    if n > 4:
        raise ValueError(f"cofactor_det is limited to n <= 4, got n={n}")
    total = np.zeros(a.shape[:-2], dtype=np.complex128)
    rows = np.arange(n)
    for perm in permutations(range(n)):
        total = total + _permutation_sign(perm) * np.prod(a[..., rows, list(perm)], axis=-1)
    return total[()] if total.ndim == 0 else total


def adjugate(a) -> ComplexMatrix:
    """
    Adjugate (transposed cofactor matrix) built from signed minors.

    Works on singular matrices, where det(a) * inv(a) is undefined.
    """
    a = as_complex_matrix(a)
    _require_square(a, "adjugate")
    n = a.shape[-1]
    adj = np.empty_like(a)
    if n == 1:
        adj[..., 0, 0] = 1.0
        return adj
    for i in range(n):
        keep_rows = [r for r in range(n) if r != i]
        for j in range(n):
            keep_cols = [c for c in range(n) if c != j]
            minor = a[..., keep_rows, :][..., :, keep_cols]
            adj[..., j, i] = (-1) ** (i + j) * np.linalg.det(minor)
    return adj


# =============================================================================
# RANK / SPECTRUM
# =============================================================================

def singular_values(a) -> np.ndarray:
    """Singular values in descending order (last axis)."""
    return np.linalg.svd(as_complex_matrix(a), compute_uv=False)


def numerical_rank(a, tol: float = RANK_TOL):
    """
    Number of singular values larger than tol * sigma_max.

    The rank of an all-zero matrix is 0.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    s = singular_values(a)
    s_max = s[..., :1]
    rank = np.sum((s > tol * s_max) & (s_max > 0), axis=-1)
    return int(rank) if np.ndim(rank) == 0 else rank


def is_unitary(a, tol: float = UNITARY_TOL) -> bool:
    """True iff max |A A^H - I| <= tol."""
    a = as_complex_matrix(a)
    _require_square(a, "is_unitary")
    residual = a @ dagger(a) - np.eye(a.shape[-1])
    return bool(np.max(np.abs(residual)) <= tol)
