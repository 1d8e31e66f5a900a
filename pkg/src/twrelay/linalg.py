"""Minimal complex linear-algebra kernel used by every other module.

All log-determinants are base 2 (rates in bits) and go through Hermitian
eigendecompositions, so a loss of positive definiteness surfaces as an
explicit error instead of a silent NaN.  Matrices are symmetrized as
(A + A*)/2 before any decomposition; asymmetry beyond ``HERMITIAN_ATOL``
is rejected.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import NotHermitian, NotPositiveDefinite

# Absolute tolerance on max |A - A*| entry before a matrix is rejected.
HERMITIAN_ATOL = 1e-10
# Eigenvalues at or below this are treated as a PD failure.
EIGENVALUE_FLOOR = 1e-12


def _as_hermitian(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    """Validate Hermitian symmetry within tolerance and return (A + A*)/2."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotHermitian(f"{name} must be square, got shape {a.shape}")
    asym = float(np.max(np.abs(a - a.conj().T)))
    if asym > HERMITIAN_ATOL:
        raise NotHermitian(
            f"{name} asymmetry {asym:.3e} exceeds tolerance {HERMITIAN_ATOL:.0e}"
        )
    return 0.5 * (a + a.conj().T)


def hermitian_logdet2(a: np.ndarray) -> float:
    """log2 det(A) for a Hermitian positive-definite matrix A.

    Raises
    ------
    NotHermitian
        If the asymmetry of ``a`` exceeds the module tolerance.
    NotPositiveDefinite
        If any eigenvalue is <= 1e-12.
    """
    sym = _as_hermitian(a)
    eigs = np.linalg.eigvalsh(sym)
    if eigs[0] <= EIGENVALUE_FLOOR:
        raise NotPositiveDefinite(
            f"smallest eigenvalue {eigs[0]:.3e} <= {EIGENVALUE_FLOOR:.0e}"
        )
    return float(np.sum(np.log2(eigs)))


def hermitian_eigvals(a: np.ndarray) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, sorted descending."""
    sym = _as_hermitian(a)
    return np.linalg.eigvalsh(sym)[::-1].copy()


def least_singular_direction(m: np.ndarray) -> tuple[np.ndarray, float]:
    """Unit vector v minimizing ||M v|| for a square matrix M.

    Returns ``(v, residual)`` where ``residual = ||M v||`` equals the
    smallest singular value.  The phase of ``v`` is whatever the SVD
    returns; callers needing a canonical phase must normalize themselves.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    _, s, vh = np.linalg.svd(m)
    v = vh[-1].conj()
    return v, float(s[-1])


def solve_hermitian(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve A X = B for Hermitian positive-definite A via Cholesky."""
    sym = _as_hermitian(a)
    b = np.asarray(b, dtype=complex)
    try:
        factor = scipy.linalg.cho_factor(sym, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"Cholesky factorization failed: {exc}") from exc
    return scipy.linalg.cho_solve(factor, b)
