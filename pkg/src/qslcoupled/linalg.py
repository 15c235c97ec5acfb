"""Complex matrix kernel shared by the operator, superoperator and
entanglement code.

Matrices are plain :class:`numpy.ndarray` objects or :mod:`scipy.sparse`
matrices; every routine accepts either.  Sparse storage is used for the
Liouvillian, dense storage for everything at Hilbert-space size.
"""

from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

__all__ = [
    "MAX_DIMENSION",
    "DENSE_LIMIT",
    "HERMITIAN_ATOL",
    "DimensionError",
    "NonHermitianError",
    "SingularMatrixError",
    "to_dense",
    "to_sparse",
    "kron",
    "hermiticity_error",
    "hermitian_eig",
    "solve",
    "trace_norm_hermitian",
]

#: Largest row/column count a Kronecker product may produce.
MAX_DIMENSION = 1 << 20

#: Below this row count superoperators are assembled densely.
DENSE_LIMIT = 256

HERMITIAN_ATOL = 1e-10


class DimensionError(ValueError):
    """Raised when a matrix shape is invalid or too large."""


class NonHermitianError(ValueError):
    """Raised when a Hermitian routine receives a non-Hermitian matrix."""

    def __init__(self, asymmetry: float, atol: float):
        self.asymmetry = asymmetry
        super().__init__(
            f"matrix is not Hermitian: max |h - h^dagger| = {asymmetry:.3e} "
            f"exceeds {atol:.1e}")


class SingularMatrixError(np.linalg.LinAlgError):
    """Raised when a linear system is numerically singular."""


def to_dense(m) -> np.ndarray:
    if sp.issparse(m):
        return m.toarray()
    return np.asarray(m)


def to_sparse(m, fmt: str = "csr"):
    if sp.issparse(m):
        return m.asformat(fmt)
    return sp.csr_matrix(np.asarray(m)).asformat(fmt)


def _check_matrix(m) -> tuple[int, int]:
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionError(f"expected a non-empty 2-d matrix, got shape {m.shape}")
    return m.shape


def kron(a, b):
    """Kronecker product; sparse if either factor is sparse.

    Block ``(i, j)`` of the result is ``a[i, j] * b``.
    """
    ra, ca = _check_matrix(a)
    rb, cb = _check_matrix(b)
    if ra * rb > MAX_DIMENSION or ca * cb > MAX_DIMENSION:
        raise DimensionError(
            f"kron result {ra * rb}x{ca * cb} exceeds MAX_DIMENSION={MAX_DIMENSION}")
    if sp.issparse(a) or sp.issparse(b):
        return sp.kron(a, b, format="csr")
    return np.kron(a, b)


def hermiticity_error(h) -> float:
    """Largest entry of ``|h - h^dagger|``."""
    d = h - h.conj().T
    if sp.issparse(d):
        return float(abs(d).max()) if d.nnz else 0.0
    return float(np.max(np.abs(d))) if d.size else 0.0


def hermitian_eig(h, atol: float = HERMITIAN_ATOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns
    -------
    eigenvalues : ndarray
        Real, ascending.
    eigenvectors : ndarray
        Orthonormal columns, ``h @ v[:, k] == w[k] * v[:, k]``.

    Raises
    ------
    NonHermitianError
        If ``max |h - h^dagger| > atol``.
    """
    _check_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise DimensionError(f"square matrix required, got {h.shape}")
    err = hermiticity_error(h)
    if err > atol:
        raise NonHermitianError(err, atol)
    return np.linalg.eigh(to_dense(h))


def solve(a, b, pivot_rtol: float = 1e-14) -> np.ndarray:
    """Solve ``a @ x = b`` by LU factorisation.

    Dense inputs use LAPACK with partial pivoting; sparse inputs use SuperLU.
    A pivot smaller than ``pivot_rtol * ||a||`` is reported as singular.
    """
    rows, cols = _check_matrix(a)
    b = np.asarray(b)
    if rows != cols:
        raise DimensionError(f"square matrix required, got {a.shape}")
    if b.shape[0] != rows:
        raise DimensionError(f"rhs length {b.shape[0]} does not match {rows}")

    if sp.issparse(a):
        norm = spla.norm(a, 1)
        try:
            lu = spla.splu(sp.csc_matrix(a))
        except RuntimeError as exc:
            raise SingularMatrixError(str(exc)) from exc
        pivots = np.abs(lu.U.diagonal())
        if pivots.min() <= pivot_rtol * norm:
            raise SingularMatrixError(
                f"pivot {pivots.min():.3e} below {pivot_rtol:.0e} * ||a||")
        return lu.solve(b.astype(np.result_type(a.dtype, b.dtype)))

    a = np.asarray(a)
    norm = np.linalg.norm(a, 1)
    with warnings.catch_warnings():
        # exact zero pivots are reported below as SingularMatrixError
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(a, check_finite=True)
    pivots = np.abs(np.diag(lu))
    if norm == 0 or pivots.min() <= pivot_rtol * norm:
        raise SingularMatrixError(
            f"pivot {pivots.min():.3e} below {pivot_rtol:.0e} * ||a||")
    return sla.lu_solve((lu, piv), b)


def trace_norm_hermitian(m, atol: float = HERMITIAN_ATOL) -> float:
    """Trace norm ``Tr sqrt(m^dagger m)`` of a Hermitian matrix, i.e. the sum
    of absolute eigenvalues."""
    w, _ = hermitian_eig(m, atol=atol)
    return float(np.sum(np.abs(w)))
