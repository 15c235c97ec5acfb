"""Expectation values, Fock distributions and entanglement measures of
two-site density matrices (site 1 is the slow basis index)."""

from __future__ import annotations

import math

import numpy as np

from .linalg import trace_norm_hermitian

__all__ = [
    "site_dim",
    "expect",
    "mean_phonon",
    "fock_distribution",
    "partial_trace",
    "partial_transpose",
    "negativity",
    "renyi2",
    "purity",
]


def site_dim(rho: np.ndarray) -> int:
    d = rho.shape[0]
    n = math.isqrt(d)
    if n * n != d or rho.shape != (d, d):
        raise ValueError(f"{rho.shape} is not a two-site density matrix")
    return n


def expect(rho: np.ndarray, op) -> complex:
    """``Tr(rho op)``."""
    return complex(np.sum(np.asarray(rho).T * (op.toarray() if hasattr(op, "toarray") else op)))


def _check_site(site: int) -> None:
    if site not in (1, 2):
        raise ValueError(f"site must be 1 or 2, got {site}")


def partial_trace(rho: np.ndarray, keep: int) -> np.ndarray:
    """Reduced single-site density matrix of site ``keep``."""
    _check_site(keep)
    n = site_dim(rho)
    r = np.asarray(rho).reshape(n, n, n, n)
    if keep == 1:
        return np.einsum("ikjk->ij", r)
    return np.einsum("kikj->ij", r)


def mean_phonon(rho: np.ndarray, site: int) -> float:
    """``<a_site^dag a_site>``."""
    p = fock_distribution(rho, site)
    return float(np.dot(np.arange(p.size), p))


def fock_distribution(rho: np.ndarray, site: int) -> np.ndarray:
    """Occupation probabilities ``p_n = <n| Tr_other(rho) |n>``."""
    return np.real(np.diagonal(partial_trace(rho, site))).copy()


def partial_transpose(rho: np.ndarray, site: int = 1) -> np.ndarray:
    """Transpose the indices of one site:
    ``<m1 n2| rho^T1 |m1' n2'> = <m1' n2| rho |m1 n2'>``."""
    _check_site(site)
    n = site_dim(rho)
    r = np.asarray(rho).reshape(n, n, n, n)
    axes = (2, 1, 0, 3) if site == 1 else (0, 3, 2, 1)
    return r.transpose(axes).reshape(n * n, n * n)


def negativity(rho: np.ndarray) -> float:
    """``(||rho^T1||_1 - 1) / 2``; zero for separable states."""
    pt = partial_transpose(rho, 1)
    pt = 0.5 * (pt + pt.conj().T)
    return 0.5 * (trace_norm_hermitian(pt) - 1.0)


def purity(rho: np.ndarray) -> float:
    rho = np.asarray(rho)
    return float(np.real(np.vdot(rho.conj().T, rho)))


def renyi2(rho_reduced: np.ndarray) -> float:
    """Second-order Renyi entropy ``-ln Tr(rho^2)`` (natural log)."""
    p = purity(rho_reduced)
    if not p > 0:
        raise ValueError(f"Tr(rho^2) = {p} is not positive")
    return -math.log(p)
