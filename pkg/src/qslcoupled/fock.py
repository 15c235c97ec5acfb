"""Truncated Fock space of two bosonic modes.

Basis ordering is ``|n1> (x) |n2>`` with site 1 the slow index, so the flat
index of ``|n1, n2>`` is ``n1 * n_max + n2``.  Partial traces and partial
transposes in :mod:`qslcoupled.observables` rely on this ordering.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .linalg import kron

__all__ = [
    "FockSpace",
    "annihilation",
    "creation",
    "number",
    "embed",
    "basis_state",
    "coherent_state",
]


@dataclass(frozen=True)
class FockSpace:
    """Levels ``0 .. n_max-1`` per oscillator, two oscillators."""

    n_max: int
    n_sites: int = 2

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 2:
            raise ValueError(f"n_max must be an integer >= 2, got {self.n_max}")
        if self.n_sites != 2:
            raise ValueError("only two-site spaces are supported")

    @property
    def dim(self) -> int:
        return self.n_max ** self.n_sites

    def index(self, n1: int, n2: int) -> int:
        return n1 * self.n_max + n2

    def identity(self, sparse: bool = True):
        if sparse:
            return sp.identity(self.n_max, dtype=complex, format="csr")
        return np.eye(self.n_max, dtype=complex)


def annihilation(space: FockSpace, sparse: bool = True):
    """Single-site lowering operator, ``a[k-1, k] = sqrt(k)``."""
    off = np.sqrt(np.arange(1, space.n_max, dtype=float)).astype(complex)
    a = sp.diags(off, 1, shape=(space.n_max, space.n_max), format="csr")
    return a if sparse else a.toarray()


def creation(space: FockSpace, sparse: bool = True):
    a = annihilation(space, sparse=sparse)
    return a.conj().T.tocsr() if sparse else a.conj().T


def number(space: FockSpace, sparse: bool = True):
    n = sp.diags(np.arange(space.n_max, dtype=complex), 0, format="csr")
    return n if sparse else n.toarray()


def embed(op, site: int, space: FockSpace):
    """Lift a single-site operator onto the two-site space.

    ``site=1`` gives ``op (x) I``, ``site=2`` gives ``I (x) op``.
    """
    if op.shape != (space.n_max, space.n_max):
        raise ValueError(
            f"operator shape {op.shape} does not match n_max={space.n_max}")
    eye = space.identity(sparse=sp.issparse(op))
    if site == 1:
        return kron(op, eye)
    if site == 2:
        return kron(eye, op)
    raise ValueError(f"site must be 1 or 2, got {site}")


def basis_state(space: FockSpace, n1: int, n2: int) -> np.ndarray:
    """Ket ``|n1, n2>`` as a dense vector."""
    if not (0 <= n1 < space.n_max and 0 <= n2 < space.n_max):
        raise ValueError(f"|{n1},{n2}> outside truncation n_max={space.n_max}")
    psi = np.zeros(space.dim, dtype=complex)
    psi[space.index(n1, n2)] = 1.0
    return psi


def coherent_state(n_max: int, beta: complex) -> np.ndarray:
    """Truncated single-site coherent ket, renormalised after truncation."""
    n = np.arange(n_max)
    log_fact = np.cumsum(np.log(np.maximum(n, 1)))
    amp = np.exp(-0.5 * abs(beta) ** 2 - 0.5 * log_fact) * np.power(
        complex(beta), n)
    return amp / np.linalg.norm(amp)
