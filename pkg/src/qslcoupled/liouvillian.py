"""Lindblad generator of two attractive-repulsively coupled quantum
Stuart-Landau oscillators, its steady state and its time evolution.

Vectorisation is column stacking, ``vec(rho)[i + d*j] = rho[i, j]``, so that
``vec(A rho B) = (B^T (x) A) vec(rho)`` and the generator reads::

    L = -i (I (x) H - H^T (x) I)
        + sum_c [ conj(c) (x) c - 1/2 (I (x) c^dag c + (c^dag c)^T (x) I) ]

with collapse operators ``sqrt(k1) a_j^dag`` and ``sqrt(k2) a_j^2``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.sparse.csgraph import connected_components

from . import linalg
from .fock import FockSpace, annihilation, creation, embed
from .params import SystemParams

logger = logging.getLogger(__name__)

__all__ = [
    "MAX_HILBERT_DIM",
    "DIRECT_SOLVE_LIMIT",
    "MemoryBudgetError",
    "SteadyStateError",
    "StabilityError",
    "Superoperator",
    "Trajectory",
    "vec",
    "unvec",
    "build_hamiltonian",
    "collapse_operators",
    "liouvillian_from",
    "build_liouvillian",
    "apply",
    "validate_density_matrix",
    "steady_state",
    "steady_state_for",
    "steady_state_converged",
    "spectral_gap",
    "evolve",
]

#: Largest two-site Hilbert dimension (``n_max**2``) a Liouvillian is built for.
MAX_HILBERT_DIM = 1024

#: Reduced systems up to this size are factorised exactly; larger ones use
#: ILU-preconditioned GMRES.
DIRECT_SOLVE_LIMIT = 4096


class MemoryBudgetError(MemoryError):
    pass


class SteadyStateError(RuntimeError):
    """The steady state could not be determined uniquely or accurately."""


class StabilityError(ValueError):
    def __init__(self, dt: float, dt_max: float):
        self.dt = dt
        self.dt_max = dt_max
        super().__init__(
            f"dt={dt:.3e} exceeds the RK4 stability bound 0.5/||L||_inf = "
            f"{dt_max:.3e}; use dt <= {dt_max:.3e}")


@dataclass(frozen=True)
class Superoperator:
    """Linear map on column-stacked ``d x d`` matrices."""

    matrix: sp.csr_matrix
    hilbert_dim: int

    @property
    def shape(self):
        return self.matrix.shape

    def trace_row(self) -> np.ndarray:
        """``vec(I)``, the row that annihilates a trace-preserving map."""
        t = np.zeros(self.hilbert_dim ** 2, dtype=complex)
        t[:: self.hilbert_dim + 1] = 1.0
        return t


class Trajectory(NamedTuple):
    times: np.ndarray
    states: np.ndarray


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int | None = None) -> np.ndarray:
    if dim is None:
        dim = int(round(np.sqrt(v.size)))
    return np.asarray(v).reshape(dim, dim, order="F")


def build_hamiltonian(p: SystemParams, space: FockSpace, sparse: bool = True):
    """Kerr oscillators plus the coupling-induced Hamiltonian.

    ``H = w(a1'a1 + a2'a2) + K/2 (a1'^2 a1^2 + a2'^2 a2^2)
          - i eps (a1' a2' - a1 a2) + i eps/2 (a1'^2 + a2'^2 - a1^2 - a2^2)``
    where ``'`` denotes the adjoint.
    """
    a = annihilation(space)
    ad = creation(space)
    a1, a2 = embed(a, 1, space), embed(a, 2, space)
    d1, d2 = embed(ad, 1, space), embed(ad, 2, space)
    eps = p.epsilon

    h0 = p.omega * (d1 @ a1 + d2 @ a2) + 0.5 * p.kerr * (
        d1 @ d1 @ a1 @ a1 + d2 @ d2 @ a2 @ a2)
    hc = -1j * eps * (d1 @ d2 - a1 @ a2) + 0.5j * eps * (
        d1 @ d1 + d2 @ d2 - a1 @ a1 - a2 @ a2)
    h = (h0 + hc).tocsr()
    h.eliminate_zeros()
    return h if sparse else h.toarray()


def collapse_operators(p: SystemParams, space: FockSpace) -> list:
    """One-phonon gain on each site, then two-phonon loss on each site."""
    a = annihilation(space)
    ad = creation(space)
    aa = (a @ a).tocsr()
    return [
        np.sqrt(p.k1) * embed(ad, 1, space),
        np.sqrt(p.k1) * embed(ad, 2, space),
        np.sqrt(p.k2) * embed(aa, 1, space),
        np.sqrt(p.k2) * embed(aa, 2, space),
    ]


def liouvillian_from(h, c_ops: Sequence = ()) -> Superoperator:
    """Column-stacked Lindblad generator for an arbitrary Hamiltonian and
    collapse operators."""
    h = sp.csr_matrix(h, dtype=complex)
    d = h.shape[0]
    eye = sp.identity(d, dtype=complex, format="csr")
    L = -1j * (linalg.kron(eye, h) - linalg.kron(h.T, eye))
    for c in c_ops:
        c = sp.csr_matrix(c, dtype=complex)
        cdc = (c.conj().T @ c).tocsr()
        L = L + linalg.kron(c.conj(), c) - 0.5 * (
            linalg.kron(eye, cdc) + linalg.kron(cdc.T, eye))
    L = sp.csr_matrix(L)
    L.eliminate_zeros()
    return Superoperator(L, d)


def build_liouvillian(p: SystemParams, space: FockSpace,
                      max_hilbert_dim: int = MAX_HILBERT_DIM) -> Superoperator:
    if space.dim > max_hilbert_dim:
        raise MemoryBudgetError(
            f"Hilbert dimension {space.dim} (superoperator {space.dim ** 2}^2) "
            f"exceeds budget {max_hilbert_dim}")
    return liouvillian_from(build_hamiltonian(p, space), collapse_operators(p, space))


def apply(l: Superoperator, rho: np.ndarray) -> np.ndarray:
    """``unvec(L vec(rho))``, the time derivative at ``rho``."""
    rho = np.asarray(rho)
    if rho.shape != (l.hilbert_dim, l.hilbert_dim):
        raise ValueError(
            f"rho has shape {rho.shape}, generator acts on "
            f"{l.hilbert_dim}x{l.hilbert_dim}")
    return unvec(l.matrix @ vec(rho), l.hilbert_dim)


def validate_density_matrix(rho: np.ndarray, atol: float = 1e-8) -> None:
    """Raise ``ValueError`` unless ``rho`` is Hermitian, unit-trace and
    positive semidefinite within ``atol``."""
    herm = linalg.hermiticity_error(rho)
    if herm > atol:
        raise ValueError(f"density matrix not Hermitian (asymmetry {herm:.2e})")
    tr = np.trace(rho)
    if abs(tr - 1) > atol:
        raise ValueError(f"density matrix trace {tr} differs from 1")
    wmin = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]
    if wmin < -atol:
        raise ValueError(f"density matrix has negative eigenvalue {wmin:.2e}")


def _population_sector(l: Superoperator) -> np.ndarray:
    # Indices of the coupling-graph components that contain diagonal entries;
    # a unique steady state has no weight elsewhere.
    pattern = abs(l.matrix)
    pattern = pattern + pattern.T
    _, labels = connected_components(pattern, directed=False)
    diag = np.arange(l.hilbert_dim) * (l.hilbert_dim + 1)
    keep = np.isin(labels, np.unique(labels[diag]))
    return np.flatnonzero(keep)


def steady_state(l: Superoperator, method: str = "auto", tol: float = 1e-8,
                 drop_tol: float = 1e-4, fill_factor: float = 10.0) -> np.ndarray:
    """Solve ``L rho = 0`` with ``Tr rho = 1``.

    The system is restricted to the block of the generator that couples to
    the populations, one row is replaced by the trace condition and the
    result is solved either by sparse LU (``method='direct'``) or by GMRES
    with an incomplete-LU preconditioner (``method='iterative'``).

    Raises
    ------
    SteadyStateError
        If the reduced system is singular (more than one null direction) or
        the residual ``||L vec(rho)||`` exceeds ``tol``.
    """
    d = l.hilbert_dim
    idx = _population_sector(l)
    A = l.matrix[idx][:, idx].tocsr()
    m = idx.size
    trace_row = (idx % (d + 1) == 0).astype(complex)
    first = int(np.flatnonzero(trace_row)[0])
    A = sp.vstack([A[:first], sp.csr_matrix(trace_row), A[first + 1:]]).tocsc()
    b = np.zeros(m, dtype=complex)
    b[first] = 1.0

    if method == "auto":
        method = "direct" if m <= DIRECT_SOLVE_LIMIT else "iterative"
    if method == "direct":
        try:
            x = linalg.solve(A.toarray() if m < linalg.DENSE_LIMIT else A, b)
        except linalg.SingularMatrixError as exc:
            raise SteadyStateError(
                f"steady state not unique: {exc}; fall back to long-time evolve()"
            ) from exc
    elif method == "iterative":
        ilu = spla.spilu(A, drop_tol=drop_tol, fill_factor=fill_factor,
                         permc_spec="MMD_AT_PLUS_A")
        precond = spla.LinearOperator(A.shape, ilu.solve, dtype=complex)
        x, info = spla.gmres(A, b, M=precond, rtol=1e-13, atol=0.0,
                             restart=100, maxiter=50)
        if info != 0:
            logger.warning("GMRES returned info=%d", info)
    else:
        raise ValueError(f"unknown method {method!r}")

    full = np.zeros(d * d, dtype=complex)
    full[idx] = x
    rho = unvec(full, d)
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.trace(rho).real
    resid = np.linalg.norm(l.matrix @ vec(rho))
    if not np.isfinite(resid) or resid > tol:
        raise SteadyStateError(f"steady-state residual {resid:.2e} exceeds {tol:.0e}")
    return rho


def steady_state_for(p: SystemParams, n_max: int, **kwargs) -> np.ndarray:
    """Convenience wrapper: build the generator and solve its steady state."""
    space = FockSpace(n_max)
    return steady_state(build_liouvillian(p, space), **kwargs)


def steady_state_converged(p: SystemParams, observable: Callable[[np.ndarray], float],
                           n_max: int, step: int = 4, rtol: float = 1e-3,
                           n_limit: int = 24):
    """Raise the truncation until ``observable`` changes by less than ``rtol``.

    Returns ``(rho, value, n_used)`` where ``rho`` is the steady state at the
    accepted truncation ``n_used``.
    """
    rho = steady_state_for(p, n_max)
    value = observable(rho)
    while n_max + step <= n_limit:
        rho_next = steady_state_for(p, n_max + step)
        value_next = observable(rho_next)
        change = abs(value_next - value) / max(abs(value_next), 1e-300)
        logger.info("n_max %d -> %d: relative change %.2e", n_max, n_max + step, change)
        if change < rtol:
            return rho, value, n_max
        n_max, rho, value = n_max + step, rho_next, value_next
    raise SteadyStateError(
        f"observable not converged to rtol={rtol} below n_limit={n_limit}")


def spectral_gap(l: Superoperator) -> tuple[float, float]:
    """Two smallest singular values of the generator (dense; small systems).

    A unique steady state shows up as one (numerically) zero singular value
    and a second one bounded away from zero.
    """
    if l.shape[0] > 4096:
        raise MemoryBudgetError("spectral_gap is dense; use n_max <= 8")
    s = np.linalg.svd(l.matrix.toarray(), compute_uv=False)
    return float(s[-1]), float(s[-2])


def evolve(rho0: np.ndarray, l: Superoperator, t_final: float, dt: float,
           save_every: int | None = None) -> Trajectory:
    """Fixed-step classical RK4 integration of ``d vec(rho)/dt = L vec(rho)``.

    ``dt`` must satisfy ``dt <= 0.5 / ||L||_inf``.  States are stored every
    ``save_every`` steps (default: initial and final state only).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t_final < 0:
        raise ValueError("t_final must be non-negative")
    M = l.matrix
    norm_inf = spla.norm(M, np.inf) if M.nnz else 0.0
    if norm_inf > 0 and dt > 0.5 / norm_inf:
        raise StabilityError(dt, 0.5 / norm_inf)

    n_steps = int(np.ceil(t_final / dt - 1e-12))
    h = t_final / n_steps if n_steps else 0.0
    stride = save_every or max(n_steps, 1)
    v = vec(np.array(rho0, dtype=complex))
    times, states = [0.0], [unvec(v.copy(), l.hilbert_dim)]
    for k in range(1, n_steps + 1):
        k1 = M @ v
        k2 = M @ (v + 0.5 * h * k1)
        k3 = M @ (v + 0.5 * h * k2)
        k4 = M @ (v + h * k3)
        v = v + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if k % stride == 0 or k == n_steps:
            times.append(k * h)
            states.append(unvec(v.copy(), l.hilbert_dim))
    return Trajectory(np.array(times), np.array(states))
