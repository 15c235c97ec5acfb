"""Noisy classical model: Euler-Maruyama integration of the Fokker-Planck
reduction of the master equation in the weak quantum regime.

The drift is the classical vector field with every ``r_j^2`` shifted to
``r_j^2 - 1``; the diffusion matrix is ``diag(nu1, nu1, nu2, nu2) / 2`` with
``nu_j = k1/2 + k2 (2 r_j^2 - 1)`` and the noise amplitude is its square root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .params import SystemParams

__all__ = [
    "RegimeError",
    "DivergenceError",
    "SdeConfig",
    "EnsembleResult",
    "drift",
    "nu",
    "diffusion",
    "diffusion_matrix",
    "trajectory_rng",
    "simulate",
    "simulate_ensemble",
    "ensemble_amplitude",
    "fokker_planck_rhs",
]

#: Normal deviates are drawn in blocks of this many steps per trajectory, so
#: a trajectory's noise is identical whether run alone or in an ensemble.
CHUNK = 4096


class RegimeError(ValueError):
    """Diffusion coefficient went negative: the model is outside the weak
    quantum regime (k1 > k2) it was derived for."""


class DivergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class SdeConfig:
    """Discretisation of the SDE.

    Defaults follow ``dt = 1e-3/k1``, ``t_final = 500/k1`` and 200
    trajectories for ``k1 = 1``.
    """

    dt: float = 1e-3
    n_steps: int = 500_000
    n_trajectories: int = 200
    transient_fraction: float = 0.5
    base_seed: int = 0
    record_every: int = 100

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.n_steps < 1 or self.n_trajectories < 1 or self.record_every < 1:
            raise ValueError("n_steps, n_trajectories and record_every must be >= 1")
        if not 0 <= self.transient_fraction < 1:
            raise ValueError("transient_fraction must lie in [0, 1)")

    def validate_for(self, p: SystemParams) -> None:
        if self.dt * p.k1 > 1e-2:
            raise ValueError(f"dt*k1 = {self.dt * p.k1:g} exceeds 1e-2")

    @property
    def t_final(self) -> float:
        return self.dt * self.n_steps


class EnsembleResult(NamedTuple):
    mean: float
    std_err: float
    per_trajectory: np.ndarray


def drift(s, p: SystemParams) -> np.ndarray:
    """Drift vector; accepts ``(4,)`` or ``(m, 4)``."""
    s = np.asarray(s, dtype=float)
    x1, y1, x2, y2 = s[..., 0], s[..., 1], s[..., 2], s[..., 3]
    w, kh, k2, K, e = p.omega, 0.5 * p.k1, p.k2, p.kerr, p.epsilon
    u1 = x1 * x1 + y1 * y1 - 1.0
    u2 = x2 * x2 + y2 * y2 - 1.0
    return np.stack([
        (w + K * u1) * y1 + (kh - k2 * u1 + e) * x1 - e * x2,
        (-w - K * u1) * x1 + (kh - k2 * u1 - e) * y1 + e * y2,
        (w + K * u2) * y2 + (kh - k2 * u2 + e) * x2 - e * x1,
        (-w - K * u2) * x2 + (kh - k2 * u2 - e) * y2 + e * y1,
    ], axis=-1)


def nu(s, p: SystemParams) -> np.ndarray:
    """``(nu1, nu2)`` at ``s``; shape ``(..., 2)``."""
    s = np.asarray(s, dtype=float)
    r1 = s[..., 0] ** 2 + s[..., 1] ** 2
    r2 = s[..., 2] ** 2 + s[..., 3] ** 2
    return np.stack([0.5 * p.k1 + p.k2 * (2 * r1 - 1),
                     0.5 * p.k1 + p.k2 * (2 * r2 - 1)], axis=-1)


def diffusion(s, p: SystemParams) -> np.ndarray:
    """Diagonal noise amplitudes ``sqrt(nu_j / 2)`` for ``(x1, y1, x2, y2)``.

    Raises
    ------
    RegimeError
        If any ``nu_j < 0``.  At the origin ``nu = k1/2 - k2``, which is
        negative in the deep quantum regime.
    """
    v = nu(s, p)
    if np.any(v < 0):
        raise RegimeError(
            f"negative diffusion nu={v.min():.4g} (k1={p.k1}, k2={p.k2}); the noisy "
            "classical model only holds in the weak quantum regime k1 > k2")
    amp = np.sqrt(0.5 * v)
    return np.repeat(amp, 2, axis=-1)


def diffusion_matrix(s, p: SystemParams) -> np.ndarray:
    """The 4x4 diffusion matrix ``D = diag(nu1, nu1, nu2, nu2) / 2``."""
    v = nu(s, p)
    return 0.5 * np.diag(np.repeat(v, 2))


def trajectory_rng(base_seed: int, index: int) -> np.random.Generator:
    """Counter-based Philox stream keyed by ``(base_seed, index)``."""
    ss = np.random.SeedSequence(entropy=int(base_seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(ss))


def simulate_ensemble(p: SystemParams, cfg: SdeConfig, initial,
                      indices: Sequence[int] | None = None, noise: bool = True):
    """Euler-Maruyama for several trajectories at once.

    ``X_{n+1} = X_n + mu(X_n) dt + sigma(X_n) sqrt(dt) xi_n`` with ``xi_n``
    from :func:`trajectory_rng`.  ``initial`` is ``(4,)`` (shared) or
    ``(m, 4)``.  ``noise=False`` zeroes ``sigma`` and gives plain Euler
    integration of the drift.

    Returns
    -------
    times : ndarray, shape ``(k,)``
    states : ndarray, shape ``(k, m, 4)``
        Recorded every ``cfg.record_every`` steps, starting with the initial
        state.
    """
    if noise and p.regime != "weak":
        raise RegimeError(
            f"k1={p.k1} <= k2={p.k2}: the noisy classical model only holds in the "
            "weak quantum regime k1 > k2")
    if indices is None:
        indices = range(cfg.n_trajectories)
    indices = list(indices)
    m = len(indices)
    X = np.array(np.broadcast_to(np.asarray(initial, dtype=float), (m, 4)))
    rngs = [trajectory_rng(cfg.base_seed, i) for i in indices]
    dt = cfg.dt
    sq = math.sqrt(dt)

    times = [0.0]
    states = [X.copy()]
    step = 0
    while step < cfg.n_steps:
        block = min(CHUNK, cfg.n_steps - step)
        if noise:
            xi = np.stack([g.standard_normal((CHUNK, 4))[:block] for g in rngs], axis=1)
        for k in range(block):
            dX = drift(X, p) * dt
            if noise:
                dX += diffusion(X, p) * sq * xi[k]
            X = X + dX
            step += 1
            if step % cfg.record_every == 0:
                if not np.all(np.abs(X) < 1e6):
                    raise DivergenceError(f"trajectory left |X| < 1e6 at t={step * dt:g}")
                times.append(step * dt)
                states.append(X.copy())
    return np.array(times), np.array(states)


def simulate(p: SystemParams, cfg: SdeConfig, initial, index: int = 0,
             noise: bool = True):
    """Single trajectory ``index``; returns ``(times, states)`` with states of
    shape ``(k, 4)``.  Bitwise reproducible for a fixed ``(cfg, index)``."""
    t, X = simulate_ensemble(p, cfg, initial, indices=[index], noise=noise)
    return t, X[:, 0, :]


def default_initial(p: SystemParams) -> np.ndarray:
    """Anti-phase point on the uncoupled noisy limit cycle ``r^2 = k1/(2k2) + 1``."""
    r = math.sqrt(p.k1 / (2 * p.k2) + 1.0)
    return np.array([r, 0.0, -r, 0.0])


def ensemble_amplitude(p: SystemParams, cfg: SdeConfig, initial=None,
                       noise: bool = True) -> EnsembleResult:
    """Mean of ``|alpha1|^2 = x1^2 + y1^2`` over trajectories and the recorded
    samples after the transient, with the standard error across trajectories.
    """
    cfg.validate_for(p)
    if initial is None:
        initial = default_initial(p)
    t, X = simulate_ensemble(p, cfg, initial, noise=noise)
    keep = t >= cfg.transient_fraction * cfg.t_final
    if not keep.any():
        raise ValueError("no samples recorded after the transient; lower record_every")
    amp2 = X[keep, :, 0] ** 2 + X[keep, :, 1] ** 2
    per_traj = amp2.mean(axis=0)
    mean = math.fsum(per_traj) / per_traj.size
    if per_traj.size > 1:
        var = math.fsum((per_traj - mean) ** 2) / (per_traj.size - 1)
        err = math.sqrt(var / per_traj.size)
    else:
        err = 0.0
    return EnsembleResult(mean, err, per_traj)


def fokker_planck_rhs(w: np.ndarray, axes: Sequence[np.ndarray], p: SystemParams) -> np.ndarray:
    """Right side of the Fokker-Planck equation on a 4-d grid.

    ``dW/dt = -sum_i d_i(mu_i W) + 1/2 sum_i d_i^2 (D_ii W)`` evaluated by
    second-order central differences; ``w`` has shape
    ``(len(axes[0]), ..., len(axes[3]))`` with ``indexing='ij'``.
    """
    grids = np.meshgrid(*axes, indexing="ij")
    s = np.stack(grids, axis=-1)
    mu = drift(s, p)
    dd = np.repeat(0.5 * nu(s, p), 2, axis=-1)
    out = np.zeros_like(w)
    for i, ax in enumerate(axes):
        h = ax[1] - ax[0]
        out -= np.gradient(mu[..., i] * w, h, axis=i)
        out += 0.5 * np.gradient(np.gradient(dd[..., i] * w, h, axis=i), h, axis=i)
    return out
