"""Deterministic model of two Stuart-Landau oscillators with
attractive-repulsive diffusive coupling.

State vectors are ``(x1, y1, x2, y2)``.  Coupling enters ``x`` repulsively
(``-eps (x_j' - x_j)``) and ``y`` attractively (``+eps (y_j' - y_j)``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import brentq, root

from .params import SystemParams

__all__ = [
    "LIMIT_CYCLE",
    "STEADY_STATE",
    "DIVERGENT",
    "ClassicalState",
    "rhs",
    "amplitude_rhs",
    "trivial_jacobian",
    "trivial_eigenvalues",
    "pitchfork_epsilon",
    "ihss_ratios",
    "ihss_branch",
    "integrate",
    "AttractorReport",
    "classify_attractor",
    "SweepRow",
    "classical_sweeps",
    "lc_loss_point",
    "od_retention_edge",
]

LIMIT_CYCLE = "limit-cycle"
STEADY_STATE = "steady-state"
DIVERGENT = "divergent"


class ClassicalState(NamedTuple):
    x1: float
    y1: float
    x2: float
    y2: float

    @property
    def alpha(self) -> tuple[complex, complex]:
        return complex(self.x1, self.y1), complex(self.x2, self.y2)


def _rhs_scalar(x1, y1, x2, y2, w, k1h, k2, K, eps, shift):
    r1 = x1 * x1 + y1 * y1 - shift
    r2 = x2 * x2 + y2 * y2 - shift
    return (
        w * y1 + k1h * x1 - k2 * r1 * x1 + K * r1 * y1 - eps * (x2 - x1),
        -w * x1 + k1h * y1 - k2 * r1 * y1 - K * r1 * x1 + eps * (y2 - y1),
        w * y2 + k1h * x2 - k2 * r2 * x2 + K * r2 * y2 - eps * (x1 - x2),
        -w * x2 + k1h * y2 - k2 * r2 * y2 - K * r2 * x2 + eps * (y1 - y2),
    )


def rhs(s, p: SystemParams, shift: float = 0.0) -> np.ndarray:
    """Time derivative of ``s``; accepts shape ``(4,)`` or ``(m, 4)``.

    ``shift`` replaces every ``r_j^2`` by ``r_j^2 - shift``; ``shift=1``
    gives the drift of the noisy model.
    """
    s = np.asarray(s, dtype=float)
    out = _rhs_scalar(s[..., 0], s[..., 1], s[..., 2], s[..., 3], p.omega,
                      0.5 * p.k1, p.k2, p.kerr, p.epsilon, shift)
    return np.stack(out, axis=-1)


def amplitude_rhs(alpha1: complex, alpha2: complex, p: SystemParams) -> tuple[complex, complex]:
    """Complex-amplitude form of :func:`rhs` for ``alpha_j = x_j + i y_j``."""
    def one(a, b):
        n = abs(a) ** 2
        return ((-1j * p.omega + 0.5 * p.k1 - p.k2 * n - 1j * p.kerr * n) * a
                + p.epsilon * (a.conjugate() - b.conjugate()))
    return one(alpha1, alpha2), one(alpha2, alpha1)


def trivial_jacobian(p: SystemParams) -> np.ndarray:
    """Jacobian of :func:`rhs` at the origin."""
    h, w, e = 0.5 * p.k1, p.omega, p.epsilon
    return np.array([
        [h + e, w, -e, 0.0],
        [-w, h - e, 0.0, e],
        [-e, 0.0, h + e, w],
        [0.0, e, -w, h - e],
    ])


def trivial_eigenvalues(p: SystemParams) -> np.ndarray:
    """Closed-form eigenvalues at the origin, ordered
    ``(k1/2 + i w, k1/2 - i w, k1/2 + s, k1/2 - s)`` with
    ``s = sqrt(4 eps^2 - w^2)`` (principal complex root)."""
    s = np.sqrt(complex(4 * p.epsilon ** 2 - p.omega ** 2))
    half = 0.5 * p.k1
    return np.array([half + 1j * p.omega, half - 1j * p.omega, half + s, half - s])


def pitchfork_epsilon(p: SystemParams) -> float:
    """Coupling at which the origin undergoes the symmetry-breaking pitchfork."""
    return 0.25 * math.sqrt(p.k1 ** 2 + 4 * p.omega ** 2)


def ihss_ratios(p: SystemParams) -> list[float]:
    """Candidate ``x*/y*`` ratios of the inhomogeneous steady state
    ``(x*, y*, -x*, -y*)``; empty when the discriminant is negative."""
    w, k1, k2, K, e = p.omega, p.k1, p.k2, p.kerr, p.epsilon
    base = w + k1 * K / (2 * k2)
    disc = 4 * e ** 2 - base ** 2 + (2 * e * K / k2) ** 2
    den = base + 2 * e * K / k2
    if disc < 0 or den == 0:
        return []
    root_ = math.sqrt(disc)
    return [(-2 * e + root_) / den, (-2 * e - root_) / den]


def ihss_branch(p: SystemParams, tol: float = 1e-9, y_max: float = 1e3) -> list[ClassicalState]:
    """Inhomogeneous steady states on the rays fixed by :func:`ihss_ratios`.

    For each ratio ``c`` the amplitude ``y*`` is the root of the ``x1``
    component of :func:`rhs` along ``(c y, y, -c y, -y)``, then polished by a
    four-dimensional Newton solve.  Only states with ``||rhs|| < tol`` are
    returned, each together with its mirror image ``-s``.
    """
    out: list[ClassicalState] = []
    for c in ihss_ratios(p):
        def along(y):
            return rhs([c * y, y, -c * y, -y], p)[0] / y

        ys = np.geomspace(1e-6, y_max, 400)
        vals = np.array([along(y) for y in ys])
        sign_change = np.flatnonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))
        for i in sign_change:
            y = brentq(along, ys[i], ys[i + 1], xtol=1e-14)
            sol = root(lambda s: rhs(s, p), [c * y, y, -c * y, -y], tol=1e-14)
            s = sol.x
            if np.linalg.norm(rhs(s, p)) < tol and np.linalg.norm(s) > 1e-6:
                for cand in (s, -s):
                    if not any(np.allclose(cand, o, atol=1e-7) for o in out):
                        out.append(ClassicalState(*map(float, cand)))
    return out


def _rk4_run(s, p, n_steps, dt, shift=0.0, record=False, limit=1e6):
    x1, y1, x2, y2 = map(float, s)
    args = (p.omega, 0.5 * p.k1, p.k2, p.kerr, p.epsilon, shift)
    f = _rhs_scalar
    h2, h6 = 0.5 * dt, dt / 6.0
    trace = [] if record else None
    for _ in range(n_steps):
        a = f(x1, y1, x2, y2, *args)
        b = f(x1 + h2 * a[0], y1 + h2 * a[1], x2 + h2 * a[2], y2 + h2 * a[3], *args)
        c = f(x1 + h2 * b[0], y1 + h2 * b[1], x2 + h2 * b[2], y2 + h2 * b[3], *args)
        d = f(x1 + dt * c[0], y1 + dt * c[1], x2 + dt * c[2], y2 + dt * c[3], *args)
        x1 += h6 * (a[0] + 2 * b[0] + 2 * c[0] + d[0])
        y1 += h6 * (a[1] + 2 * b[1] + 2 * c[1] + d[1])
        x2 += h6 * (a[2] + 2 * b[2] + 2 * c[2] + d[2])
        y2 += h6 * (a[3] + 2 * b[3] + 2 * c[3] + d[3])
        if record:
            trace.append(x1)
        if not (abs(x1) + abs(y1) + abs(x2) + abs(y2) < limit):
            return None, trace
    return np.array([x1, y1, x2, y2]), trace


def integrate(s0, p: SystemParams, t_final: float, dt: float = 0.01,
              shift: float = 0.0) -> np.ndarray:
    """Fixed-step RK4 integration; returns the final state (NaNs if the
    trajectory leaves ``||s|| < 1e6``)."""
    n = int(round(t_final / dt))
    s, _ = _rk4_run(s0, p, n, dt, shift)
    return s if s is not None else np.full(4, np.nan)


@dataclass
class AttractorReport:
    classification: str
    amplitude: float
    state: ClassicalState | None
    residual: float = float("nan")


def classify_attractor(p: SystemParams, initial, t_transient: float | None = None,
                       t_measure: float | None = None, dt: float | None = None,
                       threshold: float = 1e-3, shift: float = 0.0) -> AttractorReport:
    """Integrate, drop the transient, and measure the peak-to-peak ``x1``.

    Defaults: ``t_transient = 200/k1``, ``t_measure = 100/k1``,
    ``dt = 0.01/k1``.  Peak-to-peak above ``threshold`` is a limit cycle,
    otherwise the settled point is returned as a steady state.
    """
    t_transient = 200.0 / p.k1 if t_transient is None else t_transient
    t_measure = 100.0 / p.k1 if t_measure is None else t_measure
    dt = 0.01 / p.k1 if dt is None else dt
    s, _ = _rk4_run(initial, p, int(round(t_transient / dt)), dt, shift)
    if s is None:
        return AttractorReport(DIVERGENT, float("inf"), None)
    s, xs = _rk4_run(s, p, int(round(t_measure / dt)), dt, shift, record=True)
    if s is None:
        return AttractorReport(DIVERGENT, float("inf"), None)
    amp = max(xs) - min(xs) if xs else 0.0
    resid = float(np.linalg.norm(rhs(s, p, shift)))
    kind = LIMIT_CYCLE if amp > threshold else STEADY_STATE
    return AttractorReport(kind, amp, ClassicalState(*map(float, s)), resid)


@dataclass
class SweepRow:
    param: float
    classification: str
    amplitude: float
    state: ClassicalState | None
    error: str = ""


def classical_sweeps(p_base: SystemParams, param: str, values: Sequence[float],
                     initial=(1.5, 0.0, 1.4, 0.1), continuation: bool = True,
                     reverse: bool = False, **classify_kwargs) -> list[SweepRow]:
    """Sweep ``param`` (``'eps_over_k1'``, ``'epsilon'`` or ``'kerr'``).

    ``values`` must be ascending; ``reverse=True`` walks them downward.  With
    ``continuation`` each point starts from the final state of the previous
    one, which exposes hysteresis.  Rows come back in walking order.
    """
    values = [float(v) for v in values]
    if any(b < a for a, b in zip(values, values[1:])):
        raise ValueError("sweep values must be ascending")
    if param not in ("eps_over_k1", "epsilon", "kerr"):
        raise ValueError(f"cannot sweep {param!r}")
    order = values[::-1] if reverse else values
    start = np.asarray(initial, dtype=float)
    state = start
    rows = []
    for v in order:
        if param == "eps_over_k1":
            p = p_base.with_eps_over_k1(v)
        else:
            p = p_base.replace(**{param: v})
        try:
            rep = classify_attractor(p, state, **classify_kwargs)
        except Exception as exc:  # recorded, sweep continues
            rows.append(SweepRow(v, "error", float("nan"), None, f"{type(exc).__name__}: {exc}"))
            continue
        rows.append(SweepRow(v, rep.classification, rep.amplitude, rep.state))
        if continuation and rep.state is not None:
            state = np.asarray(rep.state)
        elif not continuation:
            state = start
    return rows


def lc_loss_point(rows: Sequence[SweepRow]) -> float | None:
    """First swept value at which a limit cycle gives way to a steady state."""
    for prev, row in zip(rows, rows[1:]):
        if prev.classification == LIMIT_CYCLE and row.classification == STEADY_STATE:
            return row.param
    return None


def od_retention_edge(rows: Sequence[SweepRow]) -> float | None:
    """Last swept value still showing a steady state before the first limit
    cycle (for a sweep started in the steady state)."""
    last = None
    for row in rows:
        if row.classification != STEADY_STATE:
            break
        last = row.param
    return last
