"""Single-mode Wigner functions and the lobe-distance diagnostic.

Convention: ``alpha = x + i y``, ``W`` integrates to one over ``dx dy`` and
the vacuum is ``(2/pi) exp(-2 |alpha|^2)``.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import ndimage
from scipy.special import eval_genlaguerre, gammaln

from .observables import partial_trace
from .params import SystemParams

logger = logging.getLogger(__name__)

__all__ = [
    "PhaseGrid",
    "WignerField",
    "LobeReport",
    "SweepPoint",
    "LobeSweep",
    "RING",
    "BIMODAL",
    "UNIMODAL",
    "WEAK_GRID",
    "DEEP_GRID",
    "wigner",
    "ridge_profile",
    "lobe_report",
    "lobe_point",
    "lobe_sweep",
]

RING = "oscillatory-ring"
BIMODAL = "bimodal-QOD"
UNIMODAL = "unimodal"


@dataclass(frozen=True)
class PhaseGrid:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    n_x: int
    n_y: int

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("grid bounds must be increasing")
        if self.n_x < 16 or self.n_y < 16:
            raise ValueError("grid needs at least 16 points per axis")

    @classmethod
    def square(cls, half_width: float, n: int) -> "PhaseGrid":
        return cls(-half_width, half_width, -half_width, half_width, n, n)

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_x)

    @property
    def ys(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, self.n_y)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n_x - 1)

    @property
    def dy(self) -> float:
        return (self.y_max - self.y_min) / (self.n_y - 1)

    def refined(self, factor: int = 2) -> "PhaseGrid":
        return PhaseGrid(self.x_min, self.x_max, self.y_min, self.y_max,
                         factor * (self.n_x - 1) + 1, factor * (self.n_y - 1) + 1)

    def asdict(self) -> dict:
        return dict(x_min=self.x_min, x_max=self.x_max, y_min=self.y_min,
                    y_max=self.y_max, n_x=self.n_x, n_y=self.n_y)


WEAK_GRID = PhaseGrid.square(5.0, 201)
DEEP_GRID = PhaseGrid.square(3.0, 151)


@dataclass(frozen=True)
class WignerField:
    """``values[i, j]`` is ``W(xs[j], ys[i])``."""

    grid: PhaseGrid
    values: np.ndarray
    boundary_warning: bool = False

    def normalization(self) -> float:
        return float(self.values.sum() * self.grid.dx * self.grid.dy)

    def __call__(self, x, y):
        """Bilinear interpolation at arbitrary points inside the grid."""
        g = self.grid
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        cols = (np.atleast_1d(x) - g.x_min) / g.dx
        rows = (np.atleast_1d(y) - g.y_min) / g.dy
        out = ndimage.map_coordinates(self.values, [rows, cols], order=1, mode="nearest")
        return out.reshape(x.shape) if x.ndim else float(out[0])


def wigner(rho: np.ndarray, grid: PhaseGrid, boundary_rtol: float = 1e-4) -> WignerField:
    """Wigner function of a single-mode density matrix in the Fock basis.

    Uses the closed-form kernel of ``|m><n|`` (``m >= n``)::

        (2/pi) (-1)^n sqrt(n!/m!) (2 conj(alpha))^(m-n)
               exp(-2|alpha|^2) L_n^(m-n)(4|alpha|^2)

    and its complex conjugate for ``|n><m|``.
    """
    rho = np.asarray(rho, dtype=complex)
    dim = rho.shape[0]
    X, Y = np.meshgrid(grid.xs, grid.ys)
    alpha_c = X - 1j * Y
    r2 = X * X + Y * Y
    gauss = np.exp(-2.0 * r2)
    arg = 4.0 * r2

    W = np.zeros_like(X)
    power = np.ones_like(alpha_c)
    for shift in range(dim):
        if shift:
            power = power * (2.0 * alpha_c)
        coeffs = np.diagonal(rho, -shift)  # rho[n + shift, n]
        if not np.any(coeffs):
            continue
        acc = np.zeros_like(alpha_c)
        for n, c in enumerate(coeffs):
            if c == 0:
                continue
            m = n + shift
            scale = (-1) ** n * np.exp(0.5 * (gammaln(n + 1) - gammaln(m + 1)))
            acc += c * scale * eval_genlaguerre(n, shift, arg)
        term = (acc * power).real
        W += term if shift == 0 else 2.0 * term
    W *= (2.0 / np.pi) * gauss

    peak = np.max(np.abs(W))
    edge = max(np.abs(W[0]).max(), np.abs(W[-1]).max(),
               np.abs(W[:, 0]).max(), np.abs(W[:, -1]).max())
    flagged = bool(peak > 0 and edge > boundary_rtol * peak)
    if flagged:
        warnings.warn(f"Wigner function not contained in grid: boundary/peak = "
                      f"{edge / peak:.2e}", RuntimeWarning, stacklevel=2)
    return WignerField(grid, W, flagged)


def ridge_profile(wf: WignerField, n_angles: int = 360):
    """Maximum of ``W`` along rays from the origin.

    Returns ``(angles, heights, radii)``; rays extend to the largest circle
    inside the grid and are sampled at half the grid spacing.
    """
    g = wf.grid
    r_max = min(-g.x_min, g.x_max, -g.y_min, g.y_max)
    if r_max <= 0:
        raise ValueError("grid must contain the origin")
    step = 0.5 * min(g.dx, g.dy)
    radii = np.arange(step, r_max + 0.5 * step, step)
    angles = np.linspace(-np.pi, np.pi, n_angles, endpoint=False)
    xs = radii[None, :] * np.cos(angles)[:, None]
    ys = radii[None, :] * np.sin(angles)[:, None]
    samples = wf(xs, ys)
    k = np.argmax(samples, axis=1)
    return angles, samples[np.arange(n_angles), k], radii[k]


@dataclass
class LobeReport:
    """Shape classification of a Wigner function.

    ``delta_y`` is the lobe distance measured along ``y``; ``distance`` is
    the Euclidean distance between the two lobes.  ``ring_contrast`` is the
    weakest over strongest ridge height seen from the origin.
    """

    classification: str
    delta_y: float
    maxima: list = field(default_factory=list)
    distance: float = 0.0
    ring_contrast: float = 0.0
    symmetric: bool = True


def _local_maxima(wf: WignerField, threshold: float):
    W = wf.values
    peak = W.max()
    dominant = W >= ndimage.maximum_filter(W, size=3, mode="constant", cval=-np.inf)
    mask = dominant & (W >= threshold * peak)
    # touching maxima (ties on a plateau) are one peak; keep its first pixel
    labels, _ = ndimage.label(mask, structure=np.ones((3, 3)))
    xs, ys = wf.grid.xs, wf.grid.ys
    found = []
    for label, sl in enumerate(ndimage.find_objects(labels), start=1):
        rows, cols = np.nonzero(labels[sl] == label)
        i, j = rows[0] + sl[0].start, cols[0] + sl[1].start
        found.append((float(xs[j]), float(ys[i]), float(W[i, j])))
    return sorted(found, key=lambda m: -m[2])


def lobe_report(wf: WignerField, ring_contrast: float = 0.75,
                threshold: float = 0.5) -> LobeReport:
    """Classify a Wigner function as ring, two-lobed or single-peaked.

    Local maxima are grid points that dominate their eight neighbours and
    exceed ``threshold`` times the global maximum.  The field is a ring when
    the ridge seen along every ray from the origin keeps at least
    ``ring_contrast`` of the highest ridge and the origin is a dip below the
    whole ridge.  Otherwise two or more maxima make it bimodal, with the two
    highest maxima retained as lobes.
    """
    W = wf.values
    if not np.isfinite(W).all() or W.max() <= 0 or np.ptp(W) < 1e-12 * max(abs(W.max()), 1e-300):
        return LobeReport(UNIMODAL, 0.0)

    maxima = _local_maxima(wf, threshold)
    _, heights, _ = ridge_profile(wf)
    contrast = float(heights.min() / heights.max()) if heights.max() > 0 else 0.0
    center = float(wf(0.0, 0.0))

    if contrast >= ring_contrast and center < heights.min():
        return LobeReport(RING, 0.0, maxima, 0.0, contrast)
    if len(maxima) >= 2:
        (x1, y1, w1), (x2, y2, w2) = maxima[:2]
        tol = 1.5 * max(wf.grid.dx, wf.grid.dy)
        # (x, y) -> (-x, -y) and y -> -y both mirror the y coordinates
        symmetric = abs(y1 + y2) <= tol
        return LobeReport(BIMODAL, abs(y1 - y2), maxima[:2],
                          float(np.hypot(x1 - x2, y1 - y2)), contrast, symmetric)
    return LobeReport(UNIMODAL, 0.0, maxima[:1], 0.0, contrast)


@dataclass
class SweepPoint:
    eps_over_k1: float
    report: LobeReport | None
    error: str = ""


@dataclass
class LobeSweep:
    points: list
    transition: float | None


def lobe_point(p: SystemParams, n_max: int, grid: PhaseGrid,
               ring_contrast: float = 0.75) -> LobeReport:
    """Steady state -> site-1 reduced state -> Wigner function -> report."""
    from .liouvillian import steady_state_for

    rho = steady_state_for(p, n_max)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        wf = wigner(partial_trace(rho, 1), grid)
    report = lobe_report(wf, ring_contrast=ring_contrast)
    if report.classification == BIMODAL:
        logger.info("eps/k1=%g: delta_y=%.4f euclidean=%.4f", p.eps_over_k1,
                    report.delta_y, report.distance)
    return report


def _safe_point(args):
    p, n_max, grid, ring_contrast = args
    try:
        return lobe_point(p, n_max, grid, ring_contrast), ""
    except Exception as exc:  # recorded per point, sweep continues
        return None, f"{type(exc).__name__}: {exc}"


def lobe_sweep(p_base: SystemParams, eps_over_k1: Sequence[float], n_max: int,
               grid: PhaseGrid, ring_contrast: float = 0.75,
               map_fn: Callable[[Callable, Iterable], Iterable] = map) -> LobeSweep:
    """Lobe reports along ascending ``eps/k1``.

    ``transition`` is the first ``eps/k1`` classified bimodal (``None`` for a
    single-point sweep or when no point is bimodal).  ``map_fn`` may be a
    parallel, order-preserving map such as ``Executor.map``.
    """
    ratios = [float(r) for r in eps_over_k1]
    if any(b < a for a, b in zip(ratios, ratios[1:])):
        raise ValueError("eps/k1 values must be ascending")
    jobs = [(p_base.with_eps_over_k1(r), n_max, grid, ring_contrast) for r in ratios]
    points = [SweepPoint(r, rep, err) for r, (rep, err) in zip(ratios, map_fn(_safe_point, jobs))]
    transition = None
    if len(points) > 1:
        transition = next((pt.eps_over_k1 for pt in points
                           if pt.report is not None and pt.report.classification == BIMODAL),
                          None)
    return LobeSweep(points, transition)
