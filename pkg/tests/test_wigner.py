import math

import numpy as np
import pytest
from scipy.linalg import expm

from qslcoupled import DEEP, WEAK
from qslcoupled.fock import coherent_state
from qslcoupled.liouvillian import steady_state_for
from qslcoupled.observables import partial_trace
from qslcoupled.wigner import (BIMODAL, RING, UNIMODAL, PhaseGrid, WignerField,
                               lobe_report, lobe_sweep, ridge_profile, wigner)
from conftest import random_density

SMALL = PhaseGrid.square(2.0, 17)


def parity_oracle(rho, alpha, big=60):
    """(2/pi) Tr[D(alpha)^dag rho D(alpha) P] in an enlarged Fock space."""
    n = rho.shape[0]
    a = np.diag(np.sqrt(np.arange(1, big)), 1)
    d = expm(alpha * a.T - np.conj(alpha) * a)
    r = np.zeros((big, big), dtype=complex)
    r[:n, :n] = rho
    shifted = d.conj().T @ r @ d
    parity = (-1.0) ** np.arange(big)
    return (2 / math.pi) * float(np.real(np.sum(np.diagonal(shifted) * parity)))


def cat_mixture(beta, n=30):
    plus, minus = coherent_state(n, beta), coherent_state(n, -beta)
    return 0.5 * (np.outer(plus, plus.conj()) + np.outer(minus, minus.conj()))


@pytest.mark.filterwarnings("ignore:Wigner function not contained")
def test_vacuum_and_one_phonon_at_origin():
    vac = np.diag([1.0, 0.0, 0.0])
    one = np.diag([0.0, 1.0, 0.0])
    wf = wigner(vac, SMALL)
    assert wf(0.0, 0.0) == pytest.approx(2 / math.pi, rel=1e-12)
    assert wf(1.0, 0.5) == pytest.approx(2 / math.pi * math.exp(-2.5), rel=1e-12)
    assert wigner(one, SMALL)(0.0, 0.0) == pytest.approx(-2 / math.pi, rel=1e-12)


@pytest.mark.filterwarnings("ignore:Wigner function not contained")
def test_matches_displaced_parity_oracle(rng):
    rho = random_density(6, rng)
    wf = wigner(rho, SMALL)
    for _ in range(8):
        i, j = rng.integers(0, 17, size=2)
        x, y = SMALL.xs[j], SMALL.ys[i]
        assert wf.values[i, j] == pytest.approx(parity_oracle(rho, x + 1j * y), abs=1e-10)


def test_normalisation_and_bound(rng):
    rho = random_density(8, rng)
    wf = wigner(rho, PhaseGrid.square(5.0, 201))
    assert wf.normalization() == pytest.approx(1.0, abs=1e-8)
    assert np.abs(wf.values).max() <= 2 / math.pi + 1e-12
    assert not wf.boundary_warning


def test_boundary_warning():
    psi = coherent_state(40, 1.9)
    with pytest.warns(RuntimeWarning, match="not contained"):
        wf = wigner(np.outer(psi, psi.conj()), SMALL)
    assert wf.boundary_warning


@pytest.mark.filterwarnings("ignore:Wigner function not contained")
def test_conjugation_reflects_y(rng):
    rho = random_density(6, rng)
    a = wigner(rho, SMALL).values
    b = wigner(rho.conj(), SMALL).values
    np.testing.assert_allclose(b, a[::-1], atol=1e-13)


def test_uncoupled_steady_state_is_rotation_invariant():
    r1 = partial_trace(steady_state_for(WEAK, 6), 1)
    grid = PhaseGrid.square(5.0, 101)
    w = wigner(r1, grid).values
    np.testing.assert_allclose(w, w.T, atol=1e-12)
    rep = lobe_report(wigner(r1, grid))
    assert rep.classification in (RING, UNIMODAL)
    assert rep.delta_y == 0.0


def gaussian_field(grid, centres, width=0.3):
    X, Y = np.meshgrid(grid.xs, grid.ys)
    w = sum(np.exp(-((X - cx) ** 2 + (Y - cy) ** 2) / (2 * width ** 2)) for cx, cy in centres)
    return WignerField(grid, w)


def test_two_gaussians_bimodal():
    grid = PhaseGrid.square(3.0, 121)
    rep = lobe_report(gaussian_field(grid, [(0.3, 1.2), (-0.3, -1.2)]))
    assert rep.classification == BIMODAL
    assert rep.delta_y == pytest.approx(2.4, abs=grid.dy)
    assert rep.distance == pytest.approx(math.hypot(0.6, 2.4), abs=2 * grid.dy)
    assert rep.symmetric


def test_ring_and_unimodal():
    grid = PhaseGrid.square(4.0, 121)
    X, Y = np.meshgrid(grid.xs, grid.ys)
    r = np.hypot(X, Y)
    # small angular modulation keeps the ridge above the contrast threshold
    ring = np.exp(-((r - 2.0) ** 2) / 0.2) * (1 + 0.1 * np.cos(2 * np.arctan2(Y, X)))
    rep = lobe_report(WignerField(grid, ring))
    assert rep.classification == RING
    assert rep.ring_contrast == pytest.approx(1.1 ** -1 * 0.9, abs=0.02)
    assert lobe_report(gaussian_field(grid, [(0.5, 0.5)])).classification == UNIMODAL
    assert lobe_report(WignerField(grid, np.zeros_like(X))).classification == UNIMODAL


def test_cat_mixture_delta_y_stable_under_refinement():
    rho = cat_mixture(1.2j)
    grid = PhaseGrid.square(4.0, 81)
    coarse = lobe_report(wigner(rho, grid))
    fine = lobe_report(wigner(rho, grid.refined(2)))
    assert coarse.classification == fine.classification == BIMODAL
    assert coarse.delta_y == pytest.approx(2.4, abs=grid.dy)
    assert fine.delta_y == pytest.approx(2.4, abs=grid.refined(2).dy)
    assert abs(coarse.delta_y - fine.delta_y) <= grid.dy


def test_ridge_profile_of_coherent_state():
    psi = coherent_state(30, 1.5)
    wf = wigner(np.outer(psi, psi.conj()), PhaseGrid.square(4.0, 161))
    angles, heights, radii = ridge_profile(wf, n_angles=72)
    k = np.argmin(np.abs(angles))
    assert radii[k] == pytest.approx(1.5, abs=0.03)
    assert heights[k] == pytest.approx(2 / math.pi, rel=1e-3)


def test_grid_validation():
    with pytest.raises(ValueError):
        PhaseGrid(1.0, -1.0, -1.0, 1.0, 32, 32)
    with pytest.raises(ValueError):
        PhaseGrid.square(1.0, 8)
    assert PhaseGrid.square(1.0, 21).refined(3).n_x == 61


def test_single_point_sweep_has_no_transition():
    grid = PhaseGrid.square(3.0, 41)
    sweep = lobe_sweep(DEEP, [2.0], 4, grid)
    assert sweep.transition is None
    assert sweep.points[0].report is not None
    with pytest.raises(ValueError, match="ascending"):
        lobe_sweep(DEEP, [2.0, 1.0], 4, grid)


def test_sweep_records_failures():
    # the memory guard fires inside the worker and is recorded per point
    sweep = lobe_sweep(DEEP, [0.5, 1.0], 40, SMALL)
    assert all(pt.report is None and "MemoryBudgetError" in pt.error for pt in sweep.points)
    assert sweep.transition is None


def test_pure_ring_example():
    grid = PhaseGrid.square(4.0, 121)
    X, Y = np.meshgrid(grid.xs, grid.ys)
    rep = lobe_report(WignerField(grid, np.exp(-(np.hypot(X, Y) - 2.0) ** 2)))
    assert rep.classification == RING
    assert rep.delta_y == 0.0


def test_uncoupled_state_invariant_under_square_symmetries():
    r1 = partial_trace(steady_state_for(WEAK, 8), 1)
    w = wigner(r1, PhaseGrid.square(5.0, 101)).values
    for k in range(4):
        rotated = np.rot90(w, k)
        for img in (rotated, rotated.T):
            assert np.abs(img - w).max() < 1e-3 * w.max()


def test_delta_y_invariant_under_reflection():
    grid = PhaseGrid.square(3.0, 121)
    wf = gaussian_field(grid, [(0.4, 0.9), (-0.4, -1.1)])
    flipped = WignerField(grid, wf.values[::-1])
    assert lobe_report(flipped).delta_y == pytest.approx(lobe_report(wf).delta_y, abs=1e-12)


@pytest.mark.filterwarnings("ignore:Wigner function not contained")
@pytest.mark.parametrize("ratio", [0.8, 1.5])
def test_deep_classification_stable_under_refinement(ratio):
    from qslcoupled.wigner import DEEP_GRID
    r1 = partial_trace(steady_state_for(DEEP.with_eps_over_k1(ratio), 8), 1)
    coarse = lobe_report(wigner(r1, DEEP_GRID))
    fine = lobe_report(wigner(r1, DEEP_GRID.refined(2)))
    assert coarse.classification == fine.classification
    assert abs(coarse.delta_y - fine.delta_y) <= 2 * DEEP_GRID.dy
