import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq

from qslcoupled import DEEP, WEAK, SystemParams
from qslcoupled.classical import rhs
from qslcoupled.sde import (CHUNK, RegimeError, SdeConfig, default_initial, diffusion,
                            diffusion_matrix, drift, ensemble_amplitude, fokker_planck_rhs,
                            nu, simulate, simulate_ensemble, trajectory_rng)


def euler_circle_r2(p, dt):
    """Radius^2 of the circle Euler's method maps onto itself at eps=0.

    The drift is rotation invariant there, so one step multiplies
    ``x + i y`` by ``1 + dt (a - i W)`` with ``a = k1/2 - k2 (r^2 - 1)`` and
    ``W = w + K (r^2 - 1)``; the circle is invariant when that factor has
    unit modulus.
    """
    def f(r2):
        a = 0.5 * p.k1 - p.k2 * (r2 - 1)
        w = p.omega + p.kerr * (r2 - 1)
        return (1 + dt * a) ** 2 + (dt * w) ** 2 - 1
    return brentq(f, 1.0, 10.0, xtol=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=4, max_size=4), st.floats(0, 4),
       st.floats(-2, 4))
def test_drift_is_shifted_classical_field(s, eps, kerr):
    p = WEAK.replace(epsilon=eps, kerr=kerr)
    np.testing.assert_allclose(drift(s, p), rhs(s, p, shift=1.0), atol=1e-12)


def test_diffusion_examples():
    origin = np.zeros(4)
    np.testing.assert_allclose(diffusion(origin, WEAK), [0.3872983346207417] * 4, rtol=1e-12)
    np.testing.assert_allclose(nu([0.5, 0.0, 0.0, 0.0], WEAK), [0.4, 0.3], rtol=1e-12)
    np.testing.assert_allclose(diffusion_matrix([0.5, 0.0, 0.0, 0.0], WEAK),
                               np.diag([0.2, 0.2, 0.15, 0.15]), rtol=1e-12)
    with pytest.raises(RegimeError, match="weak quantum regime"):
        diffusion(origin, DEEP)
    with pytest.raises(RegimeError):
        simulate(DEEP, SdeConfig(n_steps=1), default_initial(DEEP))
    # the deterministic limit is still available
    simulate(DEEP, SdeConfig(n_steps=1), default_initial(DEEP), noise=False)


def test_single_step_noise_scaling():
    cfg = SdeConfig(dt=1e-3, n_steps=1, n_trajectories=1, base_seed=11, record_every=1)
    x0 = np.array([0.3, -0.1, 0.7, 0.2])
    p = WEAK.with_eps_over_k1(1.0)
    _, X = simulate(p, cfg, x0, index=4)
    xi = trajectory_rng(11, 4).standard_normal((CHUNK, 4))[0]
    expected = x0 + drift(x0, p) * 1e-3 + diffusion(x0, p) * math.sqrt(1e-3) * xi
    np.testing.assert_allclose(X[1], expected, rtol=0, atol=1e-15)


def test_zero_noise_is_plain_euler():
    p = WEAK.with_eps_over_k1(0.7)
    cfg = SdeConfig(dt=2e-3, n_steps=500, record_every=500)
    x = np.array([1.0, 0.5, -0.2, 0.3])
    _, X = simulate(p, cfg, x, noise=False)
    for _ in range(500):
        x = x + 2e-3 * np.array(rhs(x, p, shift=1.0))
    np.testing.assert_allclose(X[-1], x, atol=1e-12)


@pytest.mark.parametrize("dt", [2e-3, 1e-3])
def test_zero_noise_uncoupled_radius(dt):
    p = WEAK
    cfg = SdeConfig(dt=dt, n_steps=int(60 / dt), record_every=int(1 / dt))
    _, X = simulate(p, cfg, default_initial(p), noise=False)
    r2 = X[-1, 0] ** 2 + X[-1, 1] ** 2
    assert r2 == pytest.approx(euler_circle_r2(p, dt), abs=1e-9)
    # the invariant circle approaches k1/(2 k2) + 1 = 3.5 linearly in dt with
    # slope W^2 / (2 k2), W = w + K k1 / (2 k2)
    assert (euler_circle_r2(p, dt) - 3.5) / dt == pytest.approx(4.5 ** 2 / 0.4, rel=0.06)
    assert euler_circle_r2(p, 1e-8) == pytest.approx(3.5, abs=1e-6)


def test_determinism_and_trajectory_independence():
    p = WEAK.with_eps_over_k1(2.0)
    cfg = SdeConfig(dt=1e-3, n_steps=5000, n_trajectories=3, base_seed=5, record_every=1000)
    t1, a = simulate_ensemble(p, cfg, default_initial(p))
    t2, b = simulate_ensemble(p, cfg, default_initial(p))
    np.testing.assert_array_equal(a, b)
    # trajectory 2 alone equals its column in the ensemble
    _, alone = simulate(p, cfg, default_initial(p), index=2)
    np.testing.assert_array_equal(alone, a[:, 2, :])
    _, other = simulate_ensemble(p, SdeConfig(**{**cfg.__dict__, "base_seed": 6}),
                                 default_initial(p))
    assert not np.array_equal(other, a)
    assert t1[-1] == pytest.approx(5.0)


def test_degenerate_single_trajectory_ensemble():
    p = WEAK
    cfg = SdeConfig(dt=1e-3, n_steps=4000, n_trajectories=1, record_every=100)
    res = ensemble_amplitude(p, cfg, noise=False)
    assert res.std_err == 0.0
    t, X = simulate(p, cfg, default_initial(p), noise=False)
    keep = t >= 2.0
    assert res.mean == pytest.approx(np.mean(X[keep, 0] ** 2 + X[keep, 1] ** 2), rel=1e-12)


def test_config_validation():
    with pytest.raises(ValueError):
        SdeConfig(dt=0.0)
    with pytest.raises(ValueError):
        SdeConfig(transient_fraction=1.0)
    with pytest.raises(ValueError, match="exceeds"):
        ensemble_amplitude(WEAK, SdeConfig(dt=0.05, n_steps=10))
    with pytest.raises(ValueError, match="record_every"):
        ensemble_amplitude(WEAK, SdeConfig(n_steps=10, record_every=100))
    assert SdeConfig(dt=1e-3, n_steps=2000).t_final == pytest.approx(2.0)


def test_fokker_planck_moments():
    p = SystemParams(omega=2.0, k1=1.0, k2=0.2, kerr=1.0, epsilon=0.8)
    ax = np.linspace(-6.0, 6.0, 31)
    axes = [ax] * 4
    g = np.meshgrid(*axes, indexing="ij")
    centre = np.array([0.5, 0.2, -0.3, 0.1])
    w = np.exp(-sum((gi - c) ** 2 for gi, c in zip(g, centre)) / (2 * 0.6 ** 2))
    dv = (ax[1] - ax[0]) ** 4
    w /= w.sum() * dv
    dw = fokker_planck_rhs(w, axes, p)
    # probability is conserved and d<x_i>/dt equals <mu_i>
    assert abs(dw.sum() * dv) < 1e-8
    mu = drift(np.stack(g, axis=-1), p)
    for i in range(4):
        lhs = (g[i] * dw).sum() * dv
        assert lhs == pytest.approx((mu[..., i] * w).sum() * dv, abs=1e-6)
