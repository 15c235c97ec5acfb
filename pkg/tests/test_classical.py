import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qslcoupled import WEAK, SystemParams
from qslcoupled.classical import (LIMIT_CYCLE, STEADY_STATE, SweepRow, amplitude_rhs,
                                  classical_sweeps, classify_attractor, ihss_branch,
                                  ihss_ratios, integrate, lc_loss_point, od_retention_edge,
                                  pitchfork_epsilon, rhs, trivial_eigenvalues,
                                  trivial_jacobian)

params = st.builds(SystemParams, omega=st.floats(0.0, 4.0), k1=st.floats(0.1, 3.0),
                   k2=st.floats(0.05, 3.0), kerr=st.floats(-3.0, 6.0),
                   epsilon=st.floats(0.0, 4.0))
states = st.lists(st.floats(-3.0, 3.0), min_size=4, max_size=4)


def amplitude_oracle(a1, a2, p):
    n1, n2 = abs(a1) ** 2, abs(a2) ** 2
    d1 = (-1j * p.omega + p.k1 / 2 - p.k2 * n1 - 1j * p.kerr * n1) * a1 \
        + p.epsilon * (a1.conjugate() - a2.conjugate())
    d2 = (-1j * p.omega + p.k1 / 2 - p.k2 * n2 - 1j * p.kerr * n2) * a2 \
        + p.epsilon * (a2.conjugate() - a1.conjugate())
    return d1, d2


def test_rhs_example():
    p = SystemParams(omega=2.0, k1=1.0, k2=0.2, kerr=1.0, epsilon=0.5)
    # r1^2 = 1, r2^2 = 0
    out = rhs([1.0, 0.0, 0.0, 0.0], p)
    np.testing.assert_allclose(out, [0.5 - 0.2 + 0.5, -2.0 - 1.0, -0.5, 0.0], atol=1e-15)


@settings(max_examples=60, deadline=None)
@given(params, states)
def test_rhs_equals_amplitude_form(p, s):
    a1, a2 = complex(s[0], s[1]), complex(s[2], s[3])
    d1, d2 = amplitude_oracle(a1, a2, p)
    expected = [d1.real, d1.imag, d2.real, d2.imag]
    np.testing.assert_allclose(rhs(s, p), expected, atol=1e-10)
    np.testing.assert_allclose(amplitude_rhs(a1, a2, p), (d1, d2), atol=1e-10)


@settings(max_examples=60, deadline=None)
@given(params, states)
def test_rhs_symmetries(p, s):
    s = np.array(s)
    swap = s[[2, 3, 0, 1]]
    np.testing.assert_allclose(rhs(swap, p), rhs(s, p)[[2, 3, 0, 1]], atol=1e-12)
    np.testing.assert_allclose(rhs(-s, p), -rhs(s, p), atol=1e-12)


def test_rhs_batched_and_shifted(rng):
    s = rng.normal(size=(5, 4))
    out = rhs(s, WEAK)
    assert out.shape == (5, 4)
    np.testing.assert_allclose(out[3], rhs(s[3], WEAK))
    # the shift adds k2 s and a Kerr rotation
    d = rhs(s[0], WEAK, shift=1.0) - rhs(s[0], WEAK)
    x1, y1, x2, y2 = s[0]
    np.testing.assert_allclose(d, [0.2 * x1 - y1, 0.2 * y1 + x1, 0.2 * x2 - y2, 0.2 * y2 + x2])


def test_jacobian_matches_finite_differences():
    p = SystemParams(omega=1.7, k1=0.9, k2=0.4, kerr=2.0, epsilon=0.6)
    h = 1e-6
    fd = np.column_stack([(rhs(h * e, p) - rhs(-h * e, p)) / (2 * h) for e in np.eye(4)])
    np.testing.assert_allclose(trivial_jacobian(p), fd, atol=1e-9)


def test_closed_form_eigenvalues_random_draws():
    rng = np.random.default_rng(7)
    for _ in range(50):
        p = SystemParams(omega=rng.uniform(0.1, 4), k1=rng.uniform(0.1, 3),
                         k2=rng.uniform(0.05, 3), kerr=rng.uniform(-3, 3),
                         epsilon=rng.uniform(0, 4))
        numeric = np.linalg.eigvals(trivial_jacobian(p))
        closed = trivial_eigenvalues(p)
        key = lambda z: (round(z.real, 6), round(z.imag, 6))
        np.testing.assert_allclose(sorted(numeric, key=key), sorted(closed, key=key), atol=1e-9)


def test_pitchfork_location():
    p = WEAK
    assert pitchfork_epsilon(p) == pytest.approx(math.sqrt(17) / 4, abs=1e-12)
    eps_p = pitchfork_epsilon(p)
    below = trivial_eigenvalues(p.replace(epsilon=eps_p - 1e-3))[3].real
    above = trivial_eigenvalues(p.replace(epsilon=eps_p + 1e-3))[3].real
    assert below > 0 > above
    assert trivial_eigenvalues(p.replace(epsilon=eps_p))[3].real == pytest.approx(0, abs=1e-12)


def test_ihss_ratio_and_branch():
    p = WEAK.with_eps_over_k1(3.0)
    ratios = ihss_ratios(p)
    assert ratios[1] == pytest.approx(-1.051054, abs=1e-6)
    branch = ihss_branch(p)
    assert len(branch) == 2
    for s in branch:
        s = np.asarray(s)
        assert np.linalg.norm(rhs(s, p)) < 1e-9
        np.testing.assert_allclose(s[2:], -s[:2], atol=1e-12)
        assert s[0] / s[1] == pytest.approx(ratios[1], rel=1e-8)
    np.testing.assert_allclose(branch[0], -np.asarray(branch[1]), atol=1e-12)


def test_no_ihss_without_coupling():
    assert ihss_branch(WEAK) == []


def test_classify_uncoupled_limit_cycle():
    rep = classify_attractor(WEAK, (1.5, 0.0, 1.4, 0.1))
    assert rep.classification == LIMIT_CYCLE
    # radius sqrt(k1 / (2 k2)), x1 peak-to-peak twice that
    assert rep.amplitude == pytest.approx(2 * math.sqrt(2.5), rel=1e-4)
    r2 = rep.state.x1 ** 2 + rep.state.y1 ** 2
    assert r2 == pytest.approx(2.5, abs=1e-6)


def test_classify_strong_coupling_settles_on_ihss():
    p = WEAK.with_eps_over_k1(5.0)
    rep = classify_attractor(p, (0.3, -0.2, 0.5, 0.1))
    assert rep.classification == STEADY_STATE
    assert rep.residual < 1e-9
    assert min(np.linalg.norm(np.subtract(rep.state, s)) for s in ihss_branch(p)) < 1e-6


def test_integrate_divergence_gives_nan():
    # an explicit step far beyond stability blows up and trips the guard
    out = integrate([1e4, 0, 0, 0], WEAK, 1.0, dt=0.5)
    assert np.isnan(out).all()


def test_kerr_scan_at_strong_coupling():
    rows = classical_sweeps(WEAK.with_eps_over_k1(3.0), "kerr", [2.0, 6.0])
    assert [r.classification for r in rows] == [STEADY_STATE, LIMIT_CYCLE]


def test_sweep_helpers():
    rows = [SweepRow(v, c, 0.0, None) for v, c in
            [(1.0, LIMIT_CYCLE), (1.5, LIMIT_CYCLE), (2.0, STEADY_STATE), (2.5, STEADY_STATE)]]
    assert lc_loss_point(rows) == 2.0
    assert od_retention_edge(rows[::-1]) == 2.0
    assert lc_loss_point(rows[:2]) is None


def test_sweep_validation_and_reverse_order():
    with pytest.raises(ValueError, match="ascending"):
        classical_sweeps(WEAK, "kerr", [2.0, 1.0])
    with pytest.raises(ValueError, match="cannot sweep"):
        classical_sweeps(WEAK, "omega", [1.0])
    rows = classical_sweeps(WEAK, "eps_over_k1", [4.5, 5.0], reverse=True,
                            t_transient=50.0, t_measure=10.0)
    assert [r.param for r in rows] == [5.0, 4.5]
