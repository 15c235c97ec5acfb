"""
Noisy classical model
=====================

In the weak quantum regime the master equation reduces to a Fokker-Planck
equation whose Langevin form is integrated here with Euler-Maruyama.  The
ensemble-averaged amplitude dips at moderate coupling and rises beyond
eps/k1 of about 2, where the quantum noise keeps the oscillators from dying.

A short ensemble keeps the demo quick; standard errors are printed.
"""

from qslcoupled import WEAK
from qslcoupled.sde import SdeConfig, default_initial, ensemble_amplitude, simulate

cfg = SdeConfig(dt=2e-3, n_steps=40_000, n_trajectories=40, record_every=50)
for ratio in (0.01, 1.0, 2.0, 3.0, 4.0):
    res = ensemble_amplitude(WEAK.with_eps_over_k1(ratio), cfg)
    print(f"eps/k1={ratio:4.2f}  <|alpha1|^2> = {res.mean:.3f} +- {res.std_err:.3f}")

# Without noise the uncoupled oscillator settles on Euler's invariant circle,
# which approaches k1/(2 k2) + 1 = 3.5 as dt -> 0
for dt in (2e-3, 1e-3, 5e-4):
    zero = SdeConfig(dt=dt, n_steps=int(60 / dt), record_every=int(1 / dt))
    _, X = simulate(WEAK, zero, default_initial(WEAK), noise=False)
    print(f"dt={dt:g}: zero-noise radius^2 = {X[-1, 0] ** 2 + X[-1, 1] ** 2:.5f}")
