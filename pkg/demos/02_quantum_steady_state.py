"""
Quantum steady states in the weak quantum regime
================================================

Build the Lindblad generator of the two coupled quantum oscillators, solve
for its steady state, and look at the reduced state of one oscillator: a
ring-shaped Wigner function at weak coupling, two separated lobes (quantum
oscillation death) at strong coupling.

Truncation n_max=12 keeps this demo under a minute; the acceptance suite
uses n_max=16.
"""

import warnings

from qslcoupled import WEAK
from qslcoupled.diagnostics import quantum_point
from qslcoupled.wigner import WEAK_GRID

warnings.simplefilter("ignore", RuntimeWarning)

n_max = 12
for ratio in (0.01, 0.5, 3.0):
    q = quantum_point(WEAK.with_eps_over_k1(ratio), n_max, WEAK_GRID)
    print(f"eps/k1={ratio:<5} <n1>={q.mean_phonon_1:.4f}  {q.classification:<17}"
          f" delta_y={q.delta_y:.2f}  ring contrast={q.ring_contrast:.3f}")

# The Kerr term restores the oscillation at fixed coupling
for kerr in (2.0, 6.0):
    q = quantum_point(WEAK.replace(kerr=kerr).with_eps_over_k1(3.0), n_max, WEAK_GRID)
    print(f"K={kerr}: {q.classification}")
