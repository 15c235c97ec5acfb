"""
Entanglement and Renyi entropy in the deep quantum regime
=========================================================

The negativity (from the partial transpose) is zero for
the uncoupled product state and grows with the coupling.  The second-order
Renyi entropy of one oscillator peaks at intermediate coupling and then
settles at a value above the uncoupled one.

Truncation matters here: at n_max=10 the entropy creeps back up at the
largest couplings, so n_max=12 is used.
"""

from qslcoupled import DEEP
from qslcoupled.diagnostics import entanglement_point

for ratio in (0.0, 1.0, 2.0, 3.0, 4.0, 6.0):
    neg, sr = entanglement_point(DEEP.with_eps_over_k1(ratio), n_max=12)
    print(f"eps/k1={ratio:3.1f}  negativity={neg:.5f}  S_R={sr:.4f}")
