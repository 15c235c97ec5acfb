"""
Classical oscillators: pitchfork, inhomogeneous steady states, hysteresis
=========================================================================

Two Stuart-Landau oscillators with attractive-repulsive coupling.  The
origin loses stability through a pitchfork, a pair of anti-symmetric steady
states appears, and sweeping the coupling up and down shows a window where
the limit cycle and the oscillation-death state coexist.
"""

import numpy as np

from qslcoupled import WEAK
from qslcoupled.classical import (classical_sweeps, ihss_branch, lc_loss_point,
                                  od_retention_edge, pitchfork_epsilon,
                                  trivial_eigenvalues)

# Weak quantum regime parameters: w=2, k1=1, k2=0.2, K=1
p = WEAK
eps_p = pitchfork_epsilon(p)
print(f"pitchfork at eps/k1 = {eps_p:.6f}")

# the real eigenvalue k1/2 - sqrt(4 eps^2 - w^2) crosses zero there
for eps in (eps_p - 0.05, eps_p + 0.05):
    lam = trivial_eigenvalues(p.replace(epsilon=eps))
    print(f"  eps={eps:.4f}  eigenvalues at origin: {np.round(lam, 4)}")

# Inhomogeneous steady states (x*, y*, -x*, -y*) at strong coupling
for state in ihss_branch(p.with_eps_over_k1(3.0)):
    print("IHSS at eps/k1=3:", np.round(state, 6))

# Forward and backward sweeps with continuation expose the hysteresis
up = classical_sweeps(p, "eps_over_k1", np.round(np.arange(1.5, 2.21, 0.05), 2))
down = classical_sweeps(p, "eps_over_k1", np.round(np.arange(1.3, 3.01, 0.05), 2),
                        reverse=True)
print(f"forward sweep loses the limit cycle at eps/k1 = {lc_loss_point(up)}")
print(f"backward sweep keeps oscillation death down to eps/k1 = {od_retention_edge(down)}")
