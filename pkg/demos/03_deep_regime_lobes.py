"""
Lobe distance in the deep quantum regime
========================================

With strong two-phonon damping (k2 = 3 k1) the steady state has few
phonons.  Sweeping the coupling, the Wigner function of one oscillator goes
from a ring to two lobes; the lobes sit much closer together than in the
weak regime.
"""

import numpy as np

from qslcoupled import DEEP
from qslcoupled.wigner import DEEP_GRID, lobe_sweep

sweep = lobe_sweep(DEEP, np.round(np.arange(0.6, 1.51, 0.1), 2), n_max=8, grid=DEEP_GRID)
for pt in sweep.points:
    rep = pt.report
    print(f"eps/k1={pt.eps_over_k1:4.2f}  {rep.classification:<17} "
          f"delta_y={rep.delta_y:.3f}  ring contrast={rep.ring_contrast:.3f}")
print("first bimodal point:", sweep.transition)
