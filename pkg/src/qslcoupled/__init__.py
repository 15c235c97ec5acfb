"""Attractive-repulsively coupled quantum Stuart-Landau oscillators.

Lindblad steady states and time evolution on a truncated two-mode Fock
space, Wigner-function lobe diagnostics, negativity and Renyi entropy, the
deterministic classical model and its noisy (Fokker-Planck / SDE) reduction.
"""

__version__ = "0.1.0"

from .params import DEEP, WEAK, SystemParams  # noqa: E402
from .fock import FockSpace  # noqa: E402

__all__ = ["SystemParams", "WEAK", "DEEP", "FockSpace", "__version__"]
