"""Per-parameter-point analysis of the quantum steady state."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .liouvillian import steady_state_for
from .observables import mean_phonon, negativity, partial_trace, renyi2
from .params import SystemParams
from .wigner import PhaseGrid, lobe_report, wigner

__all__ = ["QuantumPoint", "quantum_point", "entanglement_point"]


@dataclass
class QuantumPoint:
    eps_over_k1: float
    kerr: float
    mean_phonon_1: float
    mean_phonon_2: float
    delta_y: float
    classification: str
    negativity: float
    renyi2: float
    distance: float = 0.0
    ring_contrast: float = 0.0


def quantum_point(p: SystemParams, n_max: int, grid: PhaseGrid,
                  ring_contrast: float = 0.75) -> QuantumPoint:
    rho = steady_state_for(p, n_max)
    reduced = partial_trace(rho, 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        report = lobe_report(wigner(reduced, grid), ring_contrast=ring_contrast)
    return QuantumPoint(
        eps_over_k1=p.eps_over_k1,
        kerr=p.kerr,
        mean_phonon_1=mean_phonon(rho, 1),
        mean_phonon_2=mean_phonon(rho, 2),
        delta_y=report.delta_y,
        classification=report.classification,
        negativity=negativity(rho),
        renyi2=renyi2(reduced),
        distance=report.distance,
        ring_contrast=report.ring_contrast,
    )


def entanglement_point(p: SystemParams, n_max: int) -> tuple[float, float]:
    """``(negativity, site-1 Renyi-2 entropy)`` of the steady state."""
    rho = steady_state_for(p, n_max)
    return negativity(rho), renyi2(partial_trace(rho, 1))
