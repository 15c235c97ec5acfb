"""Model constants shared by the classical, quantum and noisy models."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

__all__ = ["SystemParams", "WEAK", "DEEP"]


@dataclass(frozen=True)
class SystemParams:
    """Parameters of two identical Stuart-Landau oscillators.

    Attributes
    ----------
    omega : float
        Eigenfrequency.
    k1 : float
        Linear pumping (one-phonon gain) rate, ``> 0``.
    k2 : float
        Nonlinear damping (two-phonon absorption) rate, ``> 0``.
    kerr : float
        Kerr / non-isochronicity parameter ``K``.
    epsilon : float
        Attractive-repulsive coupling strength, ``>= 0``.
    """

    omega: float = 2.0
    k1: float = 1.0
    k2: float = 0.2
    kerr: float = 1.0
    epsilon: float = 0.0

    def __post_init__(self):
        for name in ("omega", "k1", "k2", "kerr", "epsilon"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise TypeError(f"{name} must be a real number, got {v!r}")
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
        if self.k1 <= 0:
            raise ValueError(f"k1 must be > 0, got {self.k1}")
        if self.k2 <= 0:
            raise ValueError(f"k2 must be > 0, got {self.k2}")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")

    @property
    def regime(self) -> str:
        """``'weak'`` when pumping dominates (k1 > k2), ``'deep'`` when
        damping dominates (k2 > k1), ``'balanced'`` otherwise."""
        if self.k1 > self.k2:
            return "weak"
        if self.k2 > self.k1:
            return "deep"
        return "balanced"

    @property
    def eps_over_k1(self) -> float:
        return self.epsilon / self.k1

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    def with_eps_over_k1(self, ratio: float) -> "SystemParams":
        return self.replace(epsilon=float(ratio) * self.k1)

    def asdict(self) -> dict:
        return dataclasses.asdict(self)


WEAK = SystemParams(omega=2.0, k1=1.0, k2=0.2, kerr=1.0, epsilon=0.0)
DEEP = SystemParams(omega=2.0, k1=1.0, k2=3.0, kerr=1.0, epsilon=0.0)
