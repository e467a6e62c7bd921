"""Parameter types shared by the dynamical and spectral modules.

All rates are angular (rad/s).  Conversion from ordinary frequency happens at
the interfaces that speak Hz (CLI, presets), never inside the physics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["EffectiveCouplings", "DecayRates", "coupling_pair"]


def coupling_pair(c):
    """Resolve a couplings argument to a raw ``(xi1, xi2)`` complex pair.

    Accepts an :class:`EffectiveCouplings`, a plain pair (no
    magnitude-ordering constraint, for edge cases like zero coupling or
    stability studies), or ``None`` for the uncoupled case.
    """
    if c is None:
        return 0.0 + 0.0j, 0.0 + 0.0j
    if isinstance(c, EffectiveCouplings):
        return complex(c.xi1), complex(c.xi2)
    xi1, xi2 = c
    return complex(xi1), complex(xi2)


@dataclass(frozen=True)
class EffectiveCouplings:
    """The pair of effective coupling rates of the three-oscillator model.

    ``xi1`` is the pair-creation (cavity 1 <-> spin) rate and ``xi2`` the
    excitation-exchange (cavity 2 <-> spin) rate.  ``|xi2| > |xi1| > 0`` is
    required so that the oscillation rate ``theta = sqrt(|xi2|^2 - |xi1|^2)``
    is real and the target two-mode squeezed state is normalizable.
    """

    xi1: complex
    xi2: complex

    def __post_init__(self):
        x1, x2 = abs(complex(self.xi1)), abs(complex(self.xi2))
        if not x1 > 0:
            raise ValueError("|xi1| must be positive")
        if not x2 > x1:
            raise ValueError(f"|xi2| must exceed |xi1|, got |xi1|={x1:g}, |xi2|={x2:g}")

    @property
    def r(self) -> float:
        """Coupling ratio ``|xi2 / xi1|`` (> 1)."""
        return abs(complex(self.xi2)) / abs(complex(self.xi1))

    @property
    def theta(self) -> float:
        """Oscillation rate ``sqrt(|xi2|^2 - |xi1|^2)`` in rad/s."""
        return math.sqrt(abs(complex(self.xi2)) ** 2 - abs(complex(self.xi1)) ** 2)

    @classmethod
    def from_theta_r(cls, theta: float, r: float) -> "EffectiveCouplings":
        """Real, positive couplings with the given oscillation rate and ratio."""
        if theta <= 0:
            raise ValueError("theta must be positive")
        if r <= 1:
            raise ValueError("r must exceed 1")
        xi1 = theta / math.sqrt(r * r - 1.0)
        return cls(xi1, r * xi1)


@dataclass(frozen=True)
class DecayRates:
    """Cavity and collective-spin decay rates (rad/s).

    ``kappa1`` and ``kappa2`` are full-width (energy) decay rates; amplitudes
    damp at ``kappa/2``.  ``gamma_s`` is an extension knob for the spin mode
    and defaults to zero.
    """

    kappa1: float = 0.0
    kappa2: float = 0.0
    gamma_s: float = 0.0

    def __post_init__(self):
        for name in ("kappa1", "kappa2", "gamma_s"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    @classmethod
    def cavities(cls, kappa: float) -> "DecayRates":
        """Both cavities damped at the same rate, spin undamped."""
        return cls(kappa1=kappa, kappa2=kappa, gamma_s=0.0)
