"""Physical constants (CODATA-2018, SI units).

Everything downstream works in dimensionless variables; SI values enter
only through :mod:`bbrent.params`, which derives the dimensionless
quantities from these constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    """Frozen constant set.

    alpha0    -- fine-structure constant (dimensionless)
    c0        -- speed of light in vacuum (m/s)
    hbar      -- reduced Planck constant (J s)
    kB        -- Boltzmann constant (J/K)
    eps0      -- vacuum permittivity (F/m)
    e_charge  -- elementary charge (C)
    """

    alpha0: float
    c0: float
    hbar: float
    kB: float
    eps0: float
    e_charge: float

    def alpha0_from_base(self) -> float:
        """alpha0 recomputed from e, eps0, hbar, c0 (self-consistency check)."""
        return self.e_charge**2 / (4.0 * math.pi * self.eps0 * self.hbar * self.c0)


# 2018 CODATA adjustment; eps0 is the recommended measured value.
CODATA2018 = PhysicalConstants(
    alpha0=7.2973525693e-3,
    c0=2.99792458e8,
    hbar=1.054571817e-34,
    kB=1.380649e-23,
    eps0=8.8541878128e-12,
    e_charge=1.602176634e-19,
)

CONSTANT_SET_ID = "CODATA-2018"
