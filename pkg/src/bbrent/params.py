"""Simulation parameters and derived dimensionless quantities.

Times are handled in units of the thermal time tau = hbar/(kB*T); at
T = 0 the light travel time t0 = R/c0 takes over as the time unit and
the damping prefactor uses t0 instead of tau.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

from .constants import CODATA2018, PhysicalConstants


class ParameterDomainError(ValueError):
    """A physical parameter is outside its admissible domain."""


class UnsupportedModeError(ValueError):
    """Operation not defined for this temperature mode."""


class CutoffKind(enum.Enum):
    SHARP = "sharp"
    POWER_LAW = "power_law"


@dataclass(frozen=True)
class CutoffSpec:
    """UV cutoff family: unity below y_max, then 0 (sharp) or (y/y_max)^-p.

    The power-law exponent must satisfy p > 2 or the damping integrals
    acquire a divergent tail.
    """

    kind: CutoffKind = CutoffKind.SHARP
    p: Optional[float] = None

    def __post_init__(self) -> None:
        if self.kind is CutoffKind.POWER_LAW:
            if self.p is None:
                raise ParameterDomainError("cutoff_p: required for power_law cutoff")
            if not self.p > 2.0:
                raise ParameterDomainError(
                    f"cutoff_p: must be > 2 (divergent tail otherwise), got {self.p}"
                )
        elif self.p is not None:
            raise ParameterDomainError("cutoff_p: only meaningful for power_law cutoff")

    def factor(self, y, y_max: float):
        """Cutoff function C(y) evaluated elementwise (numpy-compatible)."""
        import numpy as np

        y = np.asarray(y, dtype=float)
        if self.kind is CutoffKind.SHARP:
            return np.where(y <= y_max, 1.0, 0.0)
        return np.where(y <= y_max, 1.0, (np.maximum(y, y_max) / y_max) ** (-self.p))


SHARP_CUTOFF = CutoffSpec(CutoffKind.SHARP)


@dataclass(frozen=True)
class PhysicalParams:
    """SI inputs of a run.

    temperature_K  -- bath temperature; 0 selects the zero-temperature mode
    dipole_m       -- dipole moment of each dot divided by the electron charge
    separation_m   -- distance between the two dots
    omega_max      -- angular cutoff frequency of the bath (rad/s)
    gamma          -- relative coupling strength to the sin-wave bath, in [0, 1]
    cutoff         -- cutoff family applied above omega_max
    """

    temperature_K: float
    dipole_m: float
    separation_m: float
    omega_max: float
    gamma: float = 1.0
    cutoff: CutoffSpec = field(default_factory=lambda: SHARP_CUTOFF)
    constants: PhysicalConstants = CODATA2018

    def __post_init__(self) -> None:
        if not self.temperature_K >= 0.0:
            raise ParameterDomainError(f"temperature_K: must be >= 0, got {self.temperature_K}")
        if not self.dipole_m > 0.0:
            raise ParameterDomainError(f"dipole_nm: must be > 0, got {self.dipole_m}")
        if not self.separation_m > 0.0:
            raise ParameterDomainError(f"separation_m: must be > 0, got {self.separation_m}")
        if not self.omega_max > 0.0:
            raise ParameterDomainError(f"omega_max: must be > 0, got {self.omega_max}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ParameterDomainError(f"gamma: must lie in [0, 1], got {self.gamma}")

    @property
    def zero_temperature(self) -> bool:
        return self.temperature_K == 0.0


@dataclass(frozen=True)
class DerivedQuantities:
    """Dimensionless quantities derived from :class:`PhysicalParams`.

    tau           -- thermal time hbar/(kB*T) in seconds (None at T = 0)
    t0_seconds    -- light travel time R/c0
    t0_over_tau   -- t0 in units of the time unit (t0/tau, or 1.0 at T = 0)
    y_max         -- omega_max * tau (finite T) or omega_max * t0 (T = 0)
    v             -- omega_max * d / c0
    A             -- damping prefactor alpha0 d^2/(pi c0^2 tau^2), tau -> t0 at T = 0
    """

    tau: Optional[float]
    t0_seconds: float
    t0_over_tau: float
    y_max: float
    v: float
    A: float


def derive_dimensionless(params: PhysicalParams) -> DerivedQuantities:
    """Translate SI parameters into the dimensionless kernel inputs."""
    c = params.constants
    t0_seconds = params.separation_m / c.c0
    v = params.omega_max * params.dipole_m / c.c0
    if params.zero_temperature:
        time_unit = t0_seconds
        tau = None
        t0_over_tau = 1.0
    else:
        tau = c.hbar / (c.kB * params.temperature_K)
        time_unit = tau
        t0_over_tau = t0_seconds / tau
    y_max = params.omega_max * time_unit
    A = c.alpha0 * params.dipole_m**2 / (math.pi * c.c0**2 * time_unit**2)
    return DerivedQuantities(
        tau=tau,
        t0_seconds=t0_seconds,
        t0_over_tau=t0_over_tau,
        y_max=y_max,
        v=v,
        A=A,
    )


def c_constant(params: PhysicalParams) -> float:
    """Coefficient c in the entanglement onset law t/tau < c (t0/tau)^3.

    Equal to 1/(2A); of order 1e12 for CMB temperature and d = 10 nm.
    Not defined at T = 0 (no thermal time scale).
    """
    if params.zero_temperature:
        raise UnsupportedModeError("c_constant: undefined in the T=0 mode (tau diverges)")
    return 1.0 / (2.0 * derive_dimensionless(params).A)


def params_from_dimensionless(
    temperature_K: float,
    dipole_m: float,
    t0_over_tau: float,
    y_max: Optional[float] = None,
    omega_max: Optional[float] = None,
    gamma: float = 1.0,
    cutoff: CutoffSpec = SHARP_CUTOFF,
    constants: PhysicalConstants = CODATA2018,
) -> PhysicalParams:
    """Build params from (t0/tau, y_max) instead of SI separation/frequency."""
    if temperature_K <= 0.0:
        raise ParameterDomainError("t0_over_tau: requires a finite temperature")
    tau = constants.hbar / (constants.kB * temperature_K)
    if (y_max is None) == (omega_max is None):
        raise ParameterDomainError("y_max: exactly one of y_max / omega_max required")
    if omega_max is None:
        omega_max = y_max / tau
    separation_m = t0_over_tau * tau * constants.c0
    return PhysicalParams(
        temperature_K=temperature_K,
        dipole_m=dipole_m,
        separation_m=separation_m,
        omega_max=omega_max,
        gamma=gamma,
        cutoff=cutoff,
        constants=constants,
    )
