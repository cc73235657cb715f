"""Two-dot reduced state and its exact elementwise evolution map.

In the product basis |00>, |01>, |10>, |11> (row index = bra side) the
map multiplies each density-matrix entry by

    exp( -A (f1 C + gamma f2 S) + i A (phi1 Ct + gamma phi2 St) )

with the constant integer matrices S, C, St, Ct below. C and S are
symmetric with zero diagonal, so populations and the trace never move;
Ct = -St is antisymmetric, which keeps the map Hermiticity-preserving
and makes the phase part depend only on phi1 - phi2 at full coupling.
gamma in [0, 1] scales the sin-wave bath (f2 and phi2 together).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import CODATA2018
from .kernels import BathKernels, KernelQuery, Strategy, TemperatureMode, evaluate_kernels, pin_cutoff
from .params import DerivedQuantities, PhysicalParams, derive_dimensionless

__all__ = [
    "CouplingMatrices",
    "COUPLING",
    "DensityMatrix4",
    "initial_product_state",
    "evolve",
    "asymptotic_state",
    "consistency_check_asymptotic",
]

_S = np.array(
    [
        [0, 1, 1, 0],
        [1, 0, 4, 1],
        [1, 4, 0, 1],
        [0, 1, 1, 0],
    ],
    dtype=int,
)
_C = np.array(
    [
        [0, 1, 1, 4],
        [1, 0, 0, 1],
        [1, 0, 0, 1],
        [4, 1, 1, 0],
    ],
    dtype=int,
)
_ST = np.array(
    [
        [0, -1, -1, 0],
        [1, 0, 0, 1],
        [1, 0, 0, 1],
        [0, -1, -1, 0],
    ],
    dtype=int,
)


@dataclass(frozen=True)
class CouplingMatrices:
    """The four constant coupling matrices of the evolution map."""

    S: np.ndarray
    C: np.ndarray
    S_tilde: np.ndarray
    C_tilde: np.ndarray


def _frozen(a: np.ndarray) -> np.ndarray:
    a = a.copy()
    a.setflags(write=False)
    return a


COUPLING = CouplingMatrices(
    S=_frozen(_S), C=_frozen(_C), S_tilde=_frozen(_ST), C_tilde=_frozen(-_ST)
)


@dataclass(frozen=True)
class DensityMatrix4:
    """4x4 two-qubit density matrix over |00>, |01>, |10>, |11>.

    Construction checks Hermiticity and unit trace (cheap); positivity
    is a property of valid dynamics and is asserted where it matters.
    """

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError(f"DensityMatrix4: expected 4x4, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > 1e-10:
            raise ValueError("DensityMatrix4: matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > 1e-10:
            raise ValueError(f"DensityMatrix4: trace {np.trace(m).real} != 1")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def min_eigenvalue(self) -> float:
        from .entanglement import hermitian_eigen

        return float(hermitian_eigen(self.matrix).eigenvalues[-1])


def initial_product_state() -> DensityMatrix4:
    """(|0> + |1>)(x)(|0> + |1>)/2 as a density matrix: all entries 1/4."""
    return DensityMatrix4(np.full((4, 4), 0.25, dtype=complex))


def evolve(
    rho0: DensityMatrix4,
    k: BathKernels,
    A: float,
    gamma: float = 1.0,
) -> DensityMatrix4:
    """Apply the exact elementwise map for one kernel evaluation.

    The damping exponent A (f1 C + gamma f2 S) is symmetric and the
    phase A (phi1 Ct + gamma phi2 St) antisymmetric, so Hermiticity,
    trace and all four populations are preserved identically.

    Because Ct = -St, the phase matrix equals
    A ((gamma - 1) phi2 - (phi1 - phi2)) St, and it is assembled from
    phi2 and the stored phi_minus in exactly that form: at full coupling
    the huge individual phases phi1, phi2 (which grow like t y_max^3)
    cancel analytically, and subtracting them in floating point would
    wipe out the physical phase difference for t y_max^3 beyond 1e15.
    """
    if not A >= 0.0:
        raise ValueError(f"evolve: A must be >= 0, got {A}")
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"evolve: gamma must lie in [0, 1], got {gamma}")
    damp = A * (k.f1 * _C + gamma * k.f2 * _S)
    phase = A * ((gamma - 1.0) * k.phi2 - k.phi_minus) * _ST
    factor = np.exp(-damp + 1j * phase)
    return DensityMatrix4(factor * rho0.matrix)


def asymptotic_state(
    v: float,
    phi_minus: float,
    rho0: DensityMatrix4,
    alpha0: float = CODATA2018.alpha0,
) -> DensityMatrix4:
    """Long-time state for t >> t0 >> 1 at full coupling.

    Only two variables survive in that regime: the damping strength
    v = omega_max d / c0 entering through exp(-(alpha0/12 pi) v^2 (S+C)),
    and the accumulated phase phi_minus = A (phi1 - phi2) entering as a
    pure phase on Ct. Equivalent to evolve() with f1 = f2 = y_max^2/6
    and A y_max^2/6 identified with (alpha0/12 pi) v^2.
    """
    if not v >= 0.0:
        raise ValueError(f"asymptotic_state: v must be >= 0, got {v}")
    damp = (alpha0 / (12.0 * math.pi)) * v * v * (_S + _C)
    factor = np.exp(-damp + 1j * phi_minus * (-_ST))
    return DensityMatrix4(factor * rho0.matrix)


def damping_v_from_kernels(A: float, y_max: float, alpha0: float = CODATA2018.alpha0) -> float:
    """v that makes the asymptotic map damping equal A y_max^2/6."""
    return y_max * math.sqrt(2.0 * math.pi * A / alpha0)


def consistency_check_asymptotic(
    params: PhysicalParams,
    t: float,
    t0: float,
    derived: DerivedQuantities | None = None,
) -> dict:
    """Cross-validate evolve() against asymptotic_state() at t >> t0 >> 1.

    Runs the full kernel pipeline at (t, t0) with the cutoff pinned so
    y_max t0 is a multiple of pi, maps the canonical initial state both
    ways, and reports the maximum entrywise modulus difference.
    """
    if params.gamma != 1.0:
        raise ValueError("consistency check requires full coupling (gamma = 1)")
    if not t0 >= 10.0 or not t >= 100.0 * t0:
        raise ValueError("consistency check requires the regime t >> t0 >> 1")
    d = derived if derived is not None else derive_dimensionless(params)
    y_pinned = pin_cutoff(d.y_max, t0)
    query = KernelQuery(
        t=t,
        t0=t0,
        y_max=y_pinned,
        temperature_mode=TemperatureMode.THERMAL,
        strategy=Strategy.LONG_TIME_ASYMPTOTE,
    )
    k = evaluate_kernels(query)
    rho0 = initial_product_state()
    full = evolve(rho0, k, d.A, 1.0)
    v_eff = damping_v_from_kernels(d.A, y_pinned, params.constants.alpha0)
    asym = asymptotic_state(
        v_eff, d.A * k.phi_minus, rho0, params.constants.alpha0
    )
    diff = float(np.max(np.abs(full.matrix - asym.matrix)))
    return {
        "t": t,
        "t0": t0,
        "y_max_pinned": y_pinned,
        "v_effective": v_eff,
        "max_entry_difference": diff,
        "kernels": k,
    }
