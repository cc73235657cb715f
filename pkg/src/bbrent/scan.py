"""Parameter-sweep engine for the entanglement figures and the R^3 law.

Grids evaluate the single-point pipeline kernels -> map -> entanglement
of formation cell by cell. Cells are pure, results land in preallocated
slots indexed by grid position, so values are independent of the worker
count and scheduling order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .constants import CODATA2018
from .entanglement import entanglement_of_formation
from .kernels import (
    KernelQuery,
    Strategy,
    TemperatureMode,
    evaluate_kernels,
    pin_cutoff,
)
from .params import PhysicalParams, derive_dimensionless
from .twoqubit import asymptotic_state, evolve, initial_product_state

__all__ = [
    "AxisSpec",
    "ScanGrid",
    "SearchWindowError",
    "scan_fig1",
    "scan_fig2",
    "scan_fig3",
    "predict_t1",
    "invert_t1_distance",
    "find_t1_numeric",
    "onset_contour",
    "write_grid_csv",
    "write_grid_pgm",
]

# Scans keep quadrature cells cheap; everything slower falls back to the
# closed forms, which the budget refusal path reports per cell. At the
# figure cutoffs (y_max ~ 4e3) the closed forms and quadrature agree in
# the final EoF to ~1e-9, so the budget is purely a runtime knob.
_SCAN_QUAD_BUDGET = 2.0e4

_STRATEGY_CODES = {"quadrature": b"Q", "closed_form_coth_one": b"C",
                   "long_time_asymptote": b"A", "trivial": b"T", "nan": b"X"}


class SearchWindowError(RuntimeError):
    """No entanglement maximum inside the requested search window."""


@dataclass(frozen=True)
class AxisSpec:
    """One grid axis. For scale='log10' the limits are log10 values and
    grid coordinates stay logarithmic; physical values are 10**coord."""

    name: str
    scale: str
    minimum: float
    maximum: float
    n: int

    def __post_init__(self) -> None:
        if self.scale not in ("linear", "log10"):
            raise ValueError(f"AxisSpec.scale must be linear or log10, got {self.scale}")
        if self.n < 2:
            raise ValueError("AxisSpec.n must be >= 2")
        if not self.maximum > self.minimum:
            raise ValueError("AxisSpec: maximum must exceed minimum")

    def coords(self) -> np.ndarray:
        return np.linspace(self.minimum, self.maximum, self.n)

    def values(self) -> np.ndarray:
        c = self.coords()
        return 10.0**c if self.scale == "log10" else c


@dataclass
class ScanGrid:
    """Entanglement values (n_y, n_x) plus axis metadata and provenance.

    provenance holds one byte per cell: Q(uadrature), C(losed form),
    A(symptote), T(rivial), X for a failed cell (value NaN).
    """

    x_axis: AxisSpec
    y_axis: AxisSpec
    values: np.ndarray
    provenance: np.ndarray
    params: Optional[PhysicalParams] = None
    meta: dict = field(default_factory=dict)

    def strategy_histogram(self) -> dict:
        codes, counts = np.unique(self.provenance, return_counts=True)
        return {bytes([c]).decode(): int(n) for c, n in zip(codes, counts)}


def _run_grid(cell: Callable[[float, float], tuple], xs, ys, threads: int) -> tuple:
    nx, ny = len(xs), len(ys)
    values = np.full((ny, nx), np.nan)
    prov = np.full((ny, nx), ord("X"), dtype=np.uint8)

    def run_row(iy: int):
        y = ys[iy]
        for ix, x in enumerate(xs):
            val, code = cell(x, y)
            values[iy, ix] = val
            prov[iy, ix] = ord(code)

    if threads <= 1:
        for iy in range(ny):
            run_row(iy)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run_row, range(ny)))
    return values, prov


def _eof_cell(t: float, t0: float, y_max: float, A: float, gamma: float,
              mode: TemperatureMode, quad_budget: float) -> tuple:
    try:
        k = evaluate_kernels(
            KernelQuery(t=t, t0=t0, y_max=y_max, temperature_mode=mode,
                        strategy=Strategy.AUTO, quad_budget=quad_budget)
        )
        state = evolve(initial_product_state(), k, A, gamma)
        e = entanglement_of_formation(state.matrix)
        return min(1.0, max(0.0, e)), _STRATEGY_CODES[k.strategy_used].decode()
    except Exception:
        return float("nan"), "X"


def scan_fig1(
    params: PhysicalParams,
    x_axis: AxisSpec | None = None,
    y_axis: AxisSpec | None = None,
    threads: int = 1,
    quad_budget: float = _SCAN_QUAD_BUDGET,
) -> ScanGrid:
    """Entanglement of formation over (log10 t0/tau, log10 t/tau).

    Thermal kernels at the configured temperature and cutoff; gamma is
    taken from params (1 = full physical coupling).
    """
    x_axis = x_axis or AxisSpec("log10(t0/tau)", "log10", 0.0, 5.0, 100)
    y_axis = y_axis or AxisSpec("log10(t/tau)", "log10", 0.0, 16.0, 100)
    d = derive_dimensionless(params)
    if params.zero_temperature:
        raise ValueError("scan_fig1 requires a finite temperature")

    def cell(x, y):
        return _eof_cell(10.0**y, 10.0**x, d.y_max, d.A, params.gamma,
                         TemperatureMode.THERMAL, quad_budget)

    values, prov = _run_grid(cell, x_axis.coords(), y_axis.coords(), threads)
    return ScanGrid(x_axis, y_axis, values, prov, params,
                    meta={"A": d.A, "y_max": d.y_max, "v": d.v})


def scan_fig2(
    alpha0: float = CODATA2018.alpha0,
    x_axis: AxisSpec | None = None,
    y_axis: AxisSpec | None = None,
    threads: int = 1,
) -> ScanGrid:
    """Long-time entanglement over (v, phi_minus); no kernels involved."""
    x_axis = x_axis or AxisSpec("v", "linear", 0.0, 100.0, 100)
    y_axis = y_axis or AxisSpec("phi_minus", "linear", 0.0, 2.0 * math.pi, 100)
    rho0 = initial_product_state()

    def cell(x, y):
        state = asymptotic_state(x, y, rho0, alpha0)
        e = entanglement_of_formation(state.matrix)
        return min(1.0, max(0.0, e)), "A"

    values, prov = _run_grid(cell, x_axis.coords(), y_axis.coords(), threads)
    return ScanGrid(x_axis, y_axis, values, prov, None, meta={"alpha0": alpha0})


def scan_fig3(
    params: PhysicalParams,
    x_axis: AxisSpec | None = None,
    y_axis: AxisSpec | None = None,
    threads: int = 1,
    quad_budget: float = _SCAN_QUAD_BUDGET,
) -> ScanGrid:
    """Entanglement over (gamma, log10 t/tau) at the separation fixed by
    params (the reference picture uses t0 = 1e6 tau)."""
    x_axis = x_axis or AxisSpec("gamma", "linear", 0.0, 1.0, 100)
    y_axis = y_axis or AxisSpec("log10(t/tau)", "log10", 0.0, 8.0, 100)
    d = derive_dimensionless(params)
    if params.zero_temperature:
        raise ValueError("scan_fig3 requires a finite temperature")

    def cell(x, y):
        return _eof_cell(10.0**y, d.t0_over_tau, d.y_max, d.A, x,
                         TemperatureMode.THERMAL, quad_budget)

    values, prov = _run_grid(cell, x_axis.coords(), y_axis.coords(), threads)
    return ScanGrid(x_axis, y_axis, values, prov, params,
                    meta={"A": d.A, "y_max": d.y_max, "t0_over_tau": d.t0_over_tau})


def predict_t1(params: PhysicalParams) -> float:
    """First-maximum time (s) from the closed law
    t1 = (pi / 2 alpha0) (R^2/d^2) (R/c0)."""
    c = params.constants
    return (
        math.pi / (2.0 * c.alpha0)
        * params.separation_m**2 / params.dipole_m**2
        * params.separation_m / c.c0
    )


def invert_t1_distance(dipole_m: float, t1_seconds: float,
                       constants=CODATA2018) -> float:
    """Separation R (m) at which the first maximum arrives at t1."""
    if not (dipole_m > 0.0 and t1_seconds > 0.0):
        raise ValueError("invert_t1_distance: arguments must be > 0")
    return (2.0 * constants.alpha0 * dipole_m**2 * constants.c0 * t1_seconds
            / math.pi) ** (1.0 / 3.0)


def _eof_of_t(params: PhysicalParams, t: float, y_pinned: float, derived) -> float:
    k = evaluate_kernels(
        KernelQuery(t=t, t0=derived.t0_over_tau, y_max=y_pinned,
                    temperature_mode=TemperatureMode.THERMAL,
                    strategy=Strategy.AUTO, quad_budget=_SCAN_QUAD_BUDGET)
    )
    state = evolve(initial_product_state(), k, derived.A, params.gamma)
    return entanglement_of_formation(state.matrix)


def find_t1_numeric(
    params: PhysicalParams,
    t_min_over_tau: float | None = None,
    t_max_over_tau: float | None = None,
    n_coarse: int = 400,
    rel_tol: float = 1e-5,
) -> float:
    """First maximum of EoF(t) located numerically; returns seconds.

    Coarse bracketing on a log grid followed by golden-section
    refinement. The cutoff is pinned so y_max t0 is a multiple of pi
    (removes the sharp-cutoff ripple that would jitter the bracket).
    Candidate maxima below EoF = 0.01 are ignored as ripple.
    """
    d = derive_dimensionless(params)
    if params.zero_temperature:
        raise ValueError("find_t1_numeric requires a finite temperature")
    predicted = predict_t1(params) / d.tau
    lo = t_min_over_tau if t_min_over_tau is not None else predicted / 30.0
    hi = t_max_over_tau if t_max_over_tau is not None else predicted * 30.0
    if not 0.0 < lo < hi:
        raise SearchWindowError(f"invalid search window [{lo}, {hi}]")
    y_pinned = pin_cutoff(d.y_max, d.t0_over_tau)

    grid = np.logspace(math.log10(lo), math.log10(hi), n_coarse)
    eof = np.array([_eof_of_t(params, t, y_pinned, d) for t in grid])
    bracket = None
    for i in range(1, n_coarse - 1):
        if eof[i] >= eof[i - 1] and eof[i] >= eof[i + 1] and eof[i] > 0.01:
            bracket = (grid[i - 1], grid[i], grid[i + 1])
            break
    if bracket is None:
        raise SearchWindowError(
            f"no entanglement maximum above 0.01 in t/tau within [{lo:.3e}, {hi:.3e}]"
        )

    # golden-section maximization on log t
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = math.log(bracket[0]), math.log(bracket[2])
    c = b - invphi * (b - a)
    dd = a + invphi * (b - a)
    fc = _eof_of_t(params, math.exp(c), y_pinned, d)
    fd = _eof_of_t(params, math.exp(dd), y_pinned, d)
    while (b - a) > rel_tol:
        if fc >= fd:
            b, dd, fd = dd, c, fc
            c = b - invphi * (b - a)
            fc = _eof_of_t(params, math.exp(c), y_pinned, d)
        else:
            a, c, fc = c, dd, fd
            dd = a + invphi * (b - a)
            fd = _eof_of_t(params, math.exp(dd), y_pinned, d)
    t_star = math.exp(0.5 * (a + b))
    return t_star * d.tau


def onset_contour(grid: ScanGrid, level: float = 0.01):
    """First y-coordinate per column where values crosses level upward.

    Returns (x_coords, y_onsets) with NaN where the column never
    crosses. With log axes the pair is ready for a straight-line fit.
    """
    xs = grid.x_axis.coords()
    ys = grid.y_axis.coords()
    onset = np.full(xs.shape, np.nan)
    vals = grid.values
    for ix in range(xs.size):
        col = vals[:, ix]
        above = np.nonzero(col >= level)[0]
        if above.size:
            onset[ix] = ys[above[0]]
    return xs, onset


def write_grid_csv(grid: ScanGrid, path) -> None:
    """x, y, EoF rows; numbers as shortest round-trip decimals."""
    xs = grid.x_axis.coords()
    ys = grid.y_axis.coords()
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"{grid.x_axis.name},{grid.y_axis.name},eof\n")
        for iy in range(ys.size):
            for ix in range(xs.size):
                fh.write(f"{xs[ix]!r},{ys[iy]!r},{grid.values[iy, ix]!r}\n")


def write_grid_pgm(grid: ScanGrid, path) -> None:
    """8-bit binary PGM, 255 - round(255 EoF): black = perfect
    entanglement, white = none. Rows run from the top of the y axis
    down; failed (NaN) cells render white."""
    vals = np.nan_to_num(grid.values, nan=0.0)
    img = 255 - np.rint(255.0 * np.clip(vals, 0.0, 1.0)).astype(np.uint8)
    img = img[::-1, :]   # y axis increases upward in the figure
    header = f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(img.tobytes())
