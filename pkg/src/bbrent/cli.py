"""Command-line interface.

Subcommands: kernels, evolve, eof, scan-fig1, scan-fig2, scan-fig3,
predict-t1, find-t1, eff-int. Exit codes: 0 success, 1 I/O failure,
2 configuration error (message names the key), 3 numerical-strategy
refusal (kernel diagnostic attached).
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .config import ConfigError, build_params, echo_params, read_config_file
from .constants import CODATA2018, CONSTANT_SET_ID
from .entanglement import NotAStateError, concurrence, entanglement_of_formation
from .effint import (
    GeometryError,
    ModeSumConfig,
    analytic_dipole_coefficient,
    convergence_study,
    mode_sum_extrapolated,
)
from .kernels import (
    KernelQuery,
    OscillationBudgetError,
    Strategy,
    StrategyConfigError,
    TemperatureMode,
    evaluate_kernels,
)
from .params import ParameterDomainError, derive_dimensionless
from .quadrature import QuadratureError
from .scan import (
    AxisSpec,
    SearchWindowError,
    find_t1_numeric,
    invert_t1_distance,
    predict_t1,
    scan_fig1,
    scan_fig2,
    scan_fig3,
    write_grid_csv,
    write_grid_pgm,
)
from .twoqubit import evolve, initial_product_state

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONFIG = 2
EXIT_NUMERICS = 3


@dataclass
class RunManifest:
    """Record of one CLI run; written atomically after the outputs."""

    command: str
    config: dict
    outputs: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    started_utc: str = ""
    finished_utc: str = ""

    def write(self, out_dir: str) -> str:
        self.finished_utc = _now()
        payload = {
            "tool": "bbrent",
            "version": __version__,
            "constants": CONSTANT_SET_ID,
            "command": self.command,
            "started_utc": self.started_utc,
            "finished_utc": self.finished_utc,
            "config": self.config,
            "outputs": self.outputs,
            "warnings": self.warnings,
        }
        payload.update(self.extra)
        for name in self.outputs:
            if not os.path.exists(os.path.join(out_dir, name)):
                raise OSError(f"manifest lists missing output {name}")
        path = os.path.join(out_dir, "manifest.json")
        fd, tmp = tempfile.mkstemp(dir=out_dir, suffix=".manifest.tmp")
        try:
            with os.fdopen(fd, "w", encoding="ascii") as fh:
                json.dump(payload, fh, indent=2, sort_keys=True)
                fh.write("\n")
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return path


def _now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def _ensure_out(out_dir: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    return out_dir


def _parse_range(spec: str) -> np.ndarray:
    """'min:max:n[:log]' or a comma list of plain numbers."""
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] != "log"):
            raise ConfigError(f"range: expected min:max:n[:log], got {spec!r}")
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        if n < 1 or not hi >= lo:
            raise ConfigError(f"range: bad bounds in {spec!r}")
        if len(parts) == 4:
            return np.logspace(math.log10(lo), math.log10(hi), n)
        return np.linspace(lo, hi, n)
    return np.array([float(x) for x in spec.split(",")])


def _parse_vec(spec: str) -> np.ndarray:
    v = np.array([float(x) for x in spec.split(",")])
    if v.shape != (3,):
        raise ConfigError(f"vector: expected x,y,z, got {spec!r}")
    return v


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("physical parameters (override --config keys)")
    g.add_argument("--config", metavar="PATH", help="flat key = value configuration file")
    g.add_argument("--temperature-k", type=float, help="bath temperature (K); 0 = vacuum mode")
    g.add_argument("--dipole-nm", type=float, help="dipole length d (nm)")
    g.add_argument("--separation-m", type=float, help="dot separation R (m)")
    g.add_argument("--t0-over-tau", type=float, help="separation as light time over thermal time")
    g.add_argument("--cutoff-ev", type=float, help="UV cutoff hbar*omega_max (eV)")
    g.add_argument("--y-max", type=float, help="UV cutoff omega_max*tau (dimensionless)")
    g.add_argument("--gamma", type=float, help="sin-wave bath coupling fraction in [0, 1]")
    g.add_argument("--cutoff-kind", choices=["sharp", "power_law"], help="cutoff family")
    g.add_argument("--cutoff-p", type=float, help="power-law exponent (> 2)")


def _merged_config(args) -> dict:
    mapping: dict = {}
    if args.config:
        mapping.update(read_config_file(args.config))
    overrides = {
        "temperature_K": args.temperature_k,
        "dipole_nm": args.dipole_nm,
        "separation_m": args.separation_m,
        "t0_over_tau": args.t0_over_tau,
        "cutoff_eV": args.cutoff_ev,
        "y_max": args.y_max,
        "gamma": args.gamma,
        "cutoff_kind": args.cutoff_kind,
        "cutoff_p": args.cutoff_p,
    }
    for key, value in overrides.items():
        if value is not None:
            mapping[key] = value
    # flags may override a config that already set the sibling key
    if args.separation_m is not None:
        mapping.pop("t0_over_tau", None) if args.t0_over_tau is None else None
    if args.t0_over_tau is not None and args.separation_m is None:
        mapping.pop("separation_m", None)
    if args.cutoff_ev is not None and args.y_max is None:
        mapping.pop("y_max", None)
    if args.y_max is not None and args.cutoff_ev is None:
        mapping.pop("cutoff_eV", None)
    return mapping


def _params_from_args(args):
    return build_params(_merged_config(args))


def _axis_from_args(args, which: str, default: AxisSpec) -> AxisSpec:
    lo = getattr(args, f"grid_{which}_min")
    hi = getattr(args, f"grid_{which}_max")
    n = getattr(args, "nx" if which == "x" else "ny")
    return AxisSpec(
        default.name,
        default.scale,
        default.minimum if lo is None else lo,
        default.maximum if hi is None else hi,
        default.n if n is None else n,
    )


def _add_grid_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("grid")
    g.add_argument("--nx", type=int, help="columns (x axis points)")
    g.add_argument("--ny", type=int, help="rows (y axis points)")
    g.add_argument("--grid-x-min", type=float, help="x axis lower bound (axis coordinates)")
    g.add_argument("--grid-x-max", type=float, help="x axis upper bound")
    g.add_argument("--grid-y-min", type=float, help="y axis lower bound")
    g.add_argument("--grid-y-max", type=float, help="y axis upper bound")
    g.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="worker threads (default: machine parallelism)")
    g.add_argument("--format", choices=["csv", "pgm", "both"], default="both",
                   help="grid output format")
    g.add_argument("--out", required=True, metavar="DIR", help="output directory")


def _write_scan(grid, name: str, args, manifest: RunManifest) -> None:
    out = _ensure_out(args.out)
    if args.format in ("csv", "both"):
        write_grid_csv(grid, os.path.join(out, f"{name}.csv"))
        manifest.outputs.append(f"{name}.csv")
    if args.format in ("pgm", "both"):
        write_grid_pgm(grid, os.path.join(out, f"{name}.pgm"))
        manifest.outputs.append(f"{name}.pgm")
    manifest.extra["strategy_histogram"] = grid.strategy_histogram()
    manifest.extra["grid"] = {
        "x": vars(grid.x_axis).copy(),
        "y": vars(grid.y_axis).copy(),
    }
    manifest.extra.update({k: v for k, v in grid.meta.items()})
    manifest.write(out)


# ----------------------------------------------------------------------
# subcommands

def _cmd_kernels(args) -> int:
    ts = _parse_range(args.t_range)
    t0s = _parse_range(args.t0_range)
    mode = TemperatureMode(args.temperature_mode)
    strategy = Strategy(args.strategy)
    rows = []
    for t0 in t0s:
        for t in ts:
            k = evaluate_kernels(
                KernelQuery(t=float(t), t0=float(t0), y_max=args.y_max,
                            temperature_mode=mode, strategy=strategy,
                            quad_budget=args.quad_budget)
            )
            rows.append((t, t0, k))
    lines = ["t,t0,f1,f2,phi1,phi2,phi_minus,strategy"]
    for t, t0, k in rows:
        lines.append(
            f"{float(t)!r},{float(t0)!r},{k.f1!r},{k.f2!r},"
            f"{k.phi1!r},{k.phi2!r},{k.phi_minus!r},{k.strategy_used}"
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        out = _ensure_out(args.out)
        manifest = RunManifest("kernels", {
            "t_range": args.t_range, "t0_range": args.t0_range,
            "y_max": args.y_max, "temperature_mode": args.temperature_mode,
            "strategy": args.strategy,
        }, started_utc=_now())
        with open(os.path.join(out, "kernels.csv"), "w", encoding="ascii") as fh:
            fh.write(text)
        manifest.outputs.append("kernels.csv")
        manifest.write(out)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _format_state(m: np.ndarray) -> str:
    rows = []
    for i in range(4):
        rows.append("  ".join(f"{m[i, j].real:+.6e}{m[i, j].imag:+.6e}j" for j in range(4)))
    return "\n".join(rows)


def _cmd_evolve(args) -> int:
    params = _params_from_args(args)
    d = derive_dimensionless(params)
    k = evaluate_kernels(
        KernelQuery(t=args.t, t0=d.t0_over_tau, y_max=d.y_max,
                    temperature_mode=TemperatureMode.THERMAL
                    if not params.zero_temperature else TemperatureMode.ZERO_T,
                    strategy=Strategy(args.strategy),
                    quad_budget=args.quad_budget)
    )
    state = evolve(initial_product_state(), k, d.A, params.gamma)
    c = concurrence(state.matrix)
    e = entanglement_of_formation(state.matrix)
    print(f"# t = {args.t} (time units), t0 = {d.t0_over_tau}, strategy = {k.strategy_used}")
    print(_format_state(state.matrix))
    print(f"concurrence = {c!r}")
    print(f"entanglement_of_formation = {e!r}")
    if args.out:
        out = _ensure_out(args.out)
        manifest = RunManifest("evolve", {**echo_params(params), "t": args.t},
                               started_utc=_now())
        with open(os.path.join(out, "state.csv"), "w", encoding="ascii") as fh:
            for i in range(4):
                fh.write(",".join(_complex_txt(state.matrix[i, j]) for j in range(4)) + "\n")
        manifest.outputs.append("state.csv")
        manifest.extra.update({"concurrence": c, "entanglement_of_formation": e})
        manifest.write(out)
    return EXIT_OK


def _complex_txt(z: complex) -> str:
    return f"{z.real!r}{z.imag:+}i" if z.imag else f"{z.real!r}"


def _parse_complex(txt: str) -> complex:
    txt = txt.strip().replace(" ", "")
    if txt.endswith("i"):
        txt = txt[:-1] + "j"
    return complex(txt)


def _cmd_eof(args) -> int:
    with open(args.state, "r", encoding="utf-8") as fh:
        cells = []
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            cells.extend(_parse_complex(tok) for tok in line.split(","))
    if len(cells) != 16:
        raise ConfigError(f"state: expected 16 complex entries, got {len(cells)}")
    rho = np.array(cells, dtype=complex).reshape(4, 4)
    try:
        c = concurrence(rho)
        e = entanglement_of_formation(rho)
    except NotAStateError as exc:
        raise ConfigError(f"state: {exc}") from None
    print(f"concurrence = {c!r}")
    print(f"entanglement_of_formation = {e!r}")
    return EXIT_OK


def _cmd_scan_fig1(args) -> int:
    params = _params_from_args(args)
    x = _axis_from_args(args, "x", AxisSpec("log10(t0/tau)", "log10", 0.0, 5.0, 100))
    y = _axis_from_args(args, "y", AxisSpec("log10(t/tau)", "log10", 0.0, 16.0, 100))
    manifest = RunManifest("scan-fig1", echo_params(params), started_utc=_now())
    grid = scan_fig1(params, x, y, threads=args.threads)
    _write_scan(grid, "fig1", args, manifest)
    return EXIT_OK


def _cmd_scan_fig2(args) -> int:
    x = _axis_from_args(args, "x", AxisSpec("v", "linear", 0.0, 100.0, 100))
    y = _axis_from_args(args, "y", AxisSpec("phi_minus", "linear", 0.0, 2.0 * math.pi, 100))
    manifest = RunManifest("scan-fig2", {"alpha0": CODATA2018.alpha0}, started_utc=_now())
    grid = scan_fig2(CODATA2018.alpha0, x, y, threads=args.threads)
    _write_scan(grid, "fig2", args, manifest)
    return EXIT_OK


def _cmd_scan_fig3(args) -> int:
    params = _params_from_args(args)
    x = _axis_from_args(args, "x", AxisSpec("gamma", "linear", 0.0, 1.0, 100))
    y = _axis_from_args(args, "y", AxisSpec("log10(t/tau)", "log10", 0.0, 8.0, 100))
    manifest = RunManifest("scan-fig3", echo_params(params), started_utc=_now())
    grid = scan_fig3(params, x, y, threads=args.threads)
    _write_scan(grid, "fig3", args, manifest)
    return EXIT_OK


def _cmd_predict_t1(args) -> int:
    if args.dipole_um is not None:
        dipole_m = args.dipole_um * 1e-6
    elif args.dipole_nm is not None:
        dipole_m = args.dipole_nm * 1e-9
    else:
        raise ConfigError("dipole_nm: one of --dipole-um / --dipole-nm required")
    if (args.t1_seconds is None) == (args.separation_m is None):
        raise ConfigError("t1_seconds: exactly one of --t1-seconds / --separation-m required")
    if args.t1_seconds is not None:
        r = invert_t1_distance(dipole_m, args.t1_seconds)
        print(f"separation for first-maximum time {args.t1_seconds!r} s:")
        print(f"R = {r!r} m  ({r / 1e3!r} km, {r * 1e6!r} um)")
    else:
        t1 = (math.pi / (2.0 * CODATA2018.alpha0)
              * args.separation_m**2 / dipole_m**2
              * args.separation_m / CODATA2018.c0)
        print(f"first-maximum time at R = {args.separation_m!r} m:")
        print(f"t1 = {t1!r} s")
    return EXIT_OK


def _cmd_find_t1(args) -> int:
    params = _params_from_args(args)
    t1 = find_t1_numeric(params, args.t_min_over_tau, args.t_max_over_tau)
    t1_pred = predict_t1(params)
    d = derive_dimensionless(params)
    print(f"numeric first maximum: t1 = {t1!r} s  ({t1 / d.tau!r} tau)")
    print(f"closed-law prediction: t1 = {t1_pred!r} s")
    print(f"ratio = {t1 / t1_pred!r}")
    return EXIT_OK


def _cmd_eff_int(args) -> int:
    r = args.separation_nm * 1e-9
    r_vec = r * np.array([0.0, 0.0, 1.0])
    u1 = _parse_vec(args.u1)
    u2 = _parse_vec(args.u2)
    u1 = u1 / np.linalg.norm(u1)
    u2 = u2 / np.linalg.norm(u2)
    d = args.dipole_nm * 1e-9
    base = ModeSumConfig(L=args.box_factor * r, n_max=args.n_max, R_vec=r_vec,
                         u1=u1, u2=u2, d=d)
    coeff = mode_sum_extrapolated(base)
    analytic = analytic_dipole_coefficient(u1, u2, r_vec, d)
    print(f"mode-sum coefficient (eta extrapolated): {coeff!r} J")
    print(f"analytic dipole-dipole coefficient:      {analytic!r} J")
    print(f"relative error: {abs(coeff - analytic) / abs(analytic)!r}")
    rows = []
    if args.r_sweep:
        for rr in _parse_range(args.r_sweep) * 1e-9:
            cfg = ModeSumConfig(L=args.box_factor * rr, n_max=args.n_max,
                                R_vec=rr * np.array([0.0, 0.0, 1.0]),
                                u1=u1, u2=u2, d=d)
            rows.extend(convergence_study([cfg]))
    if args.out:
        out = _ensure_out(args.out)
        manifest = RunManifest("eff-int", {
            "separation_nm": args.separation_nm, "dipole_nm": args.dipole_nm,
            "u1": args.u1, "u2": args.u2, "box_factor": args.box_factor,
            "n_max": args.n_max,
        }, started_utc=_now())
        with open(os.path.join(out, "effint.csv"), "w", encoding="ascii") as fh:
            fh.write("L,n_max,eta,R,coefficient,analytic,rel_err\n")
            for row in rows or convergence_study([base]):
                fh.write(",".join(repr(row[k]) for k in
                                  ("L", "n_max", "eta", "R", "coefficient",
                                   "analytic", "rel_err")) + "\n")
        manifest.outputs.append("effint.csv")
        manifest.extra.update({"coefficient": coeff, "analytic": analytic})
        manifest.write(out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bbrent",
        description="Reduced dynamics and entanglement of two double quantum "
                    "dots in thermal black-body radiation.",
    )
    ap.add_argument("--version", action="version", version=f"bbrent {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernels", help="dump kernel values on a (t, t0) lattice as CSV")
    p.add_argument("--t-range", required=True,
                   help="times, units of tau: 'min:max:n[:log]' or comma list")
    p.add_argument("--t0-range", required=True,
                   help="light travel times, units of tau: same syntax")
    p.add_argument("--y-max", type=float, required=True, help="dimensionless UV cutoff")
    p.add_argument("--temperature-mode", choices=[m.value for m in TemperatureMode],
                   default="thermal", help="coth weight handling")
    p.add_argument("--strategy", choices=[s.value for s in Strategy], default="auto",
                   help="evaluation strategy")
    p.add_argument("--quad-budget", type=float, default=1e7,
                   help="oscillation budget y_max*max(t, t0) for quadrature")
    p.add_argument("--out", metavar="DIR", help="write kernels.csv + manifest here")
    p.set_defaults(func=_cmd_kernels)

    p = sub.add_parser("evolve", help="evolve the canonical product state to one (t, t0)")
    _add_param_flags(p)
    p.add_argument("--t", type=float, required=True, help="time in units of tau (t0 at T = 0)")
    p.add_argument("--strategy", choices=[s.value for s in Strategy], default="auto")
    p.add_argument("--quad-budget", type=float, default=1e7)
    p.add_argument("--out", metavar="DIR", help="write state.csv + manifest here")
    p.set_defaults(func=_cmd_evolve)

    p = sub.add_parser("eof", help="concurrence and EoF of a 4x4 state from CSV")
    p.add_argument("--state", required=True, metavar="PATH",
                   help="CSV of 16 complex entries 'a+bi', row-major")
    p.set_defaults(func=_cmd_eof)

    p = sub.add_parser("scan-fig1", help="EoF over (log10 t0/tau, log10 t/tau)")
    _add_param_flags(p)
    _add_grid_flags(p)
    p.set_defaults(func=_cmd_scan_fig1)

    p = sub.add_parser("scan-fig2", help="long-time EoF over (v, phi_minus)")
    _add_grid_flags(p)
    p.set_defaults(func=_cmd_scan_fig2)

    p = sub.add_parser("scan-fig3", help="EoF over (gamma, log10 t/tau) at fixed t0")
    _add_param_flags(p)
    _add_grid_flags(p)
    p.set_defaults(func=_cmd_scan_fig3)

    p = sub.add_parser("predict-t1", help="closed-law first-maximum time / distance")
    p.add_argument("--dipole-um", type=float, help="dipole length (micrometers)")
    p.add_argument("--dipole-nm", type=float, help="dipole length (nanometers)")
    p.add_argument("--t1-seconds", type=float, help="target time; solves for R")
    p.add_argument("--separation-m", type=float, help="separation; solves for t1")
    p.set_defaults(func=_cmd_predict_t1)

    p = sub.add_parser("find-t1", help="numeric first entanglement maximum")
    _add_param_flags(p)
    p.add_argument("--t-min-over-tau", type=float, help="search window lower edge")
    p.add_argument("--t-max-over-tau", type=float, help="search window upper edge")
    p.set_defaults(func=_cmd_find_t1)

    p = sub.add_parser("eff-int", help="mode-sum effective interaction vs dipole-dipole form")
    p.add_argument("--separation-nm", type=float, required=True, help="dot separation (nm)")
    p.add_argument("--dipole-nm", type=float, default=1.0, help="dipole length (nm)")
    p.add_argument("--u1", default="0,0,1", help="dipole 1 orientation x,y,z")
    p.add_argument("--u2", default="0,0,1", help="dipole 2 orientation x,y,z")
    p.add_argument("--box-factor", type=float, default=8.0, help="box side over separation")
    p.add_argument("--n-max", type=int, default=160, help="per-axis mode index bound")
    p.add_argument("--r-sweep", help="separation sweep (nm): 'min:max:n[:log]'")
    p.add_argument("--out", metavar="DIR", help="write effint.csv + manifest here")
    p.set_defaults(func=_cmd_eff_int)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        return args.func(args)
    except (ConfigError, ParameterDomainError, GeometryError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OscillationBudgetError, StrategyConfigError, QuadratureError,
            SearchWindowError) as exc:
        print(f"numerical strategy refusal: {exc}", file=sys.stderr)
        return EXIT_NUMERICS
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
