"""Flat key-value configuration files and parameter assembly.

Files are `key = value` lines; blank lines and `#` comments are
ignored. CLI flags override file keys. Times and frequencies carry
their unit in the key name (never inferred): temperature_K, dipole_nm,
separation_m or t0_over_tau, cutoff_eV or y_max.
"""

from __future__ import annotations

from typing import Optional

from .constants import CODATA2018
from .params import (
    CutoffKind,
    CutoffSpec,
    ParameterDomainError,
    PhysicalParams,
    params_from_dimensionless,
)


class ConfigError(ValueError):
    """Bad configuration; the message names the offending key."""


PARAM_KEYS = {
    "temperature_K",
    "dipole_nm",
    "separation_m",
    "t0_over_tau",
    "cutoff_eV",
    "y_max",
    "gamma",
    "cutoff_kind",
    "cutoff_p",
}

GRID_KEYS = {
    "grid_nx",
    "grid_ny",
    "grid_x_min",
    "grid_x_max",
    "grid_y_min",
    "grid_y_max",
}

KNOWN_KEYS = PARAM_KEYS | GRID_KEYS


def read_config_file(path) -> dict:
    """Parse a flat key-value file into a string map."""
    mapping: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value, got {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in KNOWN_KEYS:
                raise ConfigError(f"unknown configuration key: {key}")
            mapping[key] = value
    return mapping


def _get_float(mapping: dict, key: str) -> Optional[float]:
    if key not in mapping or mapping[key] is None:
        return None
    try:
        return float(mapping[key])
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: not a number: {mapping[key]!r}") from None


def build_params(mapping: dict) -> PhysicalParams:
    """Validate a merged configuration map and build PhysicalParams.

    Raises ConfigError naming the offending key on any problem.
    """
    unknown = set(mapping) - KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown configuration key: {sorted(unknown)[0]}")

    temperature = _get_float(mapping, "temperature_K")
    if temperature is None:
        raise ConfigError("temperature_K: required")
    dipole_nm = _get_float(mapping, "dipole_nm")
    if dipole_nm is None:
        raise ConfigError("dipole_nm: required")

    kind_txt = str(mapping.get("cutoff_kind", "sharp")).strip().lower()
    if kind_txt not in ("sharp", "power_law"):
        raise ConfigError(f"cutoff_kind: must be sharp or power_law, got {kind_txt!r}")
    p = _get_float(mapping, "cutoff_p")
    if kind_txt == "power_law" and p is None:
        raise ConfigError("cutoff_p: required for cutoff_kind = power_law")
    if kind_txt == "sharp" and p is not None:
        raise ConfigError("cutoff_p: only valid for cutoff_kind = power_law")
    try:
        cutoff = CutoffSpec(CutoffKind(kind_txt), p)
    except ParameterDomainError as exc:
        raise ConfigError(str(exc)) from None

    gamma = _get_float(mapping, "gamma")
    gamma = 1.0 if gamma is None else gamma

    separation_m = _get_float(mapping, "separation_m")
    t0_over_tau = _get_float(mapping, "t0_over_tau")
    if (separation_m is None) == (t0_over_tau is None):
        raise ConfigError("separation_m: exactly one of separation_m / t0_over_tau required")

    cutoff_eV = _get_float(mapping, "cutoff_eV")
    y_max = _get_float(mapping, "y_max")
    if (cutoff_eV is None) == (y_max is None):
        raise ConfigError("cutoff_eV: exactly one of cutoff_eV / y_max required")

    c = CODATA2018
    try:
        dipole_m = dipole_nm * 1e-9
        omega_max = None
        if cutoff_eV is not None:
            omega_max = cutoff_eV * c.e_charge / c.hbar
        if t0_over_tau is not None:
            return params_from_dimensionless(
                temperature_K=temperature,
                dipole_m=dipole_m,
                t0_over_tau=t0_over_tau,
                y_max=y_max,
                omega_max=omega_max,
                gamma=gamma,
                cutoff=cutoff,
            )
        if omega_max is None:
            # y_max with SI separation needs the thermal time
            if temperature <= 0.0:
                raise ConfigError("y_max: requires finite temperature; use cutoff_eV at T = 0")
            tau = c.hbar / (c.kB * temperature)
            omega_max = y_max / tau
        return PhysicalParams(
            temperature_K=temperature,
            dipole_m=dipole_m,
            separation_m=separation_m,
            omega_max=omega_max,
            gamma=gamma,
            cutoff=cutoff,
        )
    except ParameterDomainError as exc:
        raise ConfigError(str(exc)) from None


def echo_params(params: PhysicalParams) -> dict:
    """Round-trippable flat representation of a parameter set."""
    out = {
        "temperature_K": params.temperature_K,
        "dipole_nm": params.dipole_m * 1e9,
        "separation_m": params.separation_m,
        "cutoff_eV": params.omega_max * params.constants.hbar / params.constants.e_charge,
        "gamma": params.gamma,
        "cutoff_kind": params.cutoff.kind.value,
    }
    if params.cutoff.p is not None:
        out["cutoff_p"] = params.cutoff.p
    return out
