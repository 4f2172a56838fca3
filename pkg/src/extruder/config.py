"""Flat key-value run configuration.

Config files are flat YAML (JSON works too) mappings.  Unknown keys are
rejected.  Every key has a documented default; the shipped defaults are
the HDPE data sheet with zero barrel heat-transfer coefficients.
"""
from __future__ import annotations

import math
from pathlib import Path

import yaml

from .errors import ConfigError
from .params import MaterialParams, ProcessParams

DEFAULTS: dict = {
    # material
    "rho_s": 955.0, "rho_l": 780.0,
    "c_s": 1895.0, "c_l": 2640.0,
    "k_s": 0.373, "k_l": 0.324,
    "hbar_s": 0.0, "hbar_l": 0.0,
    "dH": 39000.0, "T_m": 135.0,
    # process
    "L": 0.1, "b": 0.002, "T_b": 145.0, "q_m_star": 100.0,
    "s_r": 0.07, "s_0": 0.03,
    # control
    "gain_c": 0.2,
    "controller": "output_feedback",   # |full_state|pi|open_loop
    "Kp": 0.0, "Ki": 0.0,
    "q_f_min": -math.inf, "q_f_max": math.inf,
    # grid / solver
    "grid_n": 101, "s_min": None,      # None -> 1e-4 * L
    "abs_tol": 1e-6, "rel_tol": 1e-4,
    "dt_init": 1e-3, "dt_min": 1e-12, "dt_max": 5.0,
    "t_end": 600.0, "snapshot_every": 10.0,
    # initial data / observer
    "T_s0_inlet": 100.0,
    "init_liquid": "linear",           # |steady
    "obs_offset": 10.0,
    "obs_taper": 0.25,
    "sdot_source": "plant",            # |finite_difference
    # diagnostics
    "compute_lyapunov": False,
    "eps_grid": 0.15,
}

_STRING_KEYS = {"controller", "init_liquid", "sdot_source"}
_INT_KEYS = {"grid_n"}
_BOOL_KEYS = {"compute_lyapunov"}

_CONTROLLERS = ("output_feedback", "full_state", "pi", "open_loop")


def coerce_value(key: str, value):
    if key not in DEFAULTS:
        raise ConfigError(f"unknown configuration key {key!r}")
    if key in _STRING_KEYS:
        return str(value)
    if key in _BOOL_KEYS:
        if isinstance(value, bool):
            return value
        if str(value).lower() in ("true", "1", "yes"):
            return True
        if str(value).lower() in ("false", "0", "no"):
            return False
        raise ConfigError(f"key {key!r} expects a boolean, got {value!r}")
    if key == "s_min" and value is None:
        return None
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"key {key!r} expects a number, got {value!r}")
    if key in _INT_KEYS:
        if v != int(v):
            raise ConfigError(f"key {key!r} expects an integer, got {value!r}")
        return int(v)
    return v


def make_config(overrides: dict | None = None) -> dict:
    """Defaults updated with validated overrides."""
    cfg = dict(DEFAULTS)
    for k, v in (overrides or {}).items():
        cfg[k] = coerce_value(k, v)
    if cfg["controller"] not in _CONTROLLERS:
        raise ConfigError(f"controller must be one of {_CONTROLLERS}, "
                          f"got {cfg['controller']!r}")
    if cfg["init_liquid"] not in ("linear", "steady"):
        raise ConfigError(f"init_liquid must be linear|steady, "
                          f"got {cfg['init_liquid']!r}")
    if cfg["sdot_source"] not in ("plant", "finite_difference"):
        raise ConfigError(f"sdot_source must be plant|finite_difference, "
                          f"got {cfg['sdot_source']!r}")
    return cfg


def load_config(path: str | Path, overrides: dict | None = None) -> dict:
    """Read a flat YAML/JSON mapping and merge CLI overrides on top."""
    raw = yaml.safe_load(Path(path).read_text())
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(f"config file {path} must contain a flat mapping")
    merged = dict(raw)
    merged.update(overrides or {})
    return make_config(merged)


def material_from_config(cfg: dict) -> MaterialParams:
    return MaterialParams(rho_s=cfg["rho_s"], rho_l=cfg["rho_l"],
                          c_s=cfg["c_s"], c_l=cfg["c_l"],
                          k_s=cfg["k_s"], k_l=cfg["k_l"],
                          hbar_s=cfg["hbar_s"], hbar_l=cfg["hbar_l"],
                          dH=cfg["dH"], T_m=cfg["T_m"])


def process_from_config(cfg: dict) -> ProcessParams:
    return ProcessParams(L=cfg["L"], b=cfg["b"], T_b=cfg["T_b"],
                         q_m_star=cfg["q_m_star"], s_r=cfg["s_r"],
                         s_0=cfg["s_0"])
