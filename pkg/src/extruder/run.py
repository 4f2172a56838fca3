"""Closed-loop simulation runs, sweeps, and CSV output.

The backstepping laws are pure state feedback, so the flux is evaluated
from the current (estimated) state inside every right-hand-side call;
holding it constant across a step turns the high-gain inlet loop into a
discrete oscillator that collapses the step size.  The PI law carries an
integrator state and is applied sample-and-hold at accepted steps, which
its modest gains tolerate.  Plant and observer advance monolithically
through one Rosenbrock step, so their interface positions agree to
round-off by construction.
"""
from __future__ import annotations

import csv
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analysis import (InvariantReport, closed_loop_lyapunov,
                       estimation_lyapunov)
from .config import make_config, material_from_config, process_from_config
from .control import (KernelFunctions, check_setpoint_restriction, control_Z,
                      full_state_qf, output_feedback_qf, pi_control,
                      synthesize_kernel)
from .errors import ConfigError, DegenerateGainError
from .integrator import RosenbrockStepper, StepControl, colored_jacobian
from .observer import estimation_error_norms, initial_estimate, observer_gain
from .params import MaterialParams, ProcessParams
from .plant import PlantState, default_initial_condition
from .steady import SteadyState, solve_steady_state
from .system import CoupledSystem

_SERIES_KEYS = ("t", "s", "q_f", "Ts_inlet", "sdot",
                "valid_solid", "valid_liquid")


@dataclass
class RunRecord:
    """Everything a finished run produced."""
    config: dict
    steady: SteadyState
    series: dict[str, np.ndarray]
    snapshots: list[dict]
    invariants: InvariantReport
    kernel: KernelFunctions | None = None
    setpoint_ok: bool | None = None
    final_plant: PlantState | None = None
    final_obs: object | None = None
    n_accepted: int = 0
    n_rejected: int = 0

    @property
    def final_s(self) -> float:
        return float(self.series["s"][-1])


def _controller(cfg: dict, ss: SteadyState, kf: KernelFunctions | None,
                sys: CoupledSystem):
    """Returns q_f(plant, obs, dt) plus any state it carries internally."""
    kind = cfg["controller"]
    lo, hi = cfg["q_f_min"], cfg["q_f_max"]
    if kind == "open_loop":
        return lambda plant, obs, dt: float(np.clip(ss.q_f_star, lo, hi))
    if kind == "full_state":
        def law(plant, obs, dt):
            return float(np.clip(
                full_state_qf(kf, ss, plant.Ts.values, plant.s), lo, hi))
        return law
    if kind == "output_feedback":
        def law(plant, obs, dt):
            return float(np.clip(
                output_feedback_qf(kf, ss, obs.Y1,
                                   float(plant.Ts.values[0]),
                                   obs.That.values), lo, hi))
        return law
    # PI carries the integral accumulator and the previous sample
    state = {"integ": 0.0, "s_prev": cfg["s_0"]}

    def law(plant, obs, dt):
        q_f, state["integ"] = pi_control(
            plant.s, cfg["s_r"], state["integ"], dt, state["s_prev"],
            cfg["Kp"], cfg["Ki"], ss.q_f_star)
        state["s_prev"] = plant.s
        return float(np.clip(q_f, lo, hi))
    return law


def run_closed_loop(cfg: dict) -> RunRecord:
    """Simulate one scenario from t=0 to t_end under the configured law."""
    m = material_from_config(cfg)
    p = process_from_config(cfg)
    ss = solve_steady_state(m, p)

    needs_kernel = cfg["controller"] in ("output_feedback", "full_state")
    kf = synthesize_kernel(m, p, ss, cfg["gain_c"]) if needs_kernel else None
    with_obs = cfg["controller"] == "output_feedback"

    sys = CoupledSystem(m, p, cfg["grid_n"], with_observer=with_obs,
                        s_min=cfg["s_min"], sdot_source=cfg["sdot_source"])
    plant = default_initial_condition(m, p, cfg["grid_n"],
                                      T_s0_inlet=cfg["T_s0_inlet"],
                                      init_liquid=cfg["init_liquid"], ss=ss)
    obs = (initial_estimate(plant, cfg["obs_offset"], cfg["obs_taper"])
           if with_obs else None)

    setpoint_ok = None
    if with_obs:
        try:
            setpoint_ok = check_setpoint_restriction(p, obs.That, kf, m,
                                                     m.T_m)
        except DegenerateGainError:
            setpoint_ok = None
        if setpoint_ok is False:
            warnings.warn("setpoint restriction violated: s_r below the "
                          "reachability bound for this initial estimate",
                          stacklevel=2)

    law = _controller(cfg, ss, kf, sys)

    ctl = StepControl(abs_tol=cfg["abs_tol"], rel_tol=cfg["rel_tol"],
                      dt_init=cfg["dt_init"], dt_min=cfg["dt_min"],
                      dt_max=cfg["dt_max"])
    held = {"q_f": 0.0, "sdot_fd": None}
    continuous = cfg["controller"] != "pi"

    def rhs(t, y):
        if continuous:
            pl, ob = sys.unpack(y, t)
            q = law(pl, ob, 0.0)
        else:
            q = held["q_f"]
        return sys.rhs(t, y, q, held["sdot_fd"])

    groups, rows_for_col = sys.jacobian_structure()
    stepper = RosenbrockStepper(
        rhs, ctl, sys.error_mask,
        jacobian=lambda t, y, f0: colored_jacobian(
            rhs, t, y, groups, rows_for_col, f0))

    series = {k: [] for k in _SERIES_KEYS}
    if with_obs:
        series.update(err_L2=[], err_H1=[], Z=[], underestimate=[])
    if cfg["compute_lyapunov"]:
        if with_obs:
            series["V_est"] = []
        if needs_kernel:
            series["V_cl"] = []
    snapshots: list[dict] = []
    inv = InvariantReport(eps_grid=cfg["eps_grid"])

    def log(plant, obs, t, q_f):
        y = sys.pack(plant, obs)
        dy = sys.rhs(t, y, q_f, held["sdot_fd"])
        sdot = float(dy[sys._i_s])
        T_m = m.T_m
        margins = {
            "valid_solid": T_m - float(np.max(plant.Ts.values)),
            "valid_liquid": float(np.min(plant.Tl.values)) - T_m,
            "sdot_nonneg": sdot,
            "s_above_s0": plant.s - p.s_0,
            "s_below_sr": p.s_r - plant.s,
        }
        series["t"].append(t)
        series["s"].append(plant.s)
        series["q_f"].append(q_f)
        series["Ts_inlet"].append(float(plant.Ts.values[0]))
        series["sdot"].append(sdot)
        series["valid_solid"].append(margins["valid_solid"])
        series["valid_liquid"].append(margins["valid_liquid"])
        if with_obs:
            l2, h1 = estimation_error_norms(plant, obs)
            series["err_L2"].append(l2)
            series["err_H1"].append(h1)
            z = control_Z(kf, ss, obs.That.values, plant.s)
            series["Z"].append(z)
            margins["Z_positive"] = z
            margins["underestimate"] = float(
                np.min(plant.Ts.values - obs.That.values))
            series["underestimate"].append(margins["underestimate"])
        if cfg["compute_lyapunov"]:
            if with_obs:
                series["V_est"].append(
                    estimation_lyapunov(plant, obs, observer_gain(m, p)))
            if needs_kernel:
                src = obs.That.values if with_obs else plant.Ts.values
                series["V_cl"].append(
                    closed_loop_lyapunov(kf, ss, src, plant.s))
        inv.update(**margins)
        return sdot

    def snapshot(plant, obs, t):
        snap = {"t": t,
                "x_s": np.linspace(0.0, plant.s, cfg["grid_n"]),
                "Ts": plant.Ts.values.copy(),
                "x_l": plant.s + np.linspace(0.0, 1.0, cfg["grid_n"])
                       * (p.L - plant.s),
                "Tl": plant.Tl.values.copy()}
        if obs is not None:
            snap["That"] = obs.That.values.copy()
        snapshots.append(snap)

    t, t_end = 0.0, cfg["t_end"]
    y = sys.pack(plant, obs)
    dt = ctl.dt_init
    q_f = law(plant, obs, ctl.dt_init)
    held["q_f"] = q_f
    log(plant, obs, t, q_f)
    snapshot(plant, obs, t)
    next_snap = cfg["snapshot_every"]
    s_prev, t_prev = plant.s, t

    while t < t_end - 1e-12:
        dt = min(dt, t_end - t)
        t, y, dt = stepper.advance(t, y, dt)
        plant, obs = sys.unpack(y, t)
        if t > t_prev:
            held["sdot_fd"] = (plant.s - s_prev) / (t - t_prev)
        s_prev, t_prev = plant.s, t
        q_f = law(plant, obs, t - series["t"][-1])
        held["q_f"] = q_f
        log(plant, obs, t, q_f)
        if t >= next_snap - 1e-9:
            snapshot(plant, obs, t)
            while next_snap <= t + 1e-9:
                next_snap += cfg["snapshot_every"]
    if snapshots[-1]["t"] < t:
        snapshot(plant, obs, t)

    return RunRecord(config=cfg, steady=ss,
                     series={k: np.asarray(v) for k, v in series.items()},
                     snapshots=snapshots, invariants=inv, kernel=kf,
                     setpoint_ok=setpoint_ok, final_plant=plant,
                     final_obs=obs, n_accepted=stepper.n_accepted,
                     n_rejected=stepper.n_rejected)


# -- sweeps -----------------------------------------------------------------

def sweep(base_cfg: dict, variations: list[dict],
          parallel: bool = True) -> list[RunRecord]:
    """Run base_cfg once per variation dict (each merged over the base).

    Runs are independent (no shared mutable state) and fan out over a
    process pool unless parallel=False.
    """
    configs = []
    for var in variations:
        merged = dict(base_cfg)
        merged.update(var)
        configs.append(make_config(merged))
    if not configs:
        return []
    if parallel and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=min(len(configs),
                                                 os.cpu_count() or 1)) as ex:
            return list(ex.map(run_closed_loop, configs))
    return [run_closed_loop(c) for c in configs]


def settling_time(rec: RunRecord, band: float = 0.05) -> float:
    """First time after which |s - s_r| stays within band * |s_0 - s_r|."""
    cfg = rec.config
    rel = np.abs(rec.series["s"] - cfg["s_r"]) / abs(cfg["s_0"] - cfg["s_r"])
    outside = np.nonzero(rel >= band)[0]
    if outside.size == 0:
        return 0.0
    if outside[-1] == rel.shape[0] - 1:
        return math.inf
    return float(rec.series["t"][outside[-1] + 1])


def sweep_summary(records: list[RunRecord]) -> list[dict]:
    rows = []
    for rec in records:
        cfg = rec.config
        s0, sr = cfg["s_0"], cfg["s_r"]
        rel = abs(rec.final_s - sr) / abs(s0 - sr)
        rows.append({"b": cfg["b"], "gain_c": cfg["gain_c"],
                     "controller": cfg["controller"],
                     "s_final": rec.final_s, "rel_error": rel,
                     "settling_time": settling_time(rec),
                     "peak_abs_qf": float(np.max(np.abs(
                         rec.series["q_f"]))),
                     "min_Ts_inlet": float(np.min(
                         rec.series["Ts_inlet"])),
                     "peak_err_L2": (float(np.max(rec.series["err_L2"]))
                                     if "err_L2" in rec.series else
                                     math.nan),
                     "steps": rec.n_accepted,
                     "all_valid": rec.invariants.all_pass(
                         ("valid_solid", "valid_liquid"))})
    return rows


# -- CSV output -------------------------------------------------------------

def write_series_csv(rec: RunRecord, path: str | Path):
    keys = list(rec.series)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(keys)
        for i in range(rec.series["t"].shape[0]):
            w.writerow([f"{rec.series[k][i]:.12g}" for k in keys])


def write_snapshots_csv(rec: RunRecord, path: str | Path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x", "T", "phase", "source"])
        for snap in rec.snapshots:
            rows = [(snap["x_s"], snap["Ts"], "solid", "plant"),
                    (snap["x_l"], snap["Tl"], "liquid", "plant")]
            if "That" in snap:
                rows.append((snap["x_s"], snap["That"], "solid", "observer"))
            for x, T, phase, src in rows:
                for xi, Ti in zip(x, T):
                    w.writerow([f"{snap['t']:.12g}", f"{xi:.12g}",
                                f"{Ti:.12g}", phase, src])


def write_steady_csv(ss: SteadyState, path: str | Path, n: int = 201):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "T_eq", "dT_eq_dx", "phase"])
        for x in np.linspace(0.0, ss.s_r, n):
            w.writerow([f"{x:.12g}", f"{ss.solid_eval(x):.12g}",
                        f"{ss.solid_eval(x, 1):.12g}", "solid"])
        for x in np.linspace(ss.s_r, ss.L, n):
            w.writerow([f"{x:.12g}", f"{ss.liquid_eval(x):.12g}",
                        f"{ss.liquid_eval(x, 1):.12g}", "liquid"])


def load_series_csv(path: str | Path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    keys = rows[0]
    data = np.asarray(rows[1:], dtype=float)
    return {k: data[:, i] for i, k in enumerate(keys)}


def invariant_report_text(inv: InvariantReport) -> str:
    lines = [f"invariant report  (eps_grid={inv.eps_grid:g}, "
             f"samples={inv.samples})"]
    flags = inv.flags()
    for key, ok in flags.items():
        margin = getattr(inv, key)
        lines.append(f"  {key:<14s} margin={margin:+.6e}  "
                     f"{'PASS' if ok else 'FAIL'}")
    lines.append(f"overall: {'PASS' if inv.all_pass() else 'FAIL'}")
    return "\n".join(lines) + "\n"


def report_from_series(series: dict[str, np.ndarray],
                       cfg: dict) -> InvariantReport:
    """Rebuild the inline invariant report from an emitted time series."""
    inv = InvariantReport(eps_grid=cfg["eps_grid"])
    n = series["t"].shape[0]
    for i in range(n):
        margins = {"valid_solid": series["valid_solid"][i],
                   "valid_liquid": series["valid_liquid"][i],
                   "sdot_nonneg": series["sdot"][i],
                   "s_above_s0": series["s"][i] - cfg["s_0"],
                   "s_below_sr": cfg["s_r"] - series["s"][i]}
        if "Z" in series:
            margins["Z_positive"] = series["Z"][i]
        if "underestimate" in series:
            margins["underestimate"] = series["underestimate"][i]
        inv.update(**margins)
    return inv


def write_summary_csv(rows: list[dict], path: str | Path):
    if not rows:
        raise ConfigError("nothing to summarize")
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
