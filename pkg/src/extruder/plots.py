"""SVG plot emission for finished runs.

Every plot is a self-contained vector file written with the Agg backend;
nothing here opens a window.  Missing data degrades gracefully: profile
overlays are skipped with a warning when a record carries no snapshots.
"""
from __future__ import annotations

import warnings
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .run import RunRecord  # noqa: E402


def _save(fig, path: Path):
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def plot_interface(rec: RunRecord, path: str | Path):
    fig, ax = plt.subplots(figsize=(6, 4))
    t = rec.series["t"] / 60.0
    ax.plot(t, 1e3 * rec.series["s"], label="s(t)")
    ax.axhline(1e3 * rec.config["s_r"], ls="--", color="k",
               label="setpoint")
    ax.set_xlabel("t [min]")
    ax.set_ylabel("interface position [mm]")
    ax.legend()
    _save(fig, Path(path))


def plot_control(rec: RunRecord, path: str | Path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(rec.series["t"] / 60.0, rec.series["q_f"])
    ax.axhline(rec.steady.q_f_star, ls="--", color="k",
               label="steady input")
    ax.set_xlabel("t [min]")
    ax.set_ylabel("inlet heat flux [W/m$^2$]")
    ax.legend()
    _save(fig, Path(path))


def plot_inlet_temperature(rec: RunRecord, path: str | Path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(rec.series["t"] / 60.0, rec.series["Ts_inlet"])
    ax.axhline(rec.config["T_m"], ls="--", color="r", label="melting point")
    ax.set_xlabel("t [min]")
    ax.set_ylabel("inlet solid temperature [°C]")
    ax.legend()
    _save(fig, Path(path))


def plot_profiles(rec: RunRecord, path: str | Path,
                  times: list[float] | None = None):
    """Snapshot overlays of true (and, if present, estimated) profiles."""
    if not rec.snapshots:
        warnings.warn("record has no snapshots; profile plot skipped",
                      stacklevel=2)
        return
    snaps = rec.snapshots
    if times is not None:
        snaps = [min(rec.snapshots, key=lambda sn: abs(sn["t"] - tt))
                 for tt in times]
    fig, ax = plt.subplots(figsize=(6, 4))
    colors = plt.cm.viridis([i / max(1, len(snaps) - 1)
                             for i in range(len(snaps))])
    for snap, col in zip(snaps, colors):
        lbl = f"t={snap['t']:.3g}s"
        ax.plot(1e3 * snap["x_s"], snap["Ts"], color=col, label=lbl)
        ax.plot(1e3 * snap["x_l"], snap["Tl"], color=col)
        if "That" in snap:
            ax.plot(1e3 * snap["x_s"], snap["That"], color=col, ls=":")
    ax.axhline(rec.config["T_m"], color="r", lw=0.5)
    ax.set_xlabel("x [mm]")
    ax.set_ylabel("temperature [°C]")
    ax.legend(fontsize=8)
    _save(fig, Path(path))


def plot_pi_comparison(rec_bs: RunRecord, rec_pi: RunRecord,
                       path: str | Path):
    """Two-panel contrast: interface tracking and inlet-temperature validity."""
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6, 7), sharex=True)
    for rec, lbl in ((rec_bs, "backstepping"), (rec_pi, "PI")):
        t = rec.series["t"] / 60.0
        ax1.plot(t, 1e3 * rec.series["s"], label=lbl)
        ax2.plot(t, rec.series["Ts_inlet"], label=lbl)
    ax1.axhline(1e3 * rec_bs.config["s_r"], ls="--", color="k")
    ax1.set_ylabel("interface [mm]")
    ax1.legend()
    ax2.axhline(rec_bs.config["T_m"], ls="--", color="r",
                label="melting point")
    ax2.set_xlabel("t [min]")
    ax2.set_ylabel("inlet temperature [°C]")
    ax2.legend()
    _save(fig, Path(path))


def emit_plots(rec: RunRecord, out_dir: str | Path) -> list[Path]:
    """Standard plot set for one record; returns the files written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, fn in (("interface.svg", plot_interface),
                     ("control.svg", plot_control),
                     ("inlet_temperature.svg", plot_inlet_temperature),
                     ("profiles.svg", plot_profiles)):
        target = out / name
        fn(rec, target)
        if target.exists():
            written.append(target)
    return written
