"""Closed-form steady states at three screw speeds.

For each advection speed b the script solves the equilibrium two-phase
temperature profile anchored at the interface setpoint s_r, prints the
steady inlet flux q_f* (negative = cooling) and the interface heat flux,
and writes the profiles to CSV plus a single overlay plot.
"""
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from extruder.config import (make_config, material_from_config,
                             process_from_config)
from extruder.run import write_steady_csv
from extruder.steady import eval_steady_profile, solve_steady_state

OUT = Path(__file__).parent / "out" / "steady_states"
SPEEDS = [0.002, 0.01, 0.05]


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6, 4))
    for b in SPEEDS:
        cfg = make_config({"b": b})
        m = material_from_config(cfg)
        p = process_from_config(cfg)
        ss = solve_steady_state(m, p)
        print(f"b = {b:6.3f} m/s:  q_f* = {ss.q_f_star:10.4f} W/m^2, "
              f"interface flux K = {ss.K:10.4f} W/m^2")
        write_steady_csv(ss, OUT / f"steady_b{b}.csv")
        x = np.linspace(0.0, p.L, 400)
        T, _ = eval_steady_profile(ss, x)
        ax.plot(1e3 * x, T, label=f"b = {b} m/s")
    ax.axhline(make_config({})["T_m"], color="r", lw=0.5, ls="--",
               label="melting point")
    ax.axvline(1e3 * make_config({})["s_r"], color="k", lw=0.5, ls=":")
    ax.set_xlabel("x [mm]")
    ax.set_ylabel("temperature [°C]")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(OUT / "steady_profiles.png", dpi=150)
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
