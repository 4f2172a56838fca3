"""Two-phase moving-boundary plant: both temperature fields plus the
interface energy balance, with the inlet/interface measurements."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .mesh import (LiquidProfile, SolidProfile, immobilized_rhs_liquid,
                   immobilized_rhs_solid, interface_gradients)
from .params import MaterialParams, ProcessParams
from .steady import SteadyState


@dataclass
class PlantState:
    Ts: SolidProfile
    Tl: LiquidProfile
    t: float = 0.0

    @property
    def s(self) -> float:
        return self.Ts.s


@dataclass(frozen=True)
class Measurements:
    Y1: float  # interface position s(t), m
    Y2: float  # inlet solid temperature T_s(0, t)


def measure(state: PlantState) -> Measurements:
    return Measurements(Y1=state.s, Y2=float(state.Ts.values[0]))


def interface_velocity(state: PlantState, m: MaterialParams,
                       p: ProcessParams) -> float:
    """sdot from the interface energy balance."""
    grad_s, grad_l = interface_gradients(state.Ts, state.Tl, p.L)
    return m.beta_bar * (m.k_s * grad_s - m.k_l * grad_l)


def plant_rhs(state: PlantState, q_f: float, m: MaterialParams,
              p: ProcessParams, s_min: float | None = None):
    """Time derivatives (dTs, dTl, sdot) of the coupled plant."""
    s_dot = interface_velocity(state, m, p)
    dTs = immobilized_rhs_solid(state.Ts.values, state.s, s_dot,
                                -q_f / m.k_s, m, p, s_min)
    dTl = immobilized_rhs_liquid(state.Tl.values, state.s, s_dot,
                                 p.q_m_star, m, p, s_min)
    return dTs, dTl, s_dot


def default_initial_condition(m: MaterialParams, p: ProcessParams, n: int,
                              T_s0_inlet: float = 100.0,
                              init_liquid: str = "linear",
                              ss: SteadyState | None = None) -> PlantState:
    """Linear initial profiles satisfying the boundary data.

    Solid: linear from T_s0_inlet at the inlet to T_m at s_0.  Liquid:
    either linear from T_m at s_0 with the nozzle-flux slope, or the
    equilibrium profile resampled onto (s_0, L) when init_liquid='steady'.
    """
    if T_s0_inlet > m.T_m:
        raise ConfigError(
            f"T_s0_inlet={T_s0_inlet!r} above melting point {m.T_m!r}")
    xi = np.linspace(0.0, 1.0, n)
    Ts = SolidProfile(values=T_s0_inlet + (m.T_m - T_s0_inlet) * xi, s=p.s_0)
    if init_liquid == "linear":
        x = p.s_0 + xi * (p.L - p.s_0)
        Tl_vals = m.T_m + (p.q_m_star / m.k_l) * (x - p.s_0)
    elif init_liquid == "steady":
        if ss is None:
            raise ConfigError("init_liquid='steady' needs a solved "
                              "steady state")
        x = p.s_0 + xi * (p.L - p.s_0)
        Tl_vals = np.asarray(ss.liquid_eval(np.clip(x, ss.s_r, p.L)))
        Tl_vals[0] = m.T_m
    else:
        raise ConfigError(f"unknown init_liquid={init_liquid!r}")
    Tl = LiquidProfile(values=Tl_vals, s=p.s_0)
    return PlantState(Ts=Ts, Tl=Tl, t=0.0)
