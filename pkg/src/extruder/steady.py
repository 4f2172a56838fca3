"""Closed-form equilibrium temperature profiles and the steady inlet flux.

The equilibrium of the two-phase model solves, per phase,

    0 = alpha T'' - b T' + h (T_b - T)

with T(s_r) = T_m on both sides, a Neumann condition at each outer end,
and flux balance k_s T_s'(s_r) = k_l T_l'(s_r) at the interface.  The
solution is a two-exponential profile per phase.  Amplitudes are stored
anchored so every exponential is evaluated with a non-positive argument;
the naive parametrization overflows for fast screw speeds where
q1 (L - s_r) runs into the thousands.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .params import MaterialParams, ProcessParams

# Below this, b^2 + 4 alpha h is treated as a repeated root (b = 0, h = 0)
# and the phase profile is the limiting linear one.
_REPEATED_ROOT_TOL = 1e-300


@dataclass(frozen=True)
class SteadyState:
    """Equilibrium profiles for a prescribed (s_r, T_b, q_m_star) triple.

    q1, q2 / q3, q4 are the liquid / solid spatial exponents (1/m); p1..p4
    the corresponding amplitudes in the interface-anchored parametrization
    ``T = p e^{q (x - s_r)} + T_b``.  For the liquid growing mode the
    nozzle-anchored amplitude a1 (T = a1 e^{q1 (x - L)} + ...) is kept as
    well, since p1 itself may underflow.  K is the interface heat flux
    (W/m^2) and q_f_star the steady inlet flux (negative = cooling).
    """
    q1: float
    q2: float
    q3: float
    q4: float
    p1: float
    p2: float
    p3: float
    p4: float
    a1: float
    K: float
    q_f_star: float
    s_r: float
    L: float
    T_b: float
    T_m: float
    q_m_star: float
    k_s: float
    k_l: float
    liquid_linear: bool
    solid_linear: bool

    # -- profile evaluation -------------------------------------------------

    def liquid_eval(self, x, order: int = 0):
        """Liquid-branch profile value (order 0) or spatial derivative."""
        x = np.asarray(x, dtype=float)
        if self.liquid_linear:
            slope = self.q_m_star / self.k_l
            if order == 0:
                return self.T_m + slope * (x - self.s_r)
            if order == 1:
                return np.full_like(x, slope)
            return np.zeros_like(x)
        t1 = self.a1 * np.exp(self.q1 * (x - self.L)) * self.q1 ** order
        t2 = self.p2 * np.exp(self.q2 * (x - self.s_r)) * self.q2 ** order
        out = t1 + t2
        if order == 0:
            out = out + self.T_b
        return out

    def solid_eval(self, x, order: int = 0):
        """Solid-branch profile value (order 0) or spatial derivative."""
        x = np.asarray(x, dtype=float)
        if self.solid_linear:
            slope = self.K / self.k_s
            if order == 0:
                return self.T_m + slope * (x - self.s_r)
            if order == 1:
                return np.full_like(x, slope)
            return np.zeros_like(x)
        t3 = self.p3 * np.exp(self.q3 * (x - self.s_r)) * self.q3 ** order
        t4 = self.p4 * np.exp(self.q4 * (x - self.s_r)) * self.q4 ** order
        out = t3 + t4
        if order == 0:
            out = out + self.T_b
        return out


def _exponents(b: float, alpha: float, h: float):
    """Roots of alpha q^2 - b q - h = 0, or None for the repeated-root case."""
    disc = b * b + 4.0 * alpha * h
    if disc <= _REPEATED_ROOT_TOL:
        return None
    root = math.sqrt(disc)
    return (b + root) / (2.0 * alpha), (b - root) / (2.0 * alpha)


def solve_steady_state(m: MaterialParams, p: ProcessParams) -> SteadyState:
    """Solve the equilibrium prescribed by (s_r, T_b, q_m_star)."""
    if not (0.0 < p.s_r < p.L):
        raise DomainError(f"setpoint s_r={p.s_r!r} outside (0, L)")
    r = p.T_b - m.T_m
    ell = p.L - p.s_r

    liq = _exponents(p.b, m.alpha_l, m.h_l)
    if liq is None:
        # b = 0, h_l = 0: alpha T'' = 0, slope fixed by the nozzle flux.
        q1 = q2 = 0.0
        p1 = p2 = a1 = 0.0
        K = p.q_m_star
        liquid_linear = True
    else:
        q1, q2 = liq
        # Scale by E1 = e^{q1 ell} so all exponentials have arguments <= 0.
        e2 = math.exp(q2 * ell)           # E2, argument <= 0
        e21 = math.exp((q2 - q1) * ell)   # E2 / E1
        inv_e1 = math.exp(-q1 * ell)      # 1 / E1
        den = q1 - q2 * e21               # (q1 E1 - q2 E2) / E1, > 0
        p1 = (r * q2 * e21 + p.q_m_star / m.k_l * inv_e1) / den
        p2 = -(r * q1 + p.q_m_star / m.k_l * inv_e1) / den
        a1 = (r * q2 * e2 + p.q_m_star / m.k_l) / den
        K = (-m.k_l * r * q1 * q2 * (1.0 - e21)
             + (q1 - q2) * p.q_m_star * inv_e1) / den
        liquid_linear = False

    sol = _exponents(p.b, m.alpha_s, m.h_s)
    if sol is None:
        # b = 0, h_s = 0: linear profile, slope fixed by the interface flux.
        q3 = q4 = 0.0
        p3 = p4 = 0.0
        q_f_star = -K
        solid_linear = True
    else:
        q3, q4 = sol
        p3 = (r * q4 + K / m.k_s) / (q3 - q4)
        p4 = (-r * q3 - K / m.k_s) / (q3 - q4)
        q_f_star = -m.k_s * (p3 * q3 * math.exp(-q3 * p.s_r)
                             + p4 * q4 * math.exp(-q4 * p.s_r))
        solid_linear = False

    ss = SteadyState(q1=q1, q2=q2, q3=q3, q4=q4,
                     p1=p1, p2=p2, p3=p3, p4=p4, a1=a1,
                     K=K, q_f_star=q_f_star,
                     s_r=p.s_r, L=p.L, T_b=p.T_b, T_m=m.T_m,
                     q_m_star=p.q_m_star, k_s=m.k_s, k_l=m.k_l,
                     liquid_linear=liquid_linear, solid_linear=solid_linear)
    # Interface conditions must close to round-off by construction.
    scale = max(abs(p.T_b), abs(m.T_m), 1.0)
    assert abs(float(ss.solid_eval(p.s_r)) - m.T_m) < 1e-9 * scale
    assert abs(float(ss.liquid_eval(p.s_r)) - m.T_m) < 1e-9 * scale
    return ss


def eval_steady_profile(ss: SteadyState, x):
    """Evaluate (T_eq, dT_eq/dx) at physical position(s) x in [0, L].

    The solid branch is used for x < s_r, the liquid branch for x >= s_r.
    """
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xa < 0.0) or np.any(xa > ss.L):
        raise DomainError(f"position outside [0, {ss.L}]")
    # evaluate each branch only on its own subdomain; the unused branch
    # can overflow its growing exponential outside of it
    solid = xa < ss.s_r
    T = np.empty_like(xa)
    dT = np.empty_like(xa)
    T[solid] = ss.solid_eval(xa[solid])
    dT[solid] = ss.solid_eval(xa[solid], 1)
    T[~solid] = ss.liquid_eval(xa[~solid])
    dT[~solid] = ss.liquid_eval(xa[~solid], 1)
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(T[0]), float(dT[0])
    return T, dT


def barrel_temperature_bounds(m: MaterialParams,
                              p: ProcessParams) -> tuple[float, float]:
    """Admissible range (lower, upper) for T_b - T_m.

    Within the returned interval the equilibrium satisfies the phase
    validity conditions (solid at or below T_m, liquid at or above).
    Degenerate exponents (pure conduction, no barrel coupling) make the
    corresponding bound infinite since T_b then drops out of the profile.
    """
    ell = p.L - p.s_r
    liq = _exponents(p.b, m.alpha_l, m.h_l)
    sol = _exponents(p.b, m.alpha_s, m.h_s)
    if liq is None:
        return (-math.inf, math.inf) if p.q_m_star > 0 else (0.0, 0.0)
    q1, q2 = liq
    if q2 == 0.0 or (sol is None):
        upper = math.inf if p.q_m_star > 0 else 0.0
    else:
        upper = -p.q_m_star / (m.k_l * q2 * math.exp(q2 * ell))
    if sol is None:
        lower = -math.inf if p.q_m_star > 0 else 0.0
    else:
        q3, _ = sol
        e21 = math.exp((q2 - q1) * ell)
        inv_e1 = math.exp(-q1 * ell)
        # q_den scaled by 1/E1, as is the numerator (q1 - q2) q_m^*.
        q_den = (-m.k_l * q1 * q2 * (1.0 - e21)
                 + m.k_s * q3 * (q1 - q2 * e21))
        lower = -(q1 - q2) * p.q_m_star * inv_e1 / q_den
    return lower, upper
