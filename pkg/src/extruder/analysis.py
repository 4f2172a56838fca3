"""Runtime verification: validity flags, norms, decay fits, Lyapunov traces.

Maximum-principle statements hold exactly only in the continuum, so every
flag carries an explicit grid tolerance eps_grid.  The shipped default is
three times the worst refinement error observed at the default resolution
(n = 101) on the acceptance scenarios.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .control import KernelFunctions
from .errors import AlignmentError, ExtruderError
from .observer import ObserverState
from .plant import PlantState
from .steady import SteadyState

#: Default grid tolerance for invariant flags (temperature units / metres).
EPS_GRID = 0.15


@dataclass
class InvariantReport:
    """Signed worst-case margins over a run; pass = margin >= -eps_grid."""
    eps_grid: float = EPS_GRID
    valid_solid: float = np.inf       # min over run of T_m - max(T_s)
    valid_liquid: float = np.inf      # min over run of min(T_l) - T_m
    sdot_nonneg: float = np.inf       # min sdot
    s_above_s0: float = np.inf        # min (s - s_0)
    s_below_sr: float = np.inf        # min (s_r - s)
    Z_positive: float = np.inf        # min Z
    underestimate: float = np.inf     # min over run of min(T_s - That)
    samples: int = 0

    def update(self, **margins: float):
        for k, v in margins.items():
            setattr(self, k, min(getattr(self, k), float(v)))
        self.samples += 1

    def flags(self) -> dict[str, bool]:
        e = self.eps_grid
        return {k: getattr(self, k) >= -e
                for k in ("valid_solid", "valid_liquid", "sdot_nonneg",
                          "s_above_s0", "s_below_sr", "Z_positive",
                          "underestimate")}

    def all_pass(self, keys=None) -> bool:
        f = self.flags()
        return all(f[k] for k in (keys or f))


def validity_check(state: PlantState, tol: float = EPS_GRID,
                   T_m: float | None = None) -> dict:
    """Margins and flags of the phase validity conditions for one state."""
    if T_m is None:
        T_m = float(state.Ts.values[-1])
    solid_margin = float(T_m - np.max(state.Ts.values))
    liquid_margin = float(np.min(state.Tl.values) - T_m)
    return {"valid_solid_margin": solid_margin,
            "valid_liquid_margin": liquid_margin,
            "valid_solid": solid_margin >= -tol,
            "valid_liquid": liquid_margin >= -tol}


def h1_norm(values: np.ndarray, reference: np.ndarray,
            x: np.ndarray) -> float:
    """H1 norm of the deviation values - reference on the grid x."""
    if values.shape != reference.shape or values.shape != x.shape:
        raise AlignmentError("profile, reference, and grid sizes differ")
    d = values - reference
    dd = np.gradient(d, x)
    return float(np.sqrt(np.trapezoid(d * d, x) + np.trapezoid(dd * dd, x)))


@dataclass
class DecayFit:
    window: tuple[float, float]
    rate: float          # fitted decay rate (positive = decaying), 1/s
    theoretical: float | None = None
    r_squared: float = np.nan

    @property
    def ratio(self) -> float | None:
        if self.theoretical in (None, 0.0):
            return None
        return self.rate / self.theoretical

    @property
    def conclusive(self) -> bool:
        return bool(self.r_squared >= 0.95)


def fit_decay_rate(t: np.ndarray, norm: np.ndarray,
                   skip_fraction: float = 0.1,
                   theoretical: float | None = None) -> DecayFit:
    """Least-squares exponential decay rate of a norm time series.

    Fits log(norm) against t on the window after the initial transient
    (first skip_fraction of the span is dropped).
    """
    t = np.asarray(t, dtype=float)
    norm = np.asarray(norm, dtype=float)
    t0 = t[0] + skip_fraction * (t[-1] - t[0])
    sel = t >= t0
    tw, nw = t[sel], norm[sel]
    if np.any(nw <= 0.0):
        raise ExtruderError("non-positive norm values in the fit window")
    logn = np.log(nw)
    A = np.vstack([tw, np.ones_like(tw)]).T
    coef, res, *_ = np.linalg.lstsq(A, logn, rcond=None)
    slope = coef[0]
    pred = A @ coef
    ss_res = float(np.sum((logn - pred) ** 2))
    ss_tot = float(np.sum((logn - np.mean(logn)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return DecayFit(window=(float(tw[0]), float(tw[-1])), rate=-slope,
                    theoretical=theoretical, r_squared=r2)


def observer_decay_rate_bound(m, p) -> float:
    """Theorem-style observer decay rate 2 (h_s + b^2/4a + a/4L^2), 1/s.

    This is the exponent of the squared-norm (Lyapunov) estimate; the
    unsquared H1 norm decays at half this rate.
    """
    a = m.alpha_s
    return 2.0 * (m.h_s + p.b ** 2 / (4.0 * a) + a / (4.0 * p.L ** 2))


def closed_loop_decay_rate_bound(m, p, c: float) -> float:
    """Theorem-style closed-loop rate min{a/16 s_r + b^2/4a + h_s, c}."""
    a = m.alpha_s
    return min(a / (16.0 * p.s_r) + p.b ** 2 / (4.0 * a) + m.h_s, c)


# -- Lyapunov diagnostics ---------------------------------------------------

def estimation_lyapunov(plant: PlantState, obs: ObserverState,
                        gamma: float) -> float:
    """Vtilde = 1/2 || (T_s - That) e^{-gamma x} ||_{H1}^2 on (0, s)."""
    s = plant.s
    n = plant.Ts.values.shape[0]
    x = np.linspace(0.0, s, n)
    z = (plant.Ts.values - obs.That.values) * np.exp(-gamma * x)
    dz = np.gradient(z, x)
    return 0.5 * float(np.trapezoid(z * z, x) + np.trapezoid(dz * dz, x))


def backstepping_transform(kf: KernelFunctions, ss: SteadyState,
                           That: np.ndarray, s: float) -> np.ndarray:
    """what(x) = uhat - (bb/a) int_x^s phi(x-y) uhat(y) dy - phi(x-s) X."""
    n = That.shape[0]
    x = np.linspace(0.0, s, n)
    uhat = -kf.k_s * (That - ss.solid_eval(x))
    X = s - ss.s_r
    what = np.empty(n)
    for i in range(n):
        yy = x[i:]
        integrand = np.asarray(kf.phi(x[i] - yy)) * uhat[i:]
        integral = float(np.trapezoid(integrand, yy)) if yy.size > 1 else 0.0
        what[i] = (uhat[i] - kf.beta_bar / kf.alpha_s * integral
                   - float(kf.phi(x[i] - s)) * X)
    return what


def closed_loop_lyapunov(kf: KernelFunctions, ss: SteadyState,
                         That: np.ndarray, s: float) -> float:
    """Vhat = V1 + V2 + p V3 of the transformed closed-loop state."""
    n = That.shape[0]
    x = np.linspace(0.0, s, n)
    what = backstepping_transform(kf, ss, That, s)
    z = what * np.exp(-kf.gamma * x)
    dz = np.gradient(z, x)
    V1 = 0.5 * float(np.trapezoid(z * z, x))
    V2 = 0.5 * float(np.trapezoid(dz * dz, x))
    pw = (kf.c * kf.alpha_s * np.exp(-2.0 * kf.gamma * ss.s_r)
          / (16.0 * kf.beta_bar ** 2 * ss.s_r))
    V3 = 0.5 * (s - ss.s_r) ** 2
    return V1 + V2 + pw * V3
