"""Fixed-grid operators for the moving-boundary phase domains.

Each phase domain is mapped onto the unit interval (front fixing):

    solid / observer:  x = xi * s(t),            xi in [0, 1]
    liquid:            x = s(t) + xi * (L - s),  xi in [0, 1]

Under the map the heat equation T_t = alpha T_xx - b T_x + h (T_b - T)
picks up a mesh-advection term from the moving nodes.  A node at fixed xi
moves with velocity xdot = xi * sdot (solid) or (1 - xi) * sdot (liquid),
so d/dt|_xi T = T_t|_x + xdot T_x and

    solid:   T_t|_xi = (alpha_s / s^2) T_xixi
                       + ((xi * sdot - b) / s) T_xi + h_s (T_b - T)
    liquid:  T_t|_xi = (alpha_l / w^2) T_xixi
                       + (((1 - xi) * sdot - b) / w) T_xi + h_l (T_b - T)

with w = L - s.  See docs/front_fixing.md for the full derivation.
Spatial discretization is central with ghost nodes at the Neumann ends
and the interface node Dirichlet-pinned at T_m.  The diffusion
coefficient carries an exponential fitting factor (Il'in scheme) so the
stencil stays monotone at any cell Peclet number: at high pull speeds
the advection boundary layers (width alpha / b, a few microns) are far
below any affordable grid, and an unfitted central scheme rings around
them, pushing solid samples above the melting temperature and liquid
samples below it.  The factor is 1 + O(Pe^2) = 1 + O(dxi^2), so the
scheme stays second order on resolved solutions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DegenerateDomainError, GridError, ResampleError
from .params import MaterialParams, ProcessParams


@dataclass(frozen=True)
class ImmobilizedGrid:
    """Uniform node set on [0, 1] for one phase domain."""
    n: int
    phase: str  # 'solid' | 'liquid' | 'observer'

    def __post_init__(self):
        if self.n < 16:
            raise GridError(f"need n >= 16 nodes, got {self.n}")
        if self.phase not in ("solid", "liquid", "observer"):
            raise GridError(f"unknown phase {self.phase!r}")

    @property
    def xi(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n)

    @property
    def dxi(self) -> float:
        return 1.0 / (self.n - 1)

    def physical(self, s: float, L: float) -> np.ndarray:
        """Map the unit grid to physical coordinates."""
        if self.phase == "liquid":
            return s + self.xi * (L - s)
        return self.xi * s


@dataclass
class SolidProfile:
    """Solid (or observer) temperature samples on an immobilized grid."""
    values: np.ndarray
    s: float


@dataclass
class LiquidProfile:
    """Liquid temperature samples on an immobilized grid."""
    values: np.ndarray
    s: float


def fitting_factor(adv: np.ndarray, diff: float, dxi: float) -> np.ndarray:
    """Exponential fitting factor rho * coth(rho), rho = adv * dxi / (2 diff).

    Multiplies the diffusion coefficient; equals 1 + rho^2/3 + O(rho^4)
    for small cell Peclet and |rho| for large, which makes the combined
    central stencil an M-matrix (discrete maximum principle) at any
    Peclet number.
    """
    rho = np.abs(adv) * dxi / (2.0 * diff)
    small = rho < 1e-4
    # tanh-based form is overflow-safe for large rho
    out = np.where(small, 1.0 + rho * rho / 3.0,
                   rho / np.tanh(np.where(small, 1.0, rho)))
    return out


def _check_domain(width: float, s_min: float, what: str):
    if width <= s_min:
        raise DegenerateDomainError(
            f"{what} domain width {width:.3e} m at or below s_min={s_min:.3e}")


def immobilized_rhs_solid(values: np.ndarray, s: float, s_dot: float,
                          grad0: float, m: MaterialParams, p: ProcessParams,
                          s_min: float | None = None) -> np.ndarray:
    """Nodal d/dt of the solid field on the fixed grid.

    grad0 is the physical inlet gradient dT/dx(0); for the plant it is
    -q_f / k_s, the observer adds its injection term.  The interface node
    (xi = 1) is pinned and gets zero rate.
    """
    if s_min is None:
        s_min = 1e-4 * p.L
    _check_domain(s, s_min, "solid")
    n = values.shape[0]
    dxi = 1.0 / (n - 1)
    xi = np.linspace(0.0, 1.0, n)
    dT = np.empty_like(values)

    inv_s = 1.0 / s
    diff = m.alpha_s * inv_s * inv_s
    adv = (xi * s_dot - p.b) * inv_s
    fdiff = diff * fitting_factor(adv, diff, dxi)

    # interior: fitted-diffusion central stencil
    dT[1:-1] = (fdiff[1:-1] * (values[2:] - 2.0 * values[1:-1] + values[:-2])
                / dxi**2
                + adv[1:-1] * (values[2:] - values[:-2]) / (2.0 * dxi)
                + m.h_s * (p.T_b - values[1:-1]))
    # inlet: ghost node from T_xi(0) = grad0 * s
    txi0 = grad0 * s
    ghost = values[1] - 2.0 * dxi * txi0
    dT[0] = (fdiff[0] * (values[1] - 2.0 * values[0] + ghost) / dxi**2
             + adv[0] * txi0
             + m.h_s * (p.T_b - values[0]))
    dT[-1] = 0.0
    return dT


def immobilized_rhs_liquid(values: np.ndarray, s: float, s_dot: float,
                           q_m_star: float, m: MaterialParams,
                           p: ProcessParams,
                           s_min: float | None = None) -> np.ndarray:
    """Nodal d/dt of the liquid field; xi = 0 pinned, Neumann nozzle end."""
    if s_min is None:
        s_min = 1e-4 * p.L
    _check_domain(p.L - s, s_min, "liquid")
    n = values.shape[0]
    dxi = 1.0 / (n - 1)
    xi = np.linspace(0.0, 1.0, n)
    w = p.L - s
    dT = np.empty_like(values)

    diff = m.alpha_l / (w * w)
    adv = ((1.0 - xi) * s_dot - p.b) / w
    fdiff = diff * fitting_factor(adv, diff, dxi)

    dT[1:-1] = (fdiff[1:-1] * (values[2:] - 2.0 * values[1:-1] + values[:-2])
                / dxi**2
                + adv[1:-1] * (values[2:] - values[:-2]) / (2.0 * dxi)
                + m.h_l * (p.T_b - values[1:-1]))
    # nozzle: ghost from T_xi(1) = (q_m^*/k_l) * w
    txi1 = (q_m_star / m.k_l) * w
    ghost = values[-2] + 2.0 * dxi * txi1
    dT[-1] = (fdiff[-1] * (ghost - 2.0 * values[-1] + values[-2]) / dxi**2
              + adv[-1] * txi1
              + m.h_l * (p.T_b - values[-1]))
    dT[0] = 0.0
    return dT


def interface_gradients(Ts: SolidProfile, Tl: LiquidProfile,
                        L: float) -> tuple[float, float]:
    """One-sided second-order physical gradients of both phases at x = s."""
    for prof in (Ts, Tl):
        if prof.values.shape[0] < 3:
            raise GridError("need at least 3 nodes for one-sided gradients")
    vs = Ts.values
    n_s = vs.shape[0]
    dx_s = Ts.s / (n_s - 1)
    grad_s = (3.0 * vs[-1] - 4.0 * vs[-2] + vs[-3]) / (2.0 * dx_s)
    vl = Tl.values
    n_l = vl.shape[0]
    dx_l = (L - Tl.s) / (n_l - 1)
    grad_l = (-3.0 * vl[0] + 4.0 * vl[1] - vl[2]) / (2.0 * dx_l)
    return grad_s, grad_l


def resample_profile(values: np.ndarray, s_old: float, s_new: float,
                     n_new: int | None = None) -> np.ndarray:
    """Resample a solid-type profile from domain (0, s_old) to (0, s_new).

    Monotone cubic (PCHIP) interpolation; endpoint values are carried over
    exactly.  Growing the domain by more than one old cell is refused.
    """
    if s_old <= 0.0 or s_new <= 0.0:
        raise ResampleError("domains must have positive length")
    n_old = values.shape[0]
    if n_new is None:
        n_new = n_old
    if s_new == s_old and n_new == n_old:
        return values.copy()
    dx_old = s_old / (n_old - 1)
    if s_new - s_old > dx_old:
        raise ResampleError(
            f"resampling from s={s_old:.3e} to {s_new:.3e} extrapolates "
            f"beyond one cell ({dx_old:.3e})")
    x_old = np.linspace(0.0, s_old, n_old)
    x_new = np.linspace(0.0, s_new, n_new)
    out = PchipInterpolator(x_old, values, extrapolate=True)(x_new)
    out[0] = values[0]
    if s_new >= s_old:
        # growing domain: pin the (extrapolated) interface end to the old
        # interface value instead of trusting the extrapolant
        out[-1] = values[-1]
    return out
