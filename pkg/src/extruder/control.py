"""Gain-kernel synthesis and the boundary heat-flux control laws.

The kernel phi solves

    alpha_s phi'' - (b + beta_bar C) phi' - (A - beta_bar b C / alpha_s
                                             + h_s) phi = 0,
    phi(0) = 0,  phi'(0) = c / beta_bar,

with the linearization constants C, A taken from the equilibrium.  The
feedback weight is f(x) = phi'(-x) - gamma phi(-x) with
gamma = b / (2 alpha_s).  Depending on the sign of the characteristic
discriminant D the closed form is a two-exponential, a repeated-root, or
an exponentially-weighted sine expression.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegenerateGainError
from .mesh import SolidProfile
from .params import MaterialParams, ProcessParams
from .steady import SteadyState


@dataclass(frozen=True)
class KernelFunctions:
    """Synthesized kernel and derived gains for one configuration."""
    c: float           # control gain, 1/s
    gamma: float       # b / (2 alpha_s), 1/m
    beta_bar: float    # 1 / (rho_s dH)
    C: float           # boundary linearization constant
    A: float           # interface linearization constant, 1/s
    b_bar: float       # b + beta_bar C
    D: float           # characteristic discriminant
    d1: float          # kernel exponents, 1/m (real parts for D < 0)
    d2: float
    alpha_s: float
    k_s: float
    lam0: float        # A - beta_bar b C / alpha_s + h_s, 1/s

    def phi(self, x):
        """Kernel phi(x); vectorized."""
        x = np.asarray(x, dtype=float)
        a = self.alpha_s
        if self.D > 0.0:
            return (self.c / (self.beta_bar * (self.d1 - self.d2))
                    * (np.exp(self.d1 * x) - np.exp(self.d2 * x)))
        mu = self.b_bar / (2.0 * a)
        if self.D == 0.0:
            return self.c / self.beta_bar * x * np.exp(mu * x)
        om = math.sqrt(-self.D) / (2.0 * a)
        return (2.0 * self.c * a / (self.beta_bar * math.sqrt(-self.D))
                * np.exp(mu * x) * np.sin(om * x))

    def phi_prime(self, x):
        x = np.asarray(x, dtype=float)
        a = self.alpha_s
        if self.D > 0.0:
            return (self.c / (self.beta_bar * (self.d1 - self.d2))
                    * (self.d1 * np.exp(self.d1 * x)
                       - self.d2 * np.exp(self.d2 * x)))
        mu = self.b_bar / (2.0 * a)
        if self.D == 0.0:
            return self.c / self.beta_bar * (1.0 + mu * x) * np.exp(mu * x)
        om = math.sqrt(-self.D) / (2.0 * a)
        amp = 2.0 * self.c * a / (self.beta_bar * math.sqrt(-self.D))
        return amp * np.exp(mu * x) * (mu * np.sin(om * x)
                                       + om * np.cos(om * x))

    def f(self, x):
        """Feedback weight f(x) = phi'(-x) - gamma phi(-x)."""
        x = np.asarray(x, dtype=float)
        return self.phi_prime(-x) - self.gamma * self.phi(-x)

    def f_prime(self, x):
        x = np.asarray(x, dtype=float)
        # d/dx [phi'(-x) - gamma phi(-x)] = -phi''(-x) + gamma phi'(-x)
        return -self.phi_pp(-x) + self.gamma * self.phi_prime(-x)

    def phi_pp(self, x):
        """phi''(x) via the kernel ODE itself."""
        x = np.asarray(x, dtype=float)
        return (self.b_bar * self.phi_prime(x)
                + self.lam0 * self.phi(x)) / self.alpha_s

    def g(self, x):
        """Target-system forcing weight g(x) = phi'(x) - (bb C / a) phi(x)."""
        x = np.asarray(x, dtype=float)
        return (self.phi_prime(x)
                - self.beta_bar * self.C / self.alpha_s * self.phi(x))


def synthesize_kernel(m: MaterialParams, p: ProcessParams, ss: SteadyState,
                      c: float) -> KernelFunctions:
    """Build the kernel for gain c against the given equilibrium."""
    if c <= 0.0:
        raise ConfigError(f"control gain must be > 0, got {c!r}")
    beta_bar = m.beta_bar
    a = m.alpha_s
    # Linearization constants from the equilibrium profile derivatives at s_r.
    C = m.k_s * float(ss.solid_eval(ss.s_r, 1))
    A = beta_bar * (m.k_s * float(ss.solid_eval(ss.s_r, 2))
                    - m.k_l * float(ss.liquid_eval(ss.s_r, 2)))
    b_bar = p.b + beta_bar * C
    lam0 = A - beta_bar * p.b * C / a + m.h_s
    D = b_bar * b_bar + 4.0 * a * lam0
    if D > 0.0:
        root = math.sqrt(D)
        d1 = (b_bar + root) / (2.0 * a)
        d2 = (b_bar - root) / (2.0 * a)
    else:
        d1 = d2 = b_bar / (2.0 * a)
    return KernelFunctions(c=c, gamma=p.b / (2.0 * a), beta_bar=beta_bar,
                           C=C, A=A, b_bar=b_bar, D=D, d1=d1, d2=d2,
                           alpha_s=a, k_s=m.k_s, lam0=lam0)


def _trapz(y: np.ndarray, x: np.ndarray) -> float:
    return float(np.trapezoid(y, x))


def output_feedback_qf(kf: KernelFunctions, ss: SteadyState,
                       Y1: float, Y2: float,
                       That: np.ndarray) -> float:
    """Observer-based output-feedback inlet heat flux.

    That are the estimated solid temperatures on the uniform grid over
    (0, Y1).  Quadrature is composite trapezoid on that grid.
    """
    x = np.linspace(0.0, Y1, That.shape[0])
    Teq = ss.solid_eval(x)
    integral = _trapz(kf.f(x) * (That - Teq), x)
    return (ss.q_f_star
            - kf.gamma * kf.k_s * (Y2 - float(ss.solid_eval(0.0)))
            - kf.beta_bar * kf.k_s / kf.alpha_s * integral
            + float(kf.f(Y1)) * (Y1 - ss.s_r))


def full_state_feedback_U(kf: KernelFunctions, ss: SteadyState,
                          Ts: np.ndarray, s: float) -> float:
    """Full-state feedback U from the true solid profile on (0, s)."""
    x = np.linspace(0.0, s, Ts.shape[0])
    u = -kf.k_s * (Ts - ss.solid_eval(x))
    X = s - ss.s_r
    return (-kf.gamma * float(u[0])
            - kf.beta_bar / kf.alpha_s * _trapz(kf.f(x) * u, x)
            - float(kf.f(s)) * X)


def full_state_qf(kf: KernelFunctions, ss: SteadyState,
                  Ts: np.ndarray, s: float) -> float:
    """Inlet flux q_f = q_f^* - U for the full-state law."""
    return ss.q_f_star - full_state_feedback_U(kf, ss, Ts, s)


def control_Z(kf: KernelFunctions, ss: SteadyState,
              That: np.ndarray, s: float) -> float:
    """Positivity diagnostic Z = -(bb/a) int f uhat - f(s) (s - s_r)."""
    x = np.linspace(0.0, s, That.shape[0])
    uhat = -kf.k_s * (That - ss.solid_eval(x))
    return (-kf.beta_bar / kf.alpha_s * _trapz(kf.f(x) * uhat, x)
            - float(kf.f(s)) * (s - ss.s_r))


def pi_control(s: float, s_r: float, integ_state: float, dt: float,
               s_prev: float, Kp: float, Ki: float,
               q_f_star: float) -> tuple[float, float]:
    """PI law q_f = q_f^* + Kp (s - s_r) + Ki * accumulated error.

    The integral term accumulates by the trapezoid rule over the sampling
    interval dt using the previous sample s_prev.  Returns
    (q_f, new integ_state).
    """
    integ_state = integ_state + 0.5 * dt * ((s - s_r) + (s_prev - s_r))
    return q_f_star + Kp * (s - s_r) + Ki * integ_state, integ_state


def check_setpoint_restriction(p: ProcessParams, That0: SolidProfile,
                               kf: KernelFunctions, m: MaterialParams,
                               T_m: float) -> bool:
    """True iff the setpoint exceeds the reachability lower bound.

    The bound is s_0 plus the f-weighted initial estimate deficit; the
    quadrature matches the control-law trapezoid rule.
    """
    s0 = That0.s
    fs0 = float(kf.f(s0))
    if fs0 == 0.0:
        raise DegenerateGainError("f(s_0) = 0: setpoint bound undefined")
    x = np.linspace(0.0, s0, That0.values.shape[0])
    integral = _trapz(kf.f(x) / fs0 * (T_m - That0.values), x)
    bound = s0 + m.beta_bar * m.k_s / m.alpha_s * integral
    return p.s_r > bound
