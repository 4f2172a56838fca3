"""Material and process parameters with derived transport coefficients.

All temperatures are on one affine scale (degrees C throughout the shipped
configurations).  Heat-transfer coefficients ``hbar_*`` are volumetric
(W m^-3 K^-1); the reduced coefficients used by the PDEs are
``alpha_i = k_i / (rho_i c_i)`` and ``h_i = hbar_i / (rho_i c_i)``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError


@dataclass(frozen=True)
class MaterialParams:
    rho_s: float   # solid density, kg/m^3
    rho_l: float   # melt density, kg/m^3
    c_s: float     # solid specific heat, J/(kg K)
    c_l: float     # melt specific heat, J/(kg K)
    k_s: float     # solid conductivity, W/(m K)
    k_l: float     # melt conductivity, W/(m K)
    hbar_s: float  # solid volumetric heat-transfer coefficient, W/(m^3 K)
    hbar_l: float  # melt volumetric heat-transfer coefficient, W/(m^3 K)
    dH: float      # latent heat of fusion, J/kg
    T_m: float     # melting point

    def __post_init__(self):
        for name in ("rho_s", "rho_l", "c_s", "c_l", "k_s", "k_l", "dH"):
            if not getattr(self, name) > 0.0:
                raise ConfigError(f"material parameter {name} must be > 0, "
                                  f"got {getattr(self, name)!r}")
        for name in ("hbar_s", "hbar_l"):
            if getattr(self, name) < 0.0:
                raise ConfigError(f"material parameter {name} must be >= 0, "
                                  f"got {getattr(self, name)!r}")

    @property
    def alpha_s(self) -> float:
        return self.k_s / (self.rho_s * self.c_s)

    @property
    def alpha_l(self) -> float:
        return self.k_l / (self.rho_l * self.c_l)

    @property
    def h_s(self) -> float:
        return self.hbar_s / (self.rho_s * self.c_s)

    @property
    def h_l(self) -> float:
        return self.hbar_l / (self.rho_l * self.c_l)

    @property
    def beta_bar(self) -> float:
        """Interface mobility 1/(rho_s dH), m^3 K / J scaled by conductivity."""
        return 1.0 / (self.rho_s * self.dH)


def derive_diffusivities(m: MaterialParams) -> tuple[float, float, float, float]:
    """Return (alpha_s, alpha_l, h_s, h_l) derived from the raw constants."""
    return m.alpha_s, m.alpha_l, m.h_s, m.h_l


@dataclass(frozen=True)
class ProcessParams:
    L: float         # extruder length, m
    b: float         # screw advection speed, m/s
    T_b: float       # barrel temperature
    q_m_star: float  # nozzle heat flux, W/m^2
    s_r: float       # interface setpoint, m
    s_0: float       # initial interface position, m

    def __post_init__(self):
        if not self.L > 0.0:
            raise ConfigError(f"L must be > 0, got {self.L!r}")
        if not (0.0 < self.s_0 < self.L):
            raise ConfigError(f"need 0 < s_0 < L, got s_0={self.s_0!r}")
        if not (0.0 < self.s_r < self.L):
            raise ConfigError(f"need 0 < s_r < L, got s_r={self.s_r!r}")
        if self.s_0 >= self.s_r:
            raise ConfigError(f"need s_0 < s_r, got s_0={self.s_0!r}, "
                              f"s_r={self.s_r!r}")
        if self.b < 0.0:
            raise ConfigError(f"b must be >= 0, got {self.b!r}")
        if self.q_m_star < 0.0:
            raise ConfigError(f"q_m_star must be >= 0, got {self.q_m_star!r}")


# High-density polyethylene, solid/melt properties measured separately.
# hbar defaults to zero (pure conduction-advection); nonzero values are
# exercised through configuration.
HDPE = MaterialParams(rho_s=955.0, rho_l=780.0,
                      c_s=1895.0, c_l=2640.0,
                      k_s=0.373, k_l=0.324,
                      hbar_s=0.0, hbar_l=0.0,
                      dH=39000.0, T_m=135.0)
