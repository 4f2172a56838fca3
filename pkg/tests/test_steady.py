"""Closed-form steady states against independent numerical oracles.

The oracle is a backward-shooting solve of the steady ODEs in each phase,
sharing nothing with the closed-form module except the parameter
container.  Both phases are integrated from their Neumann/flux end toward
the interface, which is the decaying direction of the fast exponential
mode, so the shooting stays well conditioned at every advection speed.
"""
import dataclasses
import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from extruder.errors import DomainError
from extruder.params import HDPE, MaterialParams, ProcessParams
from extruder.steady import (barrel_temperature_bounds, eval_steady_profile,
                             solve_steady_state)
from conftest import make_proc

SPEEDS = [0.002, 0.01, 0.05]
_IVP = dict(method="LSODA", rtol=1e-11, atol=1e-11, dense_output=True)


def bvp_oracle(m: MaterialParams, p: ProcessParams):
    """Independent steady solve by backward shooting.

    Liquid on (s_r, L): integrate from L toward s_r with the known flux
    T'(L) = q_m*/k_l and unknown T(L); the ODE is linear in the state, so
    two trial solves and a secant update hit T(s_r) = T_m exactly.  Solid
    on (0, s_r): single backward IVP from the interface using T(s_r)=T_m
    and the flux-balance gradient.  Returns callables and q_f*.
    """
    def rhs_liq(x, y):
        return [y[1], (p.b * y[1] - m.h_l * (p.T_b - y[0])) / m.alpha_l]

    def shoot(theta):
        return solve_ivp(rhs_liq, (p.L, p.s_r),
                         [theta, p.q_m_star / m.k_l], **_IVP)

    s1, s2 = shoot(m.T_m), shoot(m.T_m + 1.0)
    f1 = s1.y[0, -1] - m.T_m
    f2 = s2.y[0, -1] - m.T_m
    theta = m.T_m - f1 / (f2 - f1)
    sol_l = shoot(theta)
    assert abs(sol_l.y[0, -1] - m.T_m) < 1e-8

    grad_l_sr = float(sol_l.y[1, -1])

    def rhs_sol(x, y):
        return [y[1], (p.b * y[1] - m.h_s * (p.T_b - y[0])) / m.alpha_s]

    sol_s = solve_ivp(rhs_sol, (p.s_r, 0.0),
                      [m.T_m, m.k_l * grad_l_sr / m.k_s], **_IVP)
    q_f_star = -m.k_s * float(sol_s.y[1, -1])
    return (lambda x: sol_l.sol(x)), (lambda x: sol_s.sol(x)), q_f_star


class TestClosedFormVsBVP:
    @pytest.mark.parametrize("b", SPEEDS)
    @pytest.mark.parametrize("hbar", [0.0, 1e4])
    def test_profiles_match_oracle(self, b, hbar):
        m = dataclasses.replace(HDPE, hbar_s=hbar, hbar_l=hbar)
        p = make_proc(b=b)
        ss = solve_steady_state(m, p)
        sol_l, sol_s, qf_oracle = bvp_oracle(m, p)
        scale = max(abs(p.T_b), abs(m.T_m), 1.0)
        xl = np.linspace(p.s_r, p.L, 500)
        xs = np.linspace(0.0, p.s_r, 500)
        assert np.max(np.abs(ss.liquid_eval(xl) - sol_l(xl)[0])) < 1e-6 * scale
        assert np.max(np.abs(ss.solid_eval(xs) - sol_s(xs)[0])) < 1e-6 * scale
        # [DERIVED] steady input agrees with the BVP oracle
        assert ss.q_f_star == pytest.approx(qf_oracle, abs=1e-6 * scale)

    def test_reference_case_qf_star(self):
        # [DERIVED] frozen oracle value, b=2 mm/s, hbar=1e4 everywhere
        m = dataclasses.replace(HDPE, hbar_s=1e4, hbar_l=1e4)
        ss = solve_steady_state(m, make_proc(b=0.002))
        _, _, qf = bvp_oracle(m, make_proc(b=0.002))
        assert ss.q_f_star == pytest.approx(qf, rel=1e-8)


class TestResidualsAndBCs:
    @pytest.mark.parametrize("b", [0.0] + SPEEDS)
    @pytest.mark.parametrize("hbar", [0.0, 1e4])
    def test_ode_residual(self, b, hbar):
        # residual of alpha T'' - b T' + h (T_b - T) at 1000 points
        m = dataclasses.replace(HDPE, hbar_s=hbar, hbar_l=hbar)
        p = make_proc(b=b)
        ss = solve_steady_state(m, p)
        scale = max(abs(p.T_b), abs(m.T_m), 1.0)
        xs = np.linspace(0.0, p.s_r, 1000)
        rs = (m.alpha_s * ss.solid_eval(xs, 2) - b * ss.solid_eval(xs, 1)
              + m.h_s * (p.T_b - ss.solid_eval(xs)))
        assert np.max(np.abs(rs)) < 1e-9 * scale
        xl = np.linspace(p.s_r, p.L, 1000)
        rl = (m.alpha_l * ss.liquid_eval(xl, 2) - b * ss.liquid_eval(xl, 1)
              + m.h_l * (p.T_b - ss.liquid_eval(xl)))
        assert np.max(np.abs(rl)) < 1e-9 * scale

    @pytest.mark.parametrize("b", [0.0] + SPEEDS)
    def test_boundary_and_interface_conditions(self, b):
        m = dataclasses.replace(HDPE, hbar_s=1e4, hbar_l=1e4)
        p = make_proc(b=b)
        ss = solve_steady_state(m, p)
        assert ss.solid_eval(p.s_r) == pytest.approx(m.T_m, abs=1e-9)
        assert ss.liquid_eval(p.s_r) == pytest.approx(m.T_m, abs=1e-9)
        # nozzle flux
        assert m.k_l * ss.liquid_eval(p.L, 1) == pytest.approx(
            p.q_m_star, rel=1e-10)
        # stationary interface: conductive fluxes balance
        assert m.k_s * ss.solid_eval(p.s_r, 1) == pytest.approx(
            m.k_l * ss.liquid_eval(p.s_r, 1), rel=1e-9, abs=1e-9)
        # inlet flux matches the steady input
        assert -m.k_s * ss.solid_eval(0.0, 1) == pytest.approx(
            ss.q_f_star, rel=1e-12, abs=1e-12)

    def test_overflow_safe_at_high_speed(self):
        # exponents reach ~1e4 per metre; amplitudes must stay finite
        ss = solve_steady_state(HDPE, make_proc(b=0.05))
        x = np.linspace(0.0, 0.1, 1000)
        T = eval_steady_profile(ss, x)
        assert np.all(np.isfinite(T))

    def test_repeated_root_linear_branch(self):
        # b = 0, hbar = 0: exponential basis degenerates to linear profiles
        ss = solve_steady_state(HDPE, make_proc(b=0.0))
        assert ss.liquid_linear and ss.solid_linear
        xl = np.linspace(0.07, 0.1, 50)
        expect = HDPE.T_m + 100.0 / HDPE.k_l * (xl - 0.07)
        assert np.allclose(ss.liquid_eval(xl), expect, rtol=1e-12)
        # solid carries the same flux, linear in x
        assert ss.solid_eval(0.035, 1) == pytest.approx(
            100.0 / HDPE.k_s, rel=1e-12)

    def test_eval_outside_domain_raises(self):
        ss = solve_steady_state(HDPE, make_proc())
        with pytest.raises(DomainError):
            eval_steady_profile(ss, np.array([-0.01]))
        with pytest.raises(DomainError):
            eval_steady_profile(ss, np.array([0.11]))


class TestBarrelBounds:
    def test_interval_contains_reference_barrel(self):
        # T_b - T_m = 10 for the 145 C barrel must lie inside the bounds
        m = dataclasses.replace(HDPE, hbar_s=1e4, hbar_l=1e4)
        lo, hi = barrel_temperature_bounds(m, make_proc(b=0.002))
        assert lo < 10.0 < hi

    def test_monotonicity_oracle_inside_bounds(self):
        # [DERIVED] fine-grid sign check of the profiles for barrel
        # temperatures strictly inside the admissible interval
        m = dataclasses.replace(HDPE, hbar_s=1e4, hbar_l=1e4)
        lo, hi = barrel_temperature_bounds(m, make_proc(b=0.0))
        assert math.isfinite(lo) and math.isfinite(hi)
        rng = np.random.default_rng(7)
        for r in rng.uniform(lo + 1e-9, hi - 1e-9, size=20):
            p = make_proc(b=0.0, T_b=m.T_m + r)
            ss = solve_steady_state(m, p)
            xs = np.linspace(0.0, p.s_r, 2000)
            xl = np.linspace(p.s_r, p.L, 2000)
            tol = 1e-9 * max(abs(p.T_b), abs(m.T_m), 1.0)
            assert np.max(ss.solid_eval(xs)) <= m.T_m + tol
            assert np.min(ss.liquid_eval(xl)) >= m.T_m - tol

    def test_degenerate_exchange_gives_infinite_bounds(self):
        # with hbar = 0 the barrel decouples: any temperature is admissible
        lo, hi = barrel_temperature_bounds(HDPE, make_proc(b=0.002))
        assert math.isinf(hi) or hi > 1e6
