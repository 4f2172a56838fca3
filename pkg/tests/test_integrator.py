"""Adaptive linearly implicit stepper: stiff stability, order, fixed points."""
import numpy as np
import pytest

from extruder.errors import SolverError
from extruder.integrator import (RosenbrockStepper, StepControl,
                                 finite_difference_jacobian, step)


def integrate(rhs, y0, t_end, ctl=None, error_mask=None):
    ctl = ctl or StepControl()
    st = RosenbrockStepper(rhs, ctl, error_mask)
    t, y, dt = 0.0, np.asarray(y0, float), ctl.dt_init
    while t < t_end - 1e-14:
        dt = min(dt, t_end - t)
        t, y, dt = st.advance(t, y, dt)
    return y, st


class TestJacobian:
    def test_linear_system_exact(self):
        A = np.array([[1.0, 2.0], [-3.0, 0.5]])
        J = finite_difference_jacobian(lambda t, y: A @ y, 0.0,
                                       np.array([1.0, -2.0]))
        assert np.allclose(J, A, rtol=1e-6)


class TestStiffStability:
    def test_fast_relaxation_lambda_1e6(self):
        # y' = -1e6 (y - cos tau), tau' = 1: explicit methods would need
        # dt ~ 1e-6 to stay stable; the L-stable scheme tracks the slow
        # manifold with far fewer steps.  The forcing rides along as a
        # state (autonomous form) so the finite-difference Jacobian sees
        # the forcing slope; with explicit time dependence the embedded
        # error estimate picks up a spurious lambda dt^2 term and the
        # controller collapses dt -- the library's coupled systems are
        # autonomous, which is the case exercised here.
        lam = 1e6

        def rhs(t, y):
            return np.array([-lam * (y[0] - np.cos(y[1])), 1.0])

        y, st = integrate(rhs, [0.0, 0.0], 2.0,
                          StepControl(abs_tol=1e-8, rel_tol=1e-7))
        assert y[0] == pytest.approx(np.cos(2.0), abs=1e-5)
        assert st.n_accepted < 20000

    def test_dt_grows_at_fixed_point(self):
        ctl = StepControl(dt_max=10.0)
        st = RosenbrockStepper(lambda t, y: -y + 1.0, ctl)
        t, y, dt = 0.0, np.array([1.0]), ctl.dt_init
        for _ in range(40):
            t, y, dt = st.advance(t, y, dt)
        assert dt == pytest.approx(10.0)
        assert y[0] == pytest.approx(1.0)


class TestAccuracyOrder:
    def test_order_two_on_smooth_problem(self):
        # fixed-step error of the underlying one-step map ~ O(dt^2)
        def rhs(t, y):
            return np.array([y[1], -y[0]])

        errs = []
        for n in [50, 100, 200, 400]:
            ctl = StepControl(abs_tol=1e308, rel_tol=1e308,
                              dt_init=np.pi / n, dt_max=np.pi / n)
            y = np.array([1.0, 0.0])
            st = RosenbrockStepper(rhs, ctl)
            t = 0.0
            for _ in range(n):
                t, y, _ = st.advance(t, y, np.pi / n)
            errs.append(abs(y[0] - np.cos(np.pi)))
        rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
        assert np.all(rates > 1.9), (errs, rates)

    def test_adaptive_meets_tolerance(self):
        def rhs(t, y):
            return np.array([-2.0 * t * y[0]])   # y = exp(-t^2)

        y, _ = integrate(rhs, [1.0], 1.5,
                         StepControl(abs_tol=1e-10, rel_tol=1e-8))
        assert y[0] == pytest.approx(np.exp(-2.25), rel=1e-6)


class TestRejectionAndErrors:
    def test_unresolvable_blowup_raises(self):
        # finite-time blow-up: step control collapses to dt_min and reports
        def rhs(t, y):
            return y * y

        with pytest.raises(SolverError):
            integrate(rhs, [1.0], 5.0,
                      StepControl(dt_min=1e-10, dt_max=1.0))

    def test_error_mask_excludes_component(self):
        # masked component may be wildly wrong without forcing rejections
        # (autonomous form; the last state carries time)
        def rhs(t, y):
            return np.array([-y[0],
                             -1e5 * (y[1] - np.sin(300.0 * y[2])),
                             1.0])

        mask = np.array([True, False, True])
        _, st_masked = integrate(rhs, [1.0, 0.0, 0.0], 0.5,
                                 StepControl(rel_tol=1e-6), error_mask=mask)
        _, st_full = integrate(rhs, [1.0, 0.0, 0.0], 0.5,
                               StepControl(rel_tol=1e-6))
        assert st_masked.n_accepted < st_full.n_accepted

    def test_oneshot_step_wrapper(self):
        # the wrapper may halve the requested dt; it reports what it took
        ctl = StepControl()
        y, dt_used, dt_next, err = step(np.array([1.0]), lambda t, y: -y,
                                        0.0, 1e-3, ctl)
        assert 0.0 < dt_used <= 1e-3
        assert y[0] == pytest.approx(np.exp(-dt_used), rel=1e-8)
        assert err <= 1.0 and dt_next > 0.0
