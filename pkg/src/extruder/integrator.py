"""Adaptive linearly-implicit (Rosenbrock-W) time stepping.

The scheme is the two-stage, second-order, L-stable method with
gamma = 1 + 1/sqrt(2):

    (I - gamma dt J) k1 = f(t, y)
    (I - gamma dt J) k2 = f(t + dt, y + dt k1) - 2 k1
    y1 = y + dt (3 k1 + k2) / 2          (order 2 for any J)
    error estimate = dt (k1 + k2) / 2    (vs the order-1 solution y + dt k1)

Because the order holds for an approximate Jacobian (W-method), J is
evaluated by finite differences and reused across accepted steps; it is
refreshed on rejection and every few steps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .errors import SolverError

_GAMMA = 1.0 + 1.0 / math.sqrt(2.0)
_JAC_REFRESH = 10    # accepted steps between Jacobian refreshes
_SAFETY = 0.9
_GROW_MAX = 2.5
_SHRINK_MIN = 0.2


@dataclass(frozen=True)
class StepControl:
    abs_tol: float = 1e-8
    rel_tol: float = 1e-6
    dt_init: float = 1e-3
    dt_min: float = 1e-12
    dt_max: float = 5.0

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if not (0 < self.dt_min <= self.dt_init <= self.dt_max):
            raise ValueError("need 0 < dt_min <= dt_init <= dt_max")


def finite_difference_jacobian(rhs, t: float, y: np.ndarray,
                               f0: np.ndarray | None = None) -> np.ndarray:
    """Dense forward-difference Jacobian of rhs(t, y)."""
    if f0 is None:
        f0 = rhs(t, y)
    n = y.shape[0]
    J = np.empty((n, n))
    eps = np.sqrt(np.finfo(float).eps)
    for j in range(n):
        dy = eps * max(abs(y[j]), 1.0)
        yp = y.copy()
        yp[j] += dy
        J[:, j] = (rhs(t, yp) - f0) / dy
    return J


def colored_jacobian(rhs, t: float, y: np.ndarray, groups: list,
                     rows_for_col: list,
                     f0: np.ndarray | None = None) -> np.ndarray:
    """Forward-difference Jacobian using simultaneous column perturbations.

    groups is a partition of column indices such that no two columns in a
    group affect a common row; rows_for_col[j] lists the rows structurally
    reachable from column j.  One rhs call per group instead of one per
    column.
    """
    if f0 is None:
        f0 = rhs(t, y)
    n = y.shape[0]
    J = np.zeros((n, n))
    eps = np.sqrt(np.finfo(float).eps)
    for cols in groups:
        yp = y.copy()
        steps = np.empty(len(cols))
        for i, j in enumerate(cols):
            steps[i] = eps * max(abs(y[j]), 1.0)
            yp[j] += steps[i]
        diff = rhs(t, yp) - f0
        for i, j in enumerate(cols):
            rows = rows_for_col[j]
            J[rows, j] = diff[rows] / steps[i]
    return J


class RosenbrockStepper:
    """Stateful adaptive stepper over rhs(t, y).

    error_mask selects the components included in the local error norm
    (Dirichlet-pinned nodes are excluded by the callers).
    """

    def __init__(self, rhs, ctl: StepControl,
                 error_mask: np.ndarray | None = None,
                 jacobian=None):
        self.rhs = rhs
        self.ctl = ctl
        self.error_mask = error_mask
        self.jacobian = jacobian   # optional (t, y, f0) -> J
        self._jac_lu = None
        self._jac_dt = None
        self._steps_since_jac = 0
        self.n_rejected = 0
        self.n_accepted = 0

    def _error_norm(self, err: np.ndarray, y: np.ndarray) -> float:
        scale = self.ctl.abs_tol + self.ctl.rel_tol * np.abs(y)
        r = err / scale
        if self.error_mask is not None:
            r = r[self.error_mask]
        return float(np.sqrt(np.mean(r * r)))

    def _factor(self, t, y, f0, dt):
        if self.jacobian is not None:
            J = self.jacobian(t, y, f0)
        else:
            J = finite_difference_jacobian(self.rhs, t, y, f0)
        self._jac = J
        self._refactor(dt)
        self._steps_since_jac = 0

    def _refactor(self, dt):
        n = self._jac.shape[0]
        W = np.eye(n) - _GAMMA * dt * self._jac
        self._jac_lu = lu_factor(W)
        self._jac_dt = dt

    def attempt(self, t: float, y: np.ndarray, dt: float):
        """One trial step; returns (y_new, scaled_error_norm)."""
        f0 = self.rhs(t, y)
        if self._jac_lu is None or self._steps_since_jac >= _JAC_REFRESH:
            self._factor(t, y, f0, dt)
        elif self._jac_dt != dt:
            self._refactor(dt)
        k1 = lu_solve(self._jac_lu, f0)
        f1 = self.rhs(t + dt, y + dt * k1)
        k2 = lu_solve(self._jac_lu, f1 - 2.0 * k1)
        y_new = y + dt * (1.5 * k1 + 0.5 * k2)
        err = dt * 0.5 * (k1 + k2)
        return y_new, self._error_norm(err, y)

    def advance(self, t: float, y: np.ndarray, dt: float):
        """Advance one accepted step; returns (t_new, y_new, dt_next)."""
        ctl = self.ctl
        dt = min(max(dt, ctl.dt_min), ctl.dt_max)
        while True:
            y_new, err = self.attempt(t, y, dt)
            if err <= 1.0 and np.all(np.isfinite(y_new)):
                self.n_accepted += 1
                self._steps_since_jac += 1
                if err == 0.0:
                    fac = _GROW_MAX
                else:
                    fac = min(_GROW_MAX, max(_SHRINK_MIN,
                                             _SAFETY * err ** -0.5))
                dt_next = min(ctl.dt_max, dt * fac)
                # snap to the already-factored step size when close: an LU
                # refactor costs far more than a slightly suboptimal dt.
                # The window stays below the growth cap so dt can escape,
                # and a proposal at dt_max is never snapped down.
                if (self._jac_dt is not None
                        and dt_next < ctl.dt_max
                        and 0.85 * self._jac_dt <= dt_next
                        <= 1.4 * self._jac_dt):
                    dt_next = self._jac_dt
                return t + dt, y_new, dt_next
            self.n_rejected += 1
            # refresh the Jacobian only if it is stale; otherwise just
            # refactor at the reduced step size
            if self._steps_since_jac > 0:
                self._factor(t, y, self.rhs(t, y), dt)
            if dt <= ctl.dt_min * (1.0 + 1e-12):
                raise SolverError(
                    f"persistent step rejection at dt_min={ctl.dt_min:.3e} "
                    f"(t={t:.6e}, error norm {err:.3e}); the problem appears "
                    "stiffer than the tolerances allow")
            dt = max(ctl.dt_min, 0.5 * dt)


def step(y: np.ndarray, rhs, t: float, dt: float, ctl: StepControl,
         error_mask: np.ndarray | None = None):
    """Single accepted adaptive step: (y_new, dt_used, dt_next, err_est).

    Convenience wrapper over RosenbrockStepper for one-shot use; retries
    with halved dt on rejection like the stateful stepper, so dt_used
    (the step actually taken) may be smaller than requested.
    """
    stepper = RosenbrockStepper(rhs, ctl, error_mask)
    dt = min(max(dt, ctl.dt_min), ctl.dt_max)
    while True:
        y_new, err = stepper.attempt(t, y, dt)
        if err <= 1.0 and np.all(np.isfinite(y_new)):
            fac = _GROW_MAX if err == 0.0 else min(
                _GROW_MAX, max(_SHRINK_MIN, _SAFETY * err ** -0.5))
            return y_new, dt, min(ctl.dt_max, dt * fac), err
        if dt <= ctl.dt_min * (1.0 + 1e-12):
            raise SolverError(
                f"persistent step rejection at dt_min={ctl.dt_min:.3e}")
        dt = max(ctl.dt_min, 0.5 * dt)
        stepper._jac_lu = None
