"""Monolithic state vector for co-integrating plant and observer.

Layout (n nodes per field, pinned Dirichlet nodes kept out of the vector):

    [ Ts[0 .. n-2] | Tl[1 .. n-1] | s | That[0 .. n-2] ]

The solid and observer fields are pinned at the interface end, the liquid
field at its interface end (index 0).  Everything advances through one
right-hand side, so interface and fields share the same scheme.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import LiquidProfile, SolidProfile
from .observer import ObserverState, observer_rhs
from .params import MaterialParams, ProcessParams
from .plant import Measurements, PlantState, plant_rhs


@dataclass
class CoupledSystem:
    m: MaterialParams
    p: ProcessParams
    n: int
    with_observer: bool = True
    s_min: float | None = None
    sdot_source: str = "plant"  # 'plant' | 'finite_difference'

    def __post_init__(self):
        nn = self.n - 1
        self.size = 2 * nn + 1 + (nn if self.with_observer else 0)
        self._i_s = 2 * nn
        # pinned nodes never enter the vector, so every component counts
        # toward the local error norm
        self.error_mask = None

    # -- packing ------------------------------------------------------------

    def pack(self, plant: PlantState,
             obs: ObserverState | None = None) -> np.ndarray:
        parts = [plant.Ts.values[:-1], plant.Tl.values[1:],
                 np.array([plant.s])]
        if self.with_observer:
            parts.append(obs.That.values[:-1])
        return np.concatenate(parts)

    def unpack(self, y: np.ndarray,
               t: float = 0.0) -> tuple[PlantState, ObserverState | None]:
        nn = self.n - 1
        T_m = self.m.T_m
        s = float(y[self._i_s])
        Ts = np.append(y[:nn], T_m)
        Tl = np.concatenate(([T_m], y[nn:2 * nn]))
        plant = PlantState(Ts=SolidProfile(Ts, s),
                           Tl=LiquidProfile(Tl, s), t=t)
        obs = None
        if self.with_observer:
            That = np.append(y[2 * nn + 1:], T_m)
            obs = ObserverState(That=SolidProfile(That, s), t=t)
        return plant, obs

    # -- Jacobian sparsity --------------------------------------------------

    def jacobian_structure(self) -> tuple[list, list]:
        """(groups, rows_for_col) for colored finite-difference Jacobians.

        Field nodes couple only to their stencil neighbours within a
        block; the interface-gradient nodes (last two solid, first two
        liquid unknowns) and s itself feed sdot and hence every equation,
        so they get dense columns of their own.  The inlet node also
        drives the observer's measurement injection.

        When the flux is evaluated continuously inside the rhs, the inlet
        rows additionally depend on every estimated-state column through
        the feedback integral.  Those entries (small quadrature weights)
        are deliberately left out: including them would force one colour
        per column, and the Rosenbrock-W stepper only requires an
        approximate Jacobian for its order and, in practice here, its
        step-size behaviour.
        """
        nn = self.n - 1
        N = self.size
        all_rows = np.arange(N)
        i_s = self._i_s
        dense = [nn - 2, nn - 1, nn, nn + 1, i_s]
        rows_for_col: list = [None] * N
        for j in dense:
            rows_for_col[j] = all_rows
        for j in range(0, nn):                      # solid block
            if rows_for_col[j] is not None:
                continue
            rows = [r for r in (j - 1, j, j + 1) if 0 <= r < nn]
            if j == 0 and self.with_observer:
                rows.append(i_s + 1)                # Y2 injection
            rows_for_col[j] = np.asarray(rows)
        for j in range(nn, 2 * nn):                 # liquid block
            if rows_for_col[j] is not None:
                continue
            rows_for_col[j] = np.asarray(
                [r for r in (j - 1, j, j + 1) if nn <= r < 2 * nn])
        if self.with_observer:                      # observer block
            for j in range(i_s + 1, N):
                rows_for_col[j] = np.asarray(
                    [r for r in (j - 1, j, j + 1) if i_s + 1 <= r < N])
        groups = [[0]] + [[j] for j in dense]
        colors: dict[int, list] = {0: [], 1: [], 2: []}
        for j in range(N):
            if j in dense or j == 0:
                continue
            if j < nn:
                local = j
            elif j < 2 * nn:
                local = j - nn
            else:
                local = j - (i_s + 1)
            colors[local % 3].append(j)
        groups.extend(c for c in colors.values() if c)
        return groups, rows_for_col

    # -- dynamics -----------------------------------------------------------

    def rhs(self, t: float, y: np.ndarray, q_f: float,
            sdot_fd: float | None = None) -> np.ndarray:
        """Coupled time derivative under a held inlet flux q_f.

        sdot_fd supplies the observer's advection speed when
        sdot_source='finite_difference'.
        """
        plant, obs = self.unpack(y, t)
        dTs, dTl, s_dot = plant_rhs(plant, q_f, self.m, self.p, self.s_min)
        parts = [dTs[:-1], dTl[1:], np.array([s_dot])]
        if self.with_observer:
            meas = Measurements(Y1=plant.s, Y2=float(plant.Ts.values[0]))
            s_dot_obs = s_dot if self.sdot_source == "plant" else \
                (sdot_fd if sdot_fd is not None else s_dot)
            dThat = observer_rhs(obs, meas, q_f, s_dot_obs, self.m, self.p,
                                 self.s_min)
            parts.append(dThat[:-1])
        return np.concatenate(parts)
