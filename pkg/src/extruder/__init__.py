"""Two-phase moving-boundary model of a screw extruder.

Simulation and boundary control of the melting zone: closed-form steady
states, a front-fixing finite-difference plant, a boundary temperature
observer, and a backstepping output-feedback law for the inlet heat flux.
"""
from .config import load_config, make_config
from .control import (KernelFunctions, full_state_qf, output_feedback_qf,
                      pi_control, synthesize_kernel)
from .observer import ObserverState, initial_estimate, observer_gain
from .params import HDPE, MaterialParams, ProcessParams
from .plant import PlantState, default_initial_condition
from .run import RunRecord, run_closed_loop, sweep
from .steady import SteadyState, barrel_temperature_bounds, solve_steady_state

__version__ = "0.1.0"

__all__ = [
    "HDPE", "KernelFunctions", "MaterialParams", "ObserverState",
    "PlantState", "ProcessParams", "RunRecord", "SteadyState",
    "barrel_temperature_bounds", "default_initial_condition",
    "full_state_qf", "initial_estimate", "load_config", "make_config",
    "observer_gain", "output_feedback_qf", "pi_control", "run_closed_loop",
    "solve_steady_state", "sweep", "synthesize_kernel",
]
