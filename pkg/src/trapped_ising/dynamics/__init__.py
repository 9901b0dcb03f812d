"""Closed and open-system spin dynamics under a ramped transverse field."""
from .reversal import ReversalResult, run_reversal_experiment
from .schedule import NoiseModel, RampSchedule, heating_alpha
from .spin_boson import SpinBosonTrajectory, evolve_spin_boson, spin_boson_couplings
from .tfim import (
    GroundState,
    RampOptimum,
    TfimTrajectory,
    evolve_tfim,
    final_manifold_population,
    ground_state_tfim,
    optimize_ramp_alpha,
    tfim_operators,
)

__all__ = [
    "NoiseModel", "RampSchedule", "heating_alpha", "GroundState", "RampOptimum",
    "TfimTrajectory", "evolve_tfim", "final_manifold_population", "ground_state_tfim",
    "optimize_ramp_alpha", "tfim_operators", "SpinBosonTrajectory", "evolve_spin_boson",
    "spin_boson_couplings", "ReversalResult", "run_reversal_experiment",
]
