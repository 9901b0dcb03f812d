"""Trapped-ion 2D crystals: equilibrium, phonon modes, Ising couplings and spin dynamics."""
from .analysis import (
    DetectionModel,
    GroundManifold,
    apply_detection_and_sample,
    bhattacharyya,
    classical_ground_manifold,
    manifold_population,
    population_histogram,
    preparation_fidelity,
    quasi_degenerate_manifold,
    sx_distribution,
)
from .coupling import (
    CouplingMatrix,
    RamanConfig,
    compute_couplings,
    interaction_graph,
    scan_detuning,
)
from .crystal import CrystalGeometry, TrapConfig, solve_equilibrium
from .dynamics import (
    NoiseModel,
    RampSchedule,
    evolve_spin_boson,
    evolve_tfim,
    ground_state_tfim,
    optimize_ramp_alpha,
    run_reversal_experiment,
)
from .modes import ModeSpectrum, full_modes, transverse_modes
from .states import QuantumState, polarized_state

__version__ = "0.1.0"

__all__ = [
    "TrapConfig", "CrystalGeometry", "solve_equilibrium", "ModeSpectrum", "transverse_modes",
    "full_modes", "RamanConfig", "CouplingMatrix", "compute_couplings", "interaction_graph",
    "scan_detuning", "QuantumState", "polarized_state", "RampSchedule", "NoiseModel",
    "evolve_tfim", "evolve_spin_boson", "ground_state_tfim", "optimize_ramp_alpha",
    "run_reversal_experiment", "GroundManifold", "DetectionModel",
    "classical_ground_manifold", "quasi_degenerate_manifold", "population_histogram",
    "manifold_population", "sx_distribution", "bhattacharyya", "preparation_fidelity",
    "apply_detection_and_sample",
]
