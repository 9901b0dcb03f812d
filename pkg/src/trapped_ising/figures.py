"""Pre-filled configurations for the published figure scenarios.

Each preset is the raw configuration document (as it would be read from
TOML) plus the command that produces the figure data.
"""
from __future__ import annotations

import copy

TRAP_4 = {"n_ions": 4, "omega_x_mhz": 0.626, "omega_y_mhz": 0.404, "omega_z_mhz": 1.503}
TRAP_7 = {"n_ions": 7, "omega_x_mhz": 0.486, "omega_y_mhz": 0.407, "omega_z_mhz": 1.482}
TRAP_10 = dict(TRAP_4, n_ions=10)

_RAMP_400 = {"b0_mhz": 0.029, "duration_us": 400.0, "final_ratio": "optimize"}
_RAMP_300 = {"b0_mhz": 0.029, "duration_us": 300.0, "final_ratio": "optimize"}
_DETECT = {"fidelity": 0.982}


def _seven(detuning):
    return {
        "trap": TRAP_7,
        "raman": {"rabi_mhz": 0.05, "detuning_mhz": detuning, "max_j_mhz": 0.001},
        "schedule": _RAMP_300,
        "evolution": {"sign": 1, "initial": "-x"},
        "analysis": {"manifold": "classical",
                     "mu_range_mhz": [detuning - 0.03, detuning + 0.03, 0.001]},
        "detection": _DETECT,
    }


PRESETS = {
    # all-to-all FM order, reached as the top state of the AFM Hamiltonian
    "fig2b": ("evolve", {
        "trap": TRAP_4,
        "raman": {"rabi_mhz": 0.05, "detuning_offset_mhz": 0.010, "reference_mode": 0},
        "schedule": _RAMP_400,
        "evolution": {"sign": -1, "initial": "+x"},
        "detection": _DETECT,
    }),
    # nearest-neighbour AFM / diagonal FM from the red side of mode index 2
    "fig2d": ("evolve", {
        "trap": TRAP_4,
        "raman": {"rabi_mhz": 0.05, "detuning_offset_mhz": -0.010, "reference_mode": 2},
        "schedule": _RAMP_400,
        "evolution": {"sign": 1, "initial": "-x"},
        "detection": _DETECT,
    }),
    "fig3b": ("evolve", _seven(1.328)),
    "fig3d": ("evolve", _seven(1.231)),
    "fig3f": ("evolve", _seven(1.416)),
    "fig4": ("reverse", dict(_seven(1.328),
                             schedule=dict(_RAMP_300, direction="round_trip"))),
    "fig5": ("evolve", {
        "trap": TRAP_10,
        "raman": {"rabi_mhz": 0.05, "detuning_mhz": 1.296, "max_j_mhz": 0.001},
        "schedule": _RAMP_300,
        "evolution": {"sign": 1, "initial": "-x", "track_ground": False},
        "analysis": {"manifold": "quasi"},
        "detection": _DETECT,
    }),
    "figS4": ("evolve", {
        "trap": TRAP_4,
        "raman": {"rabi_mhz": 0.05, "detuning_offset_mhz": 0.010, "reference_mode": 0},
        "schedule": _RAMP_400,
        "evolution": {"sign": 1, "initial": "+x", "target": "top",
                      "engine": "spin_boson", "integrator_tol": 1e-8},
        "noise": {"heating_rate": 3200.0, "phonon_cutoff": 15},
        "analysis": {"manifold": "classical"},
    }),
}


def preset(figure_id):
    """(command, raw config) for a figure id; the dict is a fresh copy."""
    if figure_id not in PRESETS:
        raise KeyError(f"unknown figure {figure_id!r}; choose from {sorted(PRESETS)}")
    command, raw = PRESETS[figure_id]
    raw = copy.deepcopy(raw)
    raw["figure"] = figure_id
    return command, raw
