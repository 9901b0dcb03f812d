"""Ramp the field down and back up, then compare with the starting state."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..analysis import sx_distribution, sx_values
from ..coupling import CouplingMatrix, RamanConfig
from ..modes import ModeSpectrum
from ..states import QuantumState
from .schedule import NoiseModel, RampSchedule
from .spin_boson import evolve_spin_boson
from .tfim import evolve_tfim


@dataclass
class ReversalResult:
    """S_x distributions (index k is S_x = k - N/2) at t = 0, duration, 2 duration."""

    initial: np.ndarray
    mid: np.ndarray
    final: np.ndarray
    final_state: QuantumState
    initial_state: QuantumState

    @property
    def n_ions(self):
        return len(self.initial) - 1

    @property
    def return_population(self):
        """Final weight in the S_x sector that held most of the initial weight."""
        return float(self.final[int(np.argmax(self.initial))])

    def mean_sx(self, which="mid"):
        return float(getattr(self, which) @ sx_values(self.n_ions))

    def state_fidelity(self):
        """Overlap of final and initial spin states (density matrices allowed)."""
        a = self.initial_state.density_matrix()
        b = self.final_state.density_matrix()
        if self.initial_state.kind == "pure" and self.final_state.kind == "pure":
            return self.initial_state.overlap(self.final_state)
        return float(np.real(np.trace(a @ b)))


def run_reversal_experiment(jm: CouplingMatrix, schedule: RampSchedule, initial: QuantumState,
                            sign=1, noise: NoiseModel | None = None,
                            raman: RamanConfig | None = None,
                            spectrum: ModeSpectrum | None = None, mode_index=0,
                            integrator_tol=1e-9) -> ReversalResult:
    """Round trip with the closed TFIM engine, or with the spin-boson engine if ``noise`` is given.

    The open-system path needs ``raman`` and ``spectrum``; ``jm`` is then used
    only for its size.
    """
    if schedule.direction != "round_trip":
        raise ValueError("reversal needs a round_trip schedule")
    t = schedule.duration
    probe = schedule.with_samples([0.0, t, 2 * t])
    if noise is None:
        traj = evolve_tfim(jm, probe, initial, integrator_tol, sign)
    else:
        if raman is None or spectrum is None:
            raise ValueError("noisy reversal needs raman and spectrum")
        if raman.n_ions != jm.n_ions:
            raise ValueError("raman and J disagree on the number of ions")
        traj = evolve_spin_boson(raman, spectrum, noise, probe, initial, mode_index,
                                 integrator_tol=integrator_tol, sign=sign)
    dists = [sx_distribution(traj.state(k)) for k in range(3)]
    return ReversalResult(*dists, traj.state(-1), initial)
