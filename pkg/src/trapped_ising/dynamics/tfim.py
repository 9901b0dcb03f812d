"""Closed-system transverse-field Ising dynamics.

H(t) = sign * (sum_{i<j} J_ij sy_i sy_j + B(t) sum_i sx_i), evolved as a state
vector. ``sign=-1`` turns the highest-energy state of the physical Hamiltonian
into the ground state, which is how ferromagnetic ordering of an
anti-ferromagnetic J is followed adiabatically.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp
from scipy.optimize import minimize_scalar

from ..analysis import GroundManifold, manifold_population
from ..coupling import CouplingMatrix
from ..errors import IntegrationError, StepSizeError
from ..states import QuantumState, sparse_spin_op
from .schedule import RampSchedule

MAX_SPINS = 14
NORM_DRIFT_TOL = 1e-7
DENSE_LIMIT = 10


def tfim_operators(jm: CouplingMatrix):
    """Real sparse (H_J, H_B) with H = H_J + B H_B."""
    n = jm.n_ions
    if n > MAX_SPINS:
        raise ValueError(f"state-vector engine limited to {MAX_SPINS} spins")
    sy = [sparse_spin_op("y", k, n) for k in range(n)]
    dim = 2**n
    h_j = sp.csr_matrix((dim, dim), dtype=complex)
    (rows, cols), values = jm.pairs()
    for i, j, v in zip(rows, cols, values):
        if v != 0:
            h_j = h_j + v * (sy[i] @ sy[j])
    h_b = sum((sparse_spin_op("x", k, n) for k in range(n)),
              sp.csr_matrix((dim, dim), dtype=complex))
    # both pieces are real in the z basis
    return sp.csr_matrix(h_j.real), sp.csr_matrix(h_b.real)


@dataclass
class GroundState:
    energy: float
    state: np.ndarray
    subspace: np.ndarray
    degenerate: bool
    gap: float


def _lowest(h, k=6):
    dim = h.shape[0]
    if dim <= 2**DENSE_LIMIT:
        return np.linalg.eigh(h.toarray())
    vals, vecs = spla.eigsh(h, k=min(k, dim - 2), which="SA", tol=1e-12)
    order = np.argsort(vals)
    return vals[order], vecs[:, order]


def ground_state_tfim(jm: CouplingMatrix, b, sign=1, degeneracy_tol=None) -> GroundState:
    """Lowest eigenpair of sign * (H_J + b H_B).

    Eigenvalues within ``degeneracy_tol`` (default 1e-9 times the energy
    scale) of the minimum form the returned ground subspace.
    """
    h_j, h_b = tfim_operators(jm)
    h = sign * (h_j + b * h_b)
    vals, vecs = _lowest(h)
    scale = max(jm.max_abs, abs(b), 1.0)
    tol = 1e-9 * scale if degeneracy_tol is None else degeneracy_tol
    inside = vals <= vals[0] + tol
    k = int(inside.sum())
    gap = float(vals[k] - vals[0]) if k < len(vals) else np.inf
    return GroundState(float(vals[0]), vecs[:, 0].astype(complex),
                       vecs[:, :k].astype(complex), k > 1, gap)


@dataclass
class TfimTrajectory:
    times: np.ndarray
    fields: np.ndarray
    states: np.ndarray
    sign: int
    norm_drift: float
    manifold_population: np.ndarray | None = None
    ground_manifold_population: np.ndarray | None = None
    ground_overlap: np.ndarray | None = None
    energies: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def state(self, k=-1) -> QuantumState:
        psi = self.states[k]
        return QuantumState(psi / np.linalg.norm(psi))

    @property
    def final_state(self):
        return self.state(-1)


def _y_manifold_population(psi, manifold):
    return manifold_population(QuantumState(psi / np.linalg.norm(psi)).probabilities("y"),
                               manifold)


def evolve_tfim(jm: CouplingMatrix, schedule: RampSchedule, initial: QuantumState,
                integrator_tol=1e-9, sign=1, manifold: GroundManifold | None = None,
                track_ground=False) -> TfimTrajectory:
    """Integrate the Schrodinger equation for a ramped transverse-field Ising model.

    ``manifold`` adds the y-basis population of those configurations at each
    sample time. ``track_ground`` also diagonalizes H at every sample to give
    the overlap with the instantaneous ground subspace and, with a manifold,
    the manifold population of that exact ground state.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if not isinstance(initial, QuantumState) or initial.kind != "pure":
        raise TypeError("initial must be a pure QuantumState")
    if initial.n_ions != jm.n_ions:
        raise ValueError("initial state and J disagree on the number of ions")
    h_j, h_b = tfim_operators(jm)
    h_j = sign * h_j
    h_b = sign * h_b

    def rhs(t, y):
        return -1j * (h_j @ y + schedule.field(t) * (h_b @ y))

    t_eval = schedule.sample_times
    sol = solve_ivp(rhs, (0.0, schedule.total_duration), initial.data.astype(complex),
                    method="DOP853", t_eval=t_eval, rtol=integrator_tol,
                    atol=integrator_tol * 1e-3)
    if not sol.success:
        raise StepSizeError(f"integrator failed: {sol.message}")
    states = sol.y.T
    norms = np.linalg.norm(states, axis=1)
    drift = float(np.max(np.abs(norms - 1)))
    if drift > NORM_DRIFT_TOL:
        raise IntegrationError(f"norm drift {drift:.2e} exceeds {NORM_DRIFT_TOL:.0e}; "
                               "tighten integrator_tol")
    fields = schedule.field(t_eval)
    traj = TfimTrajectory(t_eval, fields, states, sign, drift)
    traj.energies = np.array([np.vdot(psi, h_j @ psi + b * (h_b @ psi)).real
                              for psi, b in zip(states, fields)])
    if manifold is not None:
        traj.manifold_population = np.array(
            [_y_manifold_population(psi, manifold) for psi in states])
    if track_ground:
        overlaps, ground_pop = [], []
        for psi, b in zip(states, fields):
            gs = ground_state_tfim(jm, b, sign)
            proj = gs.subspace.conj().T @ psi
            overlaps.append(float(np.vdot(proj, proj).real / np.vdot(psi, psi).real))
            if manifold is not None:
                # average over a degenerate ground subspace
                pops = [_y_manifold_population(v, manifold) for v in gs.subspace.T]
                ground_pop.append(float(np.mean(pops)))
        traj.ground_overlap = np.array(overlaps)
        if manifold is not None:
            traj.ground_manifold_population = np.array(ground_pop)
    return traj


def final_manifold_population(jm, schedule, initial, manifold, sign=1, integrator_tol=1e-8):
    end = schedule.with_samples([schedule.total_duration])
    traj = evolve_tfim(jm, end, initial, integrator_tol, sign, manifold)
    return float(traj.manifold_population[-1])


@dataclass
class RampOptimum:
    ramp_alpha: float
    final_ratio: float
    population: float
    ratios: np.ndarray
    populations: np.ndarray


def optimize_ramp_alpha(jm, b0, duration, initial, manifold, sign=1,
                        ratio_bounds=(2.0, 2000.0), n_grid=16, integrator_tol=1e-8):
    """Ramp steepness maximizing the final manifold population at fixed duration.

    A log-spaced grid of endpoint ratios b0 / B(duration) is scanned, then the
    best bracket is refined by bounded scalar minimization.
    """
    def population(log_ratio):
        sched = RampSchedule.from_final_ratio(b0, duration, float(np.exp(log_ratio)))
        return final_manifold_population(jm, sched, initial, manifold, sign, integrator_tol)

    grid = np.linspace(np.log(ratio_bounds[0]), np.log(ratio_bounds[1]), n_grid)
    pops = np.array([population(x) for x in grid])
    k = int(np.argmax(pops))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, n_grid - 1)]
    res = minimize_scalar(lambda x: -population(x), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-3})
    best_x, best_p = (res.x, -res.fun) if -res.fun >= pops[k] else (grid[k], pops[k])
    ratio = float(np.exp(best_x))
    return RampOptimum((ratio - 1) / duration, ratio, float(best_p), np.exp(grid), pops)
