"""Spins coupled to one motional mode, with heating, as a Lindblad master equation.

In the frame rotating with the mode and the qubits,

    H(t) = sum_i g_i sy_i (a e^{i delta t} + a^dag e^{-i delta t}) + B(t) sum_i sx_i

with g_i = eta_{i,m} Omega_i / 2 and delta = mu - omega_m. Heating enters
through sqrt(rate) a and sqrt(rate) a^dag, so that d<n>/dt = rate.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp

from ..analysis import GroundManifold, manifold_population
from ..coupling import RamanConfig, lamb_dicke
from ..crystal import YB171_MASS
from ..errors import CutoffError, IntegrationError, StepSizeError
from ..modes import ModeSpectrum
from ..states import QuantumState, sparse_spin_op
from .schedule import NoiseModel, RampSchedule

MAX_SPINS = 6
TRACE_TOL = 1e-7
POSITIVITY_TOL = 1e-8


def spin_boson_couplings(raman: RamanConfig, spectrum: ModeSpectrum, mode_index=0,
                         mass=YB171_MASS):
    """Per-ion coupling g_i = eta_{i,m} Omega_i / 2 (rad/s) and detuning mu - omega_m."""
    eta = lamb_dicke(spectrum, raman, mass)[:, mode_index]
    return eta * raman.rabi / 2, raman.detuning_mu - spectrum.frequencies[mode_index]


def thermal_populations(nbar, n_cut):
    n = np.arange(n_cut + 1)
    if nbar == 0:
        p = (n == 0).astype(float)
    else:
        p = (nbar / (1 + nbar)) ** n / (1 + nbar)
    return p / p.sum()


def _rmul(x, s):
    """Dense x times sparse s."""
    return (s.T @ x.T).T


@dataclass
class SpinBosonTrajectory:
    times: np.ndarray
    fields: np.ndarray
    spin_density: np.ndarray
    nbar: np.ndarray
    top_population: np.ndarray
    trace: np.ndarray
    min_eigenvalue: np.ndarray
    phonon_cutoff: int
    manifold_population: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def state(self, k=-1) -> QuantumState:
        rho = self.spin_density[k]
        rho = 0.5 * (rho + rho.conj().T)
        return QuantumState(rho / np.trace(rho).real, kind="density")

    @property
    def final_state(self):
        return self.state(-1)


def _run(g, delta, noise, schedule, initial, integrator_tol, sign, manifold):
    n = len(g)
    n_cut = int(noise.phonon_cutoff)
    d_ph = n_cut + 1
    d_s = 2**n
    dim = d_s * d_ph
    eye_s = sp.identity(d_s, format="csr", dtype=complex)
    eye_p = sp.identity(d_ph, format="csr", dtype=complex)
    a_ph = sp.diags(np.sqrt(np.arange(1, d_ph)), 1, format="csr", dtype=complex)
    force = sum((g[k] * sparse_spin_op("y", k, n) for k in range(n)),
                sp.csr_matrix((d_s, d_s), dtype=complex))
    field_op = sum((sparse_spin_op("x", k, n) for k in range(n)),
                   sp.csr_matrix((d_s, d_s), dtype=complex))
    a = sp.kron(eye_s, a_ph, format="csr")
    ad = a.conj().T.tocsr()
    f_a = sign * sp.kron(force, a_ph, format="csr")
    f_ad = f_a.conj().T.tocsr()
    h_b = sign * sp.kron(field_op, eye_p, format="csr")
    number = (ad @ a).tocsr()
    anti = 0.5 * (number + (a @ ad)).tocsr()
    rate = noise.heating_rate

    def rhs(t, y):
        r = y.reshape(dim, dim)
        phase = np.exp(1j * delta * t)
        hr = phase * (f_a @ r) + np.conj(phase) * (f_ad @ r) + schedule.field(t) * (h_b @ r)
        # H is Hermitian and rho stays Hermitian, so rho H = (H rho)^dag
        out = -1j * (hr - hr.conj().T)
        if rate > 0:
            ar = a @ r
            kr = anti @ r
            out += rate * (_rmul(ar, ad) + _rmul(ad @ r, a) - kr - kr.conj().T)
        return out.ravel()

    rho_s = initial.density_matrix()
    rho0 = np.kron(rho_s, np.diag(thermal_populations(noise.initial_nbar, n_cut)))
    sol = solve_ivp(rhs, (0.0, schedule.total_duration), rho0.ravel(), method="DOP853",
                    t_eval=schedule.sample_times, rtol=integrator_tol,
                    atol=integrator_tol * 1e-4)
    if not sol.success:
        raise StepSizeError(f"integrator failed: {sol.message}")

    rhos = sol.y.T.reshape(-1, d_s, d_ph, d_s, d_ph)
    spin = np.einsum("tikjk->tij", rhos)
    ph_diag = np.real(np.einsum("tipip->tp", rhos))
    nbar = ph_diag @ np.arange(d_ph)
    top = ph_diag[:, -1]
    trace = ph_diag.sum(axis=1)
    min_eig = np.array([np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0]
                        for m in sol.y.T.reshape(-1, dim, dim)])
    traj = SpinBosonTrajectory(sol.t, schedule.field(sol.t), spin, nbar, top, trace,
                               min_eig, n_cut)
    if manifold is not None:
        traj.manifold_population = np.array(
            [manifold_population(traj.state(k).probabilities("y"), manifold)
             for k in range(len(sol.t))])
    return traj


def evolve_spin_boson(raman: RamanConfig, spectrum: ModeSpectrum, noise: NoiseModel,
                      schedule: RampSchedule, initial: QuantumState, mode_index=0,
                      mass=YB171_MASS, integrator_tol=1e-8, sign=1,
                      manifold: GroundManifold | None = None,
                      auto_retry=True) -> SpinBosonTrajectory:
    """Master-equation evolution of N spins and one mode (default: COM).

    The phonon space is truncated at ``noise.phonon_cutoff``. If the top Fock
    level collects more than ``noise.leakage_tol`` population the run is
    repeated once with a doubled cutoff; a second overflow raises CutoffError.
    """
    n = raman.n_ions
    if n > MAX_SPINS:
        raise ValueError(f"spin-boson engine limited to {MAX_SPINS} spins")
    if initial.n_ions != n:
        raise ValueError("initial state and Rabi vector disagree on the number of ions")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    g, delta = spin_boson_couplings(raman, spectrum, mode_index, mass)
    attempts = [noise, noise.with_cutoff(2 * noise.phonon_cutoff)] if auto_retry else [noise]
    for k, model in enumerate(attempts):
        traj = _run(g, delta, model, schedule, initial, integrator_tol, sign, manifold)
        leak = float(traj.top_population.max())
        if leak < model.leakage_tol:
            break
    else:
        raise CutoffError(
            f"Fock level {model.phonon_cutoff} reached population {leak:.2e} "
            f"(> {model.leakage_tol:.0e}); increase phonon_cutoff")
    drift = float(np.max(np.abs(traj.trace - 1)))
    if drift > TRACE_TOL:
        raise IntegrationError(f"trace drift {drift:.2e} exceeds {TRACE_TOL:.0e}; "
                               "tighten integrator_tol")
    traj.metadata.update({
        "retried": k > 0,
        "mode_index": mode_index,
        "detuning_from_mode_rad_s": float(delta),
        "couplings_rad_s": g.tolist(),
        "heating_rate": noise.heating_rate,
        "positivity_ok": bool(traj.min_eigenvalue.min() >= -POSITIVITY_TOL),
        "trace_drift": drift,
    })
    return traj
