"""Normal modes of a crystal about its equilibrium."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .crystal import CrystalGeometry, TrapConfig, check_planarity, hessian, max_force
from .errors import InstabilityError, NotAtEquilibriumError

# eigenvalue gaps below this (rad/s) are reported as degenerate
DEGENERACY_GAP = 2 * np.pi * 1.0
PLANARITY_TOL = 1e-9


@dataclass
class ModeSpectrum:
    """Mode frequencies (rad/s, descending) and mode vectors as columns."""

    frequencies: np.ndarray
    mode_matrix: np.ndarray
    axis: str
    geometry_ref: str
    labels: list = field(default_factory=list)
    degenerate: bool = False

    @property
    def n_modes(self):
        return len(self.frequencies)

    def frequencies_hz(self):
        return self.frequencies / (2 * np.pi)


def _fix_signs(vectors):
    """Flip columns so each one's largest-magnitude entry is positive."""
    v = np.array(vectors, copy=True)
    # round before argmax so equal-magnitude entries break ties by index
    pivot = np.argmax(np.round(np.abs(v), 12), axis=0)
    signs = np.sign(v[pivot, np.arange(v.shape[1])])
    signs[signs == 0] = 1
    return v * signs


def _require_equilibrium(cfg, geom):
    residual = max_force(cfg, geom.positions)
    if residual > cfg.force_threshold:
        raise NotAtEquilibriumError(
            f"residual force {residual:.3e} N exceeds {cfg.force_threshold:.3e} N"
        )


def _spectrum(stiffness, mass):
    evals, evecs = np.linalg.eigh(stiffness)
    if evals[0] < 0:
        raise InstabilityError(
            f"negative stiffness eigenvalue {evals[0]:.3e}: crystal is not a minimum"
        )
    order = np.argsort(-evals, kind="stable")
    freqs = np.sqrt(evals[order] / mass)
    degenerate = bool(np.any(np.abs(np.diff(freqs)) < DEGENERACY_GAP))
    return freqs, _fix_signs(evecs[:, order]), degenerate


def transverse_modes(cfg: TrapConfig, geom: CrystalGeometry) -> ModeSpectrum:
    """Out-of-plane (z) modes; the first column is the centre-of-mass mode."""
    if not check_planarity(geom, PLANARITY_TOL):
        raise ValueError(
            f"crystal is not planar (max |z| = {geom.planarity_deviation:.3e} m)"
        )
    _require_equilibrium(cfg, geom)
    k_zz = hessian(cfg, geom.positions)[2::3, 2::3]
    freqs, vecs, degenerate = _spectrum(k_zz, cfg.mass)
    return ModeSpectrum(freqs, vecs, "transverse_z", geom.identifier,
                        labels=["z"] * len(freqs), degenerate=degenerate)


def full_modes(cfg: TrapConfig, geom: CrystalGeometry) -> ModeSpectrum:
    """All 3N modes, each labelled by the axis carrying most of its weight."""
    _require_equilibrium(cfg, geom)
    freqs, vecs, degenerate = _spectrum(hessian(cfg, geom.positions), cfg.mass)
    n = geom.n_ions
    weight = (vecs.reshape(n, 3, -1) ** 2).sum(axis=0)
    labels = ["xyz"[k] for k in np.argmax(weight, axis=0)]
    axis = "full"
    return ModeSpectrum(freqs, vecs, axis, geom.identifier, labels=labels,
                        degenerate=degenerate)


def mode_participation(spec: ModeSpectrum, mode_index: int):
    """Per-ion weights b_{i,m} of one mode, largest entry positive."""
    if not 0 <= mode_index < spec.n_modes:
        raise IndexError(f"mode index {mode_index} out of range 0..{spec.n_modes - 1}")
    return _fix_signs(spec.mode_matrix[:, [mode_index]])[:, 0]


def branch_counts(spec: ModeSpectrum):
    return {axis: spec.labels.count(axis) for axis in "xyz"}
