"""Phonon-mediated Ising couplings from a transverse mode spectrum."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.constants as const

from .crystal import YB171_MASS
from .errors import ResonanceError
from .modes import ModeSpectrum

SDF_CARRIER_PHASE_OFFSET = -np.pi / 2
DEFAULT_WAVELENGTH = 355e-9
DEFAULT_GUARD_BAND = 2 * np.pi * 1e3


@dataclass
class RamanConfig:
    """Raman drive: per-ion Rabi frequencies, SDF detuning and field strength.

    Frequencies are angular (rad/s). ``delta_k`` defaults to the
    counter-propagating-at-90-degrees value 2 pi sqrt(2) / wavelength.
    """

    rabi: np.ndarray
    detuning_mu: float
    wavelength: float = DEFAULT_WAVELENGTH
    delta_k: float | None = None
    b_field: float = 0.0
    sdf_carrier_phase_offset: float = SDF_CARRIER_PHASE_OFFSET

    def __post_init__(self):
        self.rabi = np.atleast_1d(np.asarray(self.rabi, dtype=float))
        if np.any(self.rabi < 0):
            raise ValueError("Rabi frequencies must be non-negative")
        if self.delta_k is None:
            self.delta_k = 2 * np.pi * np.sqrt(2) / self.wavelength
        if not self.delta_k > 0:
            raise ValueError("delta_k must be positive")
        if not self.detuning_mu > 0:
            raise ValueError("detuning mu must be positive")
        if self.sdf_carrier_phase_offset != SDF_CARRIER_PHASE_OFFSET:
            raise ValueError("the SDF/carrier phase offset is fixed at -pi/2")

    @classmethod
    def uniform(cls, n_ions, rabi, detuning_mu, **kwargs):
        return cls(np.full(n_ions, float(rabi)), detuning_mu, **kwargs)

    def with_detuning(self, mu):
        return RamanConfig(self.rabi.copy(), mu, self.wavelength, self.delta_k,
                           self.b_field)

    @property
    def n_ions(self):
        return len(self.rabi)


@dataclass
class CouplingMatrix:
    """Symmetric J_ij (rad/s) with zero diagonal, used as sum over i<j."""

    j: np.ndarray
    detuning_mu: float
    spectrum_ref: str = ""

    def __post_init__(self):
        self.j = np.asarray(self.j, dtype=float)
        if self.j.ndim != 2 or self.j.shape[0] != self.j.shape[1]:
            raise ValueError("J must be square")
        if not np.array_equal(self.j, self.j.T):
            raise ValueError("J must be symmetric")
        if np.any(np.diag(self.j) != 0):
            raise ValueError("J must have zero diagonal")

    @property
    def n_ions(self):
        return len(self.j)

    @property
    def max_abs(self):
        return float(np.abs(self.j).max()) if self.n_ions > 1 else 0.0

    def pairs(self):
        iu = np.triu_indices(self.n_ions, 1)
        return iu, self.j[iu]


def lamb_dicke(spec: ModeSpectrum, raman: RamanConfig, mass=YB171_MASS):
    """eta_{i,m} = delta_k b_{i,m} sqrt(hbar / (2 M omega_m))."""
    zpf = np.sqrt(const.hbar / (2 * mass * spec.frequencies))
    return raman.delta_k * spec.mode_matrix * zpf


def recoil_frequency(raman: RamanConfig, mass=YB171_MASS):
    """hbar delta_k^2 / (2M) in rad/s."""
    return const.hbar * raman.delta_k**2 / (2 * mass)


def _check_guard_band(spec, mu, guard_band):
    offset = np.abs(mu - spec.frequencies)
    m = int(np.argmin(offset))
    if offset[m] <= guard_band:
        raise ResonanceError(
            f"detuning {mu / 2 / np.pi / 1e6:.6f} MHz lies within "
            f"{guard_band / 2 / np.pi / 1e3:.3g} kHz of mode {m} "
            f"({spec.frequencies[m] / 2 / np.pi / 1e6:.6f} MHz)",
            mode_index=m,
        )


def compute_couplings(spec: ModeSpectrum, raman: RamanConfig, mass=YB171_MASS,
                      guard_band=DEFAULT_GUARD_BAND) -> CouplingMatrix:
    r"""Ising couplings

    .. math:: J_{ij} = \Omega_i \Omega_j \frac{\hbar \delta k^2}{2M}
              \sum_m \frac{b_{i,m} b_{j,m}}{\mu^2 - \omega_m^2}

    Positive J is anti-ferromagnetic for H = sum_{i<j} J_ij sy sy.
    """
    if len(raman.rabi) != spec.mode_matrix.shape[0]:
        raise ValueError("rabi length must equal the number of ions")
    mu = raman.detuning_mu
    _check_guard_band(spec, mu, guard_band)
    b = spec.mode_matrix
    kernel = (b / (mu**2 - spec.frequencies**2)) @ b.T
    j = recoil_frequency(raman, mass) * np.outer(raman.rabi, raman.rabi) * kernel
    j = 0.5 * (j + j.T)
    np.fill_diagonal(j, 0.0)
    return CouplingMatrix(j, mu, spec.geometry_ref)


@dataclass(frozen=True)
class Edge:
    i: int
    j: int
    j_rad_s: float
    sign: str

    def to_record(self):
        return {"i": self.i, "j": self.j, "J_rad_s": self.j_rad_s, "sign": self.sign}


def interaction_graph(jm: CouplingMatrix, edge_threshold=0.2):
    """Edges with |J| >= threshold * max|J|, labelled AFM (J>0) or FM (J<0).

    Ion indices in the returned edges are 1-based, as drawn in figure insets.
    """
    if not 0 < edge_threshold < 1:
        raise ValueError("edge_threshold must lie in (0, 1)")
    scale = jm.max_abs
    if scale == 0:
        return []
    (rows, cols), values = jm.pairs()
    keep = np.abs(values) >= edge_threshold * scale
    return [Edge(int(r) + 1, int(c) + 1, float(v), "AFM" if v > 0 else "FM")
            for r, c, v in zip(rows[keep], cols[keep], values[keep])]


def gaussian_beam_rabi(positions, peak_rabi, waist=25e-6, center=None):
    """Per-ion Rabi frequencies under a Gaussian two-beam Raman profile.

    Both beams share the 1/e^2 intensity radius ``waist``, so the two-photon
    Rabi frequency falls as exp(-2 r^2 / waist^2) in the crystal plane.
    """
    p = np.asarray(positions, dtype=float)
    c = p.mean(axis=0) if center is None else np.asarray(center, dtype=float)
    r2 = np.sum((p[:, :2] - c[:2]) ** 2, axis=1)
    return peak_rabi * np.exp(-2 * r2 / waist**2)


@dataclass
class ScanPoint:
    mu: float
    coupling: CouplingMatrix | None
    skipped: bool = False
    manifold: object = None
    extra: dict = field(default_factory=dict)

    @property
    def degeneracy(self):
        return None if self.manifold is None else len(self.manifold.configurations)


def scan_detuning(spec: ModeSpectrum, raman_template: RamanConfig, mu_range, step,
                  mass=YB171_MASS, guard_band=DEFAULT_GUARD_BAND, eps_deg=None,
                  classify=True):
    """Couplings and classical ground manifolds over a grid of detunings.

    Points falling inside a mode's guard band are returned with
    ``skipped=True`` rather than raising.
    """
    from .analysis import classical_ground_manifold

    lo, hi = mu_range
    if step <= 0 or hi < lo:
        raise ValueError("empty detuning range")
    n_pts = int(np.floor((hi - lo) / step + 1e-9)) + 1
    mus = lo + step * np.arange(n_pts)
    out = []
    for mu in mus:
        try:
            jm = compute_couplings(spec, raman_template.with_detuning(mu), mass, guard_band)
        except ResonanceError as err:
            out.append(ScanPoint(mu, None, skipped=True, extra={"mode": err.mode_index}))
            continue
        manifold = classical_ground_manifold(jm, eps_deg) if classify else None
        out.append(ScanPoint(mu, jm, manifold=manifold))
    return out
