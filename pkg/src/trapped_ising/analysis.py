"""Classical ground manifolds, measurement statistics and error models."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .coupling import CouplingMatrix
from .states import QuantumState, bits_of, polarized_state, product_state, spins_to_index

MAX_ENUMERATION = 24
_CHUNK = 1 << 16
_SHOT_BATCH = 1 << 16


@dataclass
class GroundManifold:
    """Lowest-energy classical configurations (rows of +-1 spins)."""

    configurations: np.ndarray
    energy: float
    gap: float
    metadata: dict = field(default_factory=dict)

    @property
    def indices(self):
        return np.sort(spins_to_index(self.configurations))

    @property
    def size(self):
        return len(self.configurations)

    def is_flip_closed(self):
        own = set(spins_to_index(self.configurations).tolist())
        flipped = set(spins_to_index(-self.configurations).tolist())
        return own == flipped

    def bitstrings(self):
        return ["".join("1" if s > 0 else "0" for s in row) for row in self.configurations]

    def to_record(self):
        return {
            "configurations": self.configurations.tolist(),
            "bitstrings": self.bitstrings(),
            "indices": self.indices.tolist(),
            "energy_rad_s": self.energy,
            "gap_rad_s": self.gap,
            "metadata": self.metadata,
        }


def ising_energies(jm: CouplingMatrix):
    """E(s) = sum_{i<j} J_ij s_i s_j for every configuration, in binary order."""
    n = jm.n_ions
    if n > MAX_ENUMERATION:
        raise ValueError(f"brute-force enumeration limited to {MAX_ENUMERATION} spins")
    j = jm.j
    total = 1 << n
    energies = np.empty(total)
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total))
        s = 2.0 * bits_of(idx, n) - 1.0
        energies[start:start + len(idx)] = 0.5 * np.einsum("ki,ki->k", s @ j, s)
    return energies


def _manifold_from(energies, members, n, gap, **metadata):
    configs = 2 * bits_of(members, n).astype(np.int8) - 1
    return GroundManifold(configs, float(energies[members].min()), float(gap), metadata)


def classical_ground_manifold(jm: CouplingMatrix, eps_deg=None) -> GroundManifold:
    """All configurations within ``eps_deg`` (rad/s) of the classical minimum.

    ``eps_deg`` defaults to 1e-6 max|J|; it only absorbs rounding, so genuine
    near-degeneracies are not merged (see ``quasi_degenerate_manifold``).
    """
    energies = ising_energies(jm)
    if eps_deg is None:
        eps_deg = 1e-6 * jm.max_abs
    e0 = energies.min()
    inside = energies <= e0 + eps_deg
    members = np.flatnonzero(inside)
    rest = energies[~inside]
    gap = rest.min() - e0 if rest.size else np.inf
    return _manifold_from(energies, members, jm.n_ions, gap, eps_deg=float(eps_deg))


def quasi_degenerate_manifold(jm: CouplingMatrix, max_size=16) -> GroundManifold:
    """Low-energy cluster separated from the rest by the largest level gap.

    Among the ``max_size + 1`` lowest configurations the cut is placed at the
    widest energy gap; this groups levels that are split only weakly compared
    with the excitation gap.
    """
    energies = ising_energies(jm)
    order = np.argsort(energies, kind="stable")
    k = min(max_size + 1, len(order))
    low = energies[order[:k]]
    if k < 2:
        return _manifold_from(energies, order[:1], jm.n_ions, np.inf, rule="largest-gap")
    gaps = np.diff(low)
    cut = int(np.argmax(gaps)) + 1
    spread = low[cut - 1] - low[0]
    return _manifold_from(energies, np.sort(order[:cut]), jm.n_ions, gaps[cut - 1],
                          rule="largest-gap", spread_rad_s=float(spread))


def population_histogram(state: QuantumState, basis="y"):
    """Probabilities of all 2^N outcomes in binary order (ion 1 = MSB)."""
    if not isinstance(state, QuantumState):
        raise TypeError("expected a QuantumState")
    return state.probabilities(basis)


def sx_distribution(state: QuantumState):
    """P(S_x = k - N/2) for k = 0..N, from x-basis Hamming weights."""
    n = state.n_ions
    p = state.probabilities("x")
    weights = bits_of(np.arange(len(p)), n).sum(axis=1)
    return np.bincount(weights, weights=p, minlength=n + 1)


def sx_values(n):
    return np.arange(n + 1) - n / 2


def bhattacharyya(p, q):
    """Overlap coefficient sum_k sqrt(p_k q_k) of two distributions."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError("distributions must share the same support")
    if np.any(p < 0) or np.any(q < 0):
        raise ValueError("negative probability")
    # normalizing makes bhattacharyya(p, p) == 1 exactly
    value = np.sum(np.sqrt(p * q)) / np.sqrt(p.sum() * q.sum())
    return float(min(max(value, 0.0), 1.0))


def single_ion_bhattacharyya(p_up, ideal=0.5):
    """Product over ions of the two-outcome overlap with the ideal distribution."""
    p = np.asarray(p_up, dtype=float)
    if np.any(p < 0) or np.any(p > 1):
        raise ValueError("single-ion probabilities must lie in [0, 1]")
    return float(np.prod(np.sqrt(ideal * p) + np.sqrt((1 - ideal) * (1 - p))))


def rotation_angles(rabi, nominal_angle=np.pi / 2):
    rabi = np.asarray(rabi, dtype=float)
    if np.any(rabi <= 0):
        raise ValueError("Rabi frequencies must be positive")
    return nominal_angle * rabi / rabi.mean()


def imperfect_global_rotation(rabi, nominal_angle=np.pi / 2) -> QuantumState:
    """|down>^N after a global pulse whose area scales with each ion's Rabi frequency.

    The rotation axis is y, so a pi/2 pulse maps |down> to |-x>.
    """
    theta = rotation_angles(rabi, nominal_angle)
    singles = [np.array([np.cos(t / 2), -np.sin(t / 2)], dtype=complex) for t in theta]
    return QuantumState(product_state(singles))


def ideal_global_rotation(n, nominal_angle=np.pi / 2):
    return imperfect_global_rotation(np.ones(n), nominal_angle)


def preparation_fidelity(rabi, nominal_angle=np.pi / 2, root=True):
    """Overlap of the imperfect initial state with the ideal one.

    ``root=True`` gives |<ideal|actual>|, the quantity a Bhattacharyya
    coefficient of the single-ion z populations reproduces for these product
    states; ``root=False`` gives the squared overlap.
    """
    theta = rotation_angles(rabi, nominal_angle)
    amp = np.prod(np.abs(np.cos((theta - nominal_angle) / 2)))
    return float(amp if root else amp**2)


@dataclass
class DetectionModel:
    per_ion_fidelity: np.ndarray
    shots: int
    rng_seed: int = 0

    def __post_init__(self):
        self.per_ion_fidelity = np.atleast_1d(np.asarray(self.per_ion_fidelity, dtype=float))
        if np.any(self.per_ion_fidelity <= 0.5) or np.any(self.per_ion_fidelity > 1):
            raise ValueError("detection fidelities must lie in (0.5, 1]")
        if int(self.shots) != self.shots or self.shots < 0:
            raise ValueError("shots must be a non-negative integer")

    @classmethod
    def uniform(cls, n_ions, fidelity, shots, rng_seed=0):
        return cls(np.full(n_ions, float(fidelity)), shots, rng_seed)


@dataclass
class SampleResult:
    counts: np.ndarray
    bitstrings: np.ndarray

    @property
    def shots(self):
        return len(self.bitstrings)

    @property
    def histogram(self):
        return self.counts / self.counts.sum()

    def lines(self):
        return ["".join(map(str, row)) for row in self.bitstrings]


def apply_detection_and_sample(probabilities, det: DetectionModel) -> SampleResult:
    """Draw shots from ``probabilities`` then flip each bit with prob. 1 - fidelity.

    Shots are produced in fixed-size batches, batch b drawing from an
    independent Philox stream keyed by (rng_seed, b), so the record does not
    depend on how batches are scheduled.
    """
    p = np.asarray(probabilities, dtype=float)
    n = int(np.log2(len(p)))
    if 1 << n != len(p):
        raise ValueError("probability vector length must be 2^N")
    if det.shots < 1:
        raise ValueError("shots must be >= 1")
    if np.any(p < -1e-12) or abs(p.sum() - 1) > 1e-6:
        raise ValueError("input distribution is not normalized")
    p = np.clip(p, 0, None)
    p /= p.sum()
    fid = det.per_ion_fidelity
    if len(fid) == 1:
        fid = np.full(n, fid[0])
    if len(fid) != n:
        raise ValueError("one detection fidelity per ion required")
    cdf = np.cumsum(p)
    cdf[-1] = 1.0
    out = []
    for b, start in enumerate(range(0, det.shots, _SHOT_BATCH)):
        size = min(_SHOT_BATCH, det.shots - start)
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([det.rng_seed, b])))
        idx = np.searchsorted(cdf, rng.random(size), side="right")
        bits = bits_of(np.minimum(idx, len(p) - 1), n)
        flips = rng.random((size, n)) < (1 - fid)
        out.append(bits ^ flips.astype(np.int8))
    bits = np.concatenate(out)
    measured = (bits.astype(np.int64) << np.arange(n - 1, -1, -1)).sum(axis=1)
    counts = np.bincount(measured, minlength=len(p))
    return SampleResult(counts, bits)


def detection_confusion(probabilities, fidelities):
    """Exact readout distribution under independent bit flips (no sampling)."""
    p = np.asarray(probabilities, dtype=float)
    n = int(np.log2(len(p)))
    fid = np.broadcast_to(np.asarray(fidelities, dtype=float), (n,))
    t = p.reshape((2,) * n)
    for k in range(n):
        f = fid[k]
        m = np.array([[f, 1 - f], [1 - f, f]])
        t = np.moveaxis(np.tensordot(m, t, axes=([1], [k])), 0, k)
    return t.reshape(-1)


def manifold_population(histogram, manifold: GroundManifold):
    h = np.asarray(histogram, dtype=float)
    n = manifold.configurations.shape[1]
    if len(h) != 1 << n:
        raise ValueError(f"histogram has {len(h)} entries, manifold expects {1 << n}")
    if manifold.size == 0:
        raise ValueError("empty manifold")
    return float(h[manifold.indices].sum())


__all__ = [
    "GroundManifold", "DetectionModel", "SampleResult", "classical_ground_manifold",
    "quasi_degenerate_manifold", "ising_energies", "population_histogram",
    "sx_distribution", "sx_values", "bhattacharyya", "single_ion_bhattacharyya",
    "imperfect_global_rotation", "ideal_global_rotation", "preparation_fidelity",
    "apply_detection_and_sample", "detection_confusion", "manifold_population",
    "polarized_state",
]
