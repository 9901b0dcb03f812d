"""Spin states, Pauli operators and measurement-basis changes.

Single-qubit ordering is ``[down, up]`` with sigma_z = diag(-1, +1). Many-body
vectors use ion 1 as the most significant bit, so bit value 1 means "up" and
the all-down configuration is index 0.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

SQ2 = np.sqrt(0.5)

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, 1j], [-1j, 0]], dtype=complex),
    "z": np.array([[-1, 0], [0, 1]], dtype=complex),
}

# columns are (down_b, up_b) eigenvectors of sigma_b
EIGENBASIS = {
    "z": np.eye(2, dtype=complex),
    "x": SQ2 * np.array([[-1, 1], [1, 1]], dtype=complex),
    "y": SQ2 * np.array([[-1j, 1j], [1, 1]], dtype=complex),
}

NORM_TOL = 1e-8


def spin_state(basis, up):
    """Single-qubit eigenstate of sigma_basis with eigenvalue +1 (up) or -1."""
    return EIGENBASIS[basis][:, 1 if up else 0].copy()


def product_state(states):
    out = np.ones(1, dtype=complex)
    for s in states:
        out = np.kron(out, s)
    return out


def polarized_state(n, basis="x", up=False):
    """All n spins along +basis (``up``) or -basis."""
    return QuantumState(product_state([spin_state(basis, up)] * n))


def sparse_spin_op(pauli, site, n):
    """sigma_pauli acting on ``site`` (0-based) of an n-spin register."""
    left = sp.identity(2**site, format="csr", dtype=complex)
    right = sp.identity(2 ** (n - site - 1), format="csr", dtype=complex)
    return sp.kron(sp.kron(left, sp.csr_matrix(PAULI[pauli])), right, format="csr")


def apply_local(u, psi, n):
    """Apply the same 2x2 matrix ``u`` to every qubit of a state vector."""
    t = np.asarray(psi).reshape((2,) * n)
    for k in range(n):
        t = np.moveaxis(np.tensordot(u, t, axes=([1], [k])), 0, k)
    return t.reshape(-1)


def apply_local_density(u, rho, n):
    """U^{(x)n} rho U^{(x)n, dagger}."""
    d = 2**n
    t = np.asarray(rho).reshape((2,) * (2 * n))
    for k in range(2 * n):
        m = u if k < n else u.conj()
        t = np.moveaxis(np.tensordot(m, t, axes=([1], [k])), 0, k)
    return t.reshape(d, d)


def bits_of(indices, n):
    """Bit matrix (len(indices) x n), ion 1 first."""
    idx = np.asarray(indices, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((idx[..., None] >> shifts) & 1).astype(np.int8)


def index_of(bits):
    b = np.asarray(bits, dtype=np.int64)
    n = b.shape[-1]
    return (b << np.arange(n - 1, -1, -1, dtype=np.int64)).sum(axis=-1)


def spins_to_index(spins):
    """Configuration(s) of +-1 spins to binary-order index."""
    return index_of((np.asarray(spins) > 0).astype(np.int64))


@dataclass
class QuantumState:
    """Spin-register state in the z (computational) representation."""

    data: np.ndarray
    kind: str = "pure"
    basis: str = "z"

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex)
        if self.kind not in ("pure", "density"):
            raise ValueError(f"unknown representation {self.kind!r}")
        if self.basis != "z":
            raise ValueError("states are stored in the z basis")
        dim = self.data.shape[0]
        if dim < 1 or dim & (dim - 1):
            raise ValueError(f"dimension {dim} is not a power of two")
        if self.kind == "pure":
            if self.data.ndim != 1:
                raise ValueError("pure state must be a vector")
            if abs(np.linalg.norm(self.data) - 1) > NORM_TOL:
                raise ValueError("pure state is not normalized")
        else:
            if self.data.shape != (dim, dim):
                raise ValueError("density matrix must be square")
            if abs(np.trace(self.data).real - 1) > NORM_TOL:
                raise ValueError("density matrix does not have unit trace")
            if np.abs(self.data - self.data.conj().T).max() > NORM_TOL:
                raise ValueError("density matrix is not Hermitian")

    @property
    def n_ions(self):
        return int(np.log2(self.data.shape[0]))

    def density_matrix(self):
        if self.kind == "density":
            return self.data
        return np.outer(self.data, self.data.conj())

    def probabilities(self, basis="z"):
        """Born-rule probabilities in binary order for a measurement of sigma_basis."""
        if basis not in EIGENBASIS:
            raise ValueError(f"unknown basis {basis!r}")
        u = EIGENBASIS[basis].conj().T
        n = self.n_ions
        if self.kind == "pure":
            p = np.abs(apply_local(u, self.data, n)) ** 2
        else:
            p = np.real(np.diag(apply_local_density(u, self.data, n)))
        p = np.clip(p, 0.0, None)
        return p / p.sum()

    def overlap(self, other):
        """|<self|other>|^2 for pure states."""
        return float(np.abs(np.vdot(self.data, other.data)) ** 2)
