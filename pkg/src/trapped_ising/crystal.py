"""Equilibrium configurations of ions in an anisotropic harmonic trap.

Energies are in joules, positions in metres and forces in newtons. The
minimizer itself works in the characteristic length
``l = (k_C q^2 / (M omega_y^2))^(1/3)``, where the dimensionless problem is
well conditioned, and converts back to SI before returning.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np
import scipy.constants as const
from scipy.optimize import minimize
from scipy.spatial import ConvexHull, QhullError

from .errors import (
    CoincidentIonsError,
    ConvergenceError,
    DegenerateTrapError,
    SaddlePointError,
)

YB171_MASS = 171 * const.atomic_mass
COULOMB_CONSTANT = 1.0 / (4 * np.pi * const.epsilon_0)

# dimensionless force residual accepted as an equilibrium
FORCE_TOLERANCE = 1e-9
# |omega_x - omega_y| below this (rad/s) leaves a planar crystal free to rotate
SADDLE_TOLERANCE = 1e-8
PINNING_TOLERANCE = 2 * np.pi * 1.0


@dataclass(frozen=True)
class TrapConfig:
    """Ion species plus the three secular frequencies (rad/s)."""

    n_ions: int
    omega_x: float
    omega_y: float
    omega_z: float
    mass: float = YB171_MASS
    charge: float = const.e

    def __post_init__(self):
        if int(self.n_ions) != self.n_ions or self.n_ions < 1:
            raise ValueError(f"n_ions must be a positive integer, got {self.n_ions}")
        for name in ("omega_x", "omega_y", "omega_z", "mass", "charge"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")

    @classmethod
    def from_mhz(cls, n_ions, fx, fy, fz, **kwargs):
        """Build from linear trap frequencies given in MHz."""
        w = 2 * np.pi * 1e6
        return cls(n_ions, fx * w, fy * w, fz * w, **kwargs)

    @property
    def omegas(self):
        return np.array([self.omega_x, self.omega_y, self.omega_z])

    @property
    def coulomb_strength(self):
        """k_C q^2 in J m."""
        return COULOMB_CONSTANT * self.charge**2

    @property
    def length_scale(self):
        return (self.coulomb_strength / (self.mass * self.omega_y**2)) ** (1 / 3)

    @property
    def force_scale(self):
        return self.coulomb_strength / self.length_scale**2

    @property
    def force_threshold(self):
        """Largest force component (N) accepted at an equilibrium."""
        return FORCE_TOLERANCE * self.force_scale


@dataclass
class CrystalGeometry:
    positions: np.ndarray
    potential_energy: float
    max_residual_force: float
    planarity_deviation: float
    metadata: dict = field(default_factory=dict)

    @property
    def n_ions(self):
        return len(self.positions)

    @property
    def min_separation(self):
        if self.n_ions < 2:
            return np.inf
        d = _pair_distances(self.positions)
        return d[np.triu_indices(self.n_ions, 1)].min()

    @property
    def identifier(self):
        digest = hashlib.sha1(np.round(self.positions, 15).tobytes()).hexdigest()
        return f"geom-{self.n_ions}-{digest[:10]}"

    def to_record(self):
        return {
            "identifier": self.identifier,
            "n_ions": self.n_ions,
            "positions_m": self.positions.tolist(),
            "potential_energy_J": self.potential_energy,
            "max_residual_force_N": self.max_residual_force,
            "planarity_deviation_m": self.planarity_deviation,
            "metadata": self.metadata,
        }


def _pair_distances(positions):
    diff = positions[:, None, :] - positions[None, :, :]
    return np.linalg.norm(diff, axis=-1)


def _check_distinct(positions):
    n = len(positions)
    if n < 2:
        return
    d = _pair_distances(positions)[np.triu_indices(n, 1)]
    if np.any(d == 0):
        raise CoincidentIonsError("coincident ions: Coulomb energy diverges")


def potential_and_gradient(cfg: TrapConfig, positions):
    """Total trap + Coulomb energy (J) and its gradient (N x 3, in N)."""
    p = np.asarray(positions, dtype=float).reshape(-1, 3)
    _check_distinct(p)
    k2 = cfg.mass * cfg.omegas**2
    energy = 0.5 * np.sum(k2 * p**2)
    grad = k2 * p
    if len(p) > 1:
        diff = p[:, None, :] - p[None, :, :]
        r = np.linalg.norm(diff, axis=-1)
        iu = np.triu_indices(len(p), 1)
        energy += cfg.coulomb_strength * np.sum(1.0 / r[iu])
        np.fill_diagonal(r, np.inf)
        grad = grad - cfg.coulomb_strength * np.sum(diff / r[..., None] ** 3, axis=1)
    return float(energy), grad


def hessian(cfg: TrapConfig, positions):
    """Analytic 3N x 3N Hessian of the potential, ordered (ion, axis)."""
    p = np.asarray(positions, dtype=float).reshape(-1, 3)
    _check_distinct(p)
    n = len(p)
    h = np.zeros((n, 3, n, 3))
    if n > 1:
        diff = p[:, None, :] - p[None, :, :]
        r = np.linalg.norm(diff, axis=-1)
        np.fill_diagonal(r, np.inf)
        eye = np.eye(3)
        blocks = cfg.coulomb_strength * (
            eye / r[..., None, None] ** 3
            - 3 * diff[..., :, None] * diff[..., None, :] / r[..., None, None] ** 5
        )
        h = blocks.transpose(0, 2, 1, 3).copy()
        idx = np.arange(n)
        h[idx, :, idx, :] = -blocks.sum(axis=1)
    idx = np.arange(n)
    h[idx, :, idx, :] += np.diag(cfg.mass * cfg.omegas**2)
    return h.reshape(3 * n, 3 * n)


def max_force(cfg: TrapConfig, positions):
    return float(np.abs(potential_and_gradient(cfg, positions)[1]).max())


def _scaled_problem(cfg):
    w2 = (cfg.omegas / cfg.omega_y) ** 2

    def fun(x):
        p = x.reshape(-1, 3)
        e = 0.5 * np.sum(w2 * p**2)
        g = w2 * p
        if len(p) > 1:
            diff = p[:, None, :] - p[None, :, :]
            r = np.linalg.norm(diff, axis=-1)
            np.fill_diagonal(r, np.inf)
            e += 0.5 * np.sum(1.0 / r)
            g = g - np.sum(diff / r[..., None] ** 3, axis=1)
        return e, g.ravel()

    # hessian() with unit mass and charge has trap part w2 and Coulomb part
    # scaled by k_C; divide the latter out
    unit = TrapConfig(cfg.n_ions, *(cfg.omegas / cfg.omega_y), mass=1.0, charge=1.0)
    unit_strength = unit.coulomb_strength

    def scaled_hess(x):
        p = x.reshape(-1, 3)
        h = hessian(unit, p)
        n = len(p)
        trap = np.kron(np.eye(n), np.diag(w2))
        return trap + (h - trap) / unit_strength

    return fun, scaled_hess


def _lattice_guess(cfg):
    n = cfg.n_ions
    # spread along the weak axes, flattened along the strong one
    aspect = (cfg.omega_y / cfg.omegas) ** (2 / 3)
    radius = 1.2 * n ** (1 / 3)
    k = np.arange(n)
    r = radius * np.sqrt((k + 0.5) / n)
    theta = k * np.pi * (3 - np.sqrt(5))
    plane = np.argsort(cfg.omegas)[:2]
    guess = np.zeros((n, 3))
    guess[:, plane[0]] = r * np.cos(theta)
    guess[:, plane[1]] = r * np.sin(theta)
    return guess * aspect


def _newton_polish(x, fun, hess, tol, max_iter=60):
    for _ in range(max_iter):
        _, g = fun(x)
        if np.abs(g).max() <= tol * 1e-3:
            break
        step = np.linalg.lstsq(hess(x), g, rcond=None)[0]
        x = x - step
    return x


def solve_equilibrium(cfg: TrapConfig, n_starts=8, rng_seed=0):
    """Lowest-energy stable configuration found from ``n_starts`` local searches.

    Each start is a seeded random perturbation of a flattened spiral guess,
    relaxed with BFGS on analytic gradients and polished by Newton steps on
    the exact Hessian.
    """
    if n_starts < 1:
        raise ValueError("n_starts must be >= 1")
    n = cfg.n_ions
    weak = np.sort(cfg.omegas)
    if n >= 2 and weak[1] - weak[0] < PINNING_TOLERANCE:
        raise DegenerateTrapError(
            "two weakest trap frequencies differ by < 1 Hz; crystal orientation is not pinned"
        )
    fun, hess = _scaled_problem(cfg)
    rng = np.random.default_rng(rng_seed)
    guess = _lattice_guess(cfg)
    # dimensionless force tolerance maps to cfg.force_threshold exactly
    tol = FORCE_TOLERANCE
    found = []
    best_residual = np.inf
    for k in range(n_starts):
        x0 = guess + rng.normal(scale=0.25, size=guess.shape)
        try:
            res = minimize(fun, x0.ravel(), jac=True, method="BFGS",
                           options={"gtol": 1e-8, "maxiter": 20000})
            x = _newton_polish(res.x, fun, hess, tol)
            e, g = fun(x)
        except CoincidentIonsError:
            continue
        resid = np.abs(g).max()
        best_residual = min(best_residual, resid)
        if np.isfinite(e) and resid <= tol:
            found.append((e, k, x))
    if not found:
        raise ConvergenceError(
            f"no start converged (best dimensionless residual {best_residual:.3e})",
            best_residual=best_residual * cfg.force_scale,
        )
    e_min = min(f[0] for f in found)
    # near-equal energies are the same crystal up to symmetry: lowest index wins
    e_best, _, x_best = min(
        (f for f in found if f[0] - e_min <= 1e-12 * abs(e_min) + 1e-300),
        key=lambda f: f[1],
    )
    positions = canonical_order(x_best.reshape(n, 3) * cfg.length_scale, cfg)

    # soft rotation modes of nearly isotropic traps sit at the round-off floor
    lowest = np.linalg.eigvalsh(hessian(cfg, positions))[0]
    if lowest < -SADDLE_TOLERANCE * cfg.mass * weak[0] ** 2:
        raise SaddlePointError(f"lowest Hessian eigenvalue {lowest:.3e} is not positive")
    energy, grad = potential_and_gradient(cfg, positions)
    return CrystalGeometry(
        positions=positions,
        potential_energy=energy,
        max_residual_force=float(np.abs(grad).max()),
        planarity_deviation=float(np.abs(positions[:, 2]).max()),
        metadata={"n_starts": n_starts, "rng_seed": rng_seed,
                  "converged_starts": len(found),
                  "length_scale_m": cfg.length_scale},
    )


def canonical_order(positions, cfg: TrapConfig | None = None, start_angle=-np.pi / 4):
    """Reorder ions: interior ions first, then the outer shell, each by angle.

    Angles are measured counter-clockwise in the plane of the two weakest trap
    axes, starting at ``start_angle``.
    """
    p = np.asarray(positions, dtype=float)
    n = len(p)
    if cfg is None:
        plane = [0, 1]
    else:
        plane = sorted(np.argsort(cfg.omegas)[:2])
    xy = p[:, plane]
    outer = np.ones(n, dtype=bool)
    if n >= 4:
        try:
            hull = ConvexHull(xy)
            outer[:] = False
            outer[hull.vertices] = True
        except QhullError:
            pass
    angle = np.mod(np.arctan2(xy[:, 1], xy[:, 0]) - start_angle, 2 * np.pi)
    # ions at the very centre have an ill-defined angle
    angle[np.linalg.norm(xy, axis=1) < 1e-12] = 0.0
    order = np.lexsort((np.round(angle, 9), outer))
    return p[order]


def check_planarity(geom: CrystalGeometry, tol):
    return bool(geom.planarity_deviation <= tol)
