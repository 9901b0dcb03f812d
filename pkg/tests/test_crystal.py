import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import energy, fd_gradient, two_ion_spacing
from trapped_ising.crystal import (
    TrapConfig,
    canonical_order,
    hessian,
    max_force,
    potential_and_gradient,
    solve_equilibrium,
)
from trapped_ising.errors import CoincidentIonsError, DegenerateTrapError


def test_two_ion_spacing_matches_bisection():
    cfg = TrapConfig.from_mhz(2, 0.6, 0.4, 1.5)
    geom = solve_equilibrium(cfg)
    d = np.linalg.norm(geom.positions[0] - geom.positions[1])
    assert d == pytest.approx(two_ion_spacing(cfg), rel=1e-10)
    # the pair lies along the weakest axis
    axis = np.abs(geom.positions[0] - geom.positions[1]) / d
    assert axis[1] == pytest.approx(1.0, abs=1e-9)


def test_energy_and_gradient_against_explicit_sums(four_ion):
    cfg, geom, _ = four_ion
    rng = np.random.default_rng(1)
    p = geom.positions + rng.normal(scale=2e-7, size=geom.positions.shape)
    e, g = potential_and_gradient(cfg, p)
    assert e == pytest.approx(energy(cfg, p), rel=1e-13)
    fd = fd_gradient(cfg, p, h=1e-10)
    assert np.max(np.abs(g - fd)) / np.max(np.abs(g)) < 1e-5


def test_rhombus_geometry(four_ion):
    cfg, geom, _ = four_ion
    p = geom.positions
    assert geom.planarity_deviation < 1e-12
    centred = p - p.mean(axis=0)
    # two ions on each in-plane axis, symmetric about the centre
    on_x = np.abs(centred[:, 1]) < 1e-9
    on_y = np.abs(centred[:, 0]) < 1e-9
    assert on_x.sum() == 2 and on_y.sum() == 2
    assert np.sort(np.abs(centred[on_x, 0]))[0] == pytest.approx(2.73e-6, rel=0.01)
    assert np.sort(np.abs(centred[on_y, 1]))[0] == pytest.approx(6.06e-6, rel=0.01)


def test_hexagon_labels(seven_ion):
    _, geom, _ = seven_ion
    p = geom.positions[:, :2]
    ring = p[1:]
    assert np.linalg.norm(p[0] - ring.mean(axis=0)) < 1e-9
    angles = np.mod(np.arctan2(ring[:, 1], ring[:, 0]) + np.pi / 4, 2 * np.pi)
    assert np.all(np.diff(angles) > 0)


def test_residual_force_and_stability(ten_ion):
    cfg, geom, _ = ten_ion
    assert geom.max_residual_force <= cfg.force_threshold
    assert np.linalg.eigvalsh(hessian(cfg, geom.positions))[0] > 0


def test_solve_is_deterministic():
    cfg = TrapConfig.from_mhz(7, 0.486, 0.407, 1.482)
    a = solve_equilibrium(cfg, rng_seed=3)
    b = solve_equilibrium(cfg, rng_seed=3)
    assert np.array_equal(a.positions, b.positions)
    assert a.identifier == b.identifier


def test_canonical_order_is_permutation_invariant(seven_ion):
    cfg, geom, _ = seven_ion
    shuffled = geom.positions[np.random.default_rng(0).permutation(7)]
    assert np.array_equal(canonical_order(shuffled, cfg), geom.positions)


def test_errors():
    cfg = TrapConfig.from_mhz(3, 0.5, 0.5, 1.5)
    with pytest.raises(DegenerateTrapError):
        solve_equilibrium(cfg)
    with pytest.raises(CoincidentIonsError):
        potential_and_gradient(TrapConfig.from_mhz(2, 0.6, 0.4, 1.5), np.zeros((2, 3)))
    with pytest.raises(ValueError):
        TrapConfig(2, -1.0, 1.0, 1.0)


@settings(max_examples=15, deadline=None)
@given(n=st.integers(2, 7), fx=st.floats(0.45, 0.7), ratio=st.floats(0.6, 0.9))
def test_random_planar_traps_converge(n, fx, ratio):
    cfg = TrapConfig.from_mhz(n, fx, fx * ratio, 2.5)
    geom = solve_equilibrium(cfg, n_starts=4)
    assert max_force(cfg, geom.positions) <= cfg.force_threshold
    assert geom.planarity_deviation < 1e-12
