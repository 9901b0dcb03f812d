import numpy as np
import pytest
import scipy.constants as const
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import couplings_brute_force
from trapped_ising.coupling import (
    CouplingMatrix,
    RamanConfig,
    compute_couplings,
    gaussian_beam_rabi,
    interaction_graph,
    lamb_dicke,
    scan_detuning,
)
from trapped_ising.errors import ResonanceError

TWO_PI = 2 * np.pi


def _raman(spec, offset_hz, mode=0, rabi=TWO_PI * 50e3):
    return RamanConfig.uniform(spec.n_modes, rabi, spec.frequencies[mode] + TWO_PI * offset_hz)


def test_matches_brute_force(seven_ion):
    cfg, _, spec = seven_ion
    rabi = TWO_PI * np.linspace(40e3, 60e3, 7)
    raman = RamanConfig(rabi, TWO_PI * 1.328e6)
    jm = compute_couplings(spec, raman, cfg.mass)
    ref = couplings_brute_force(rabi, raman.delta_k, cfg.mass, spec.frequencies,
                                spec.mode_matrix, raman.detuning_mu)
    assert np.abs(jm.j - ref).max() / np.abs(ref).max() < 1e-12


def test_blue_of_com_is_uniform_afm(four_ion):
    _, _, spec = four_ion
    jm = compute_couplings(spec, _raman(spec, 10e3))
    _, values = jm.pairs()
    assert np.all(values > 0)
    assert np.abs(values / values.mean() - 1).max() < 0.15
    assert values.mean() / TWO_PI == pytest.approx(346, rel=0.02)


def test_red_of_third_mode_gives_neel_couplings(four_ion):
    cfg, geom, spec = four_ion
    jm = compute_couplings(spec, _raman(spec, -10e3, mode=2))
    p = geom.positions
    (rows, cols), values = jm.pairs()
    # diagonals are the pairs whose midpoint is the crystal centre
    mid = 0.5 * (p[rows] + p[cols])
    diagonal = np.linalg.norm(mid - p.mean(axis=0), axis=1) < 1e-9
    assert diagonal.sum() == 2
    assert np.all(values[~diagonal] > 0) and np.all(values[diagonal] < 0)


def test_guard_band(four_ion):
    _, _, spec = four_ion
    with pytest.raises(ResonanceError) as err:
        compute_couplings(spec, _raman(spec, 500.0, mode=1))
    assert err.value.mode_index == 1


def test_lamb_dicke_scale(four_ion):
    cfg, _, spec = four_ion
    eta = lamb_dicke(spec, _raman(spec, 10e3), cfg.mass)
    single = TWO_PI * np.sqrt(2) / 355e-9 * np.sqrt(const.hbar / (2 * cfg.mass * cfg.omega_z))
    assert np.allclose(eta[:, 0], single / 2, rtol=1e-9)


def test_coupling_matrix_validation():
    with pytest.raises(ValueError):
        CouplingMatrix(np.array([[0.0, 1.0], [2.0, 0.0]]), 1.0)
    with pytest.raises(ValueError):
        CouplingMatrix(np.eye(2), 1.0)


def test_interaction_graph(four_ion):
    _, _, spec = four_ion
    jm = compute_couplings(spec, _raman(spec, -10e3, mode=2))
    edges = interaction_graph(jm, 0.2)
    assert {e.sign for e in edges} == {"AFM", "FM"}
    assert all(1 <= e.i < e.j <= 4 for e in edges)


def test_gaussian_profile(seven_ion):
    _, geom, _ = seven_ion
    rabi = gaussian_beam_rabi(geom.positions, 1.0, 25e-6)
    assert rabi[0] == pytest.approx(1.0)
    assert np.all(rabi[1:] < 1) and np.all(rabi > 0.8)


def test_scan_skips_resonances(four_ion):
    _, _, spec = four_ion
    lo = spec.frequencies[1] - TWO_PI * 2.5e3
    pts = scan_detuning(spec, _raman(spec, 10e3), (lo, lo + TWO_PI * 4e3), TWO_PI * 1e3)
    assert len(pts) == 5
    assert [p.skipped for p in pts] == [False, False, True, True, False]
    assert pts[2].extra["mode"] == 1


@settings(max_examples=25, deadline=None)
@given(scale=st.lists(st.floats(0.2, 3.0), min_size=4, max_size=4),
       offset=st.floats(3e3, 40e3))
def test_couplings_scale_with_rabi_products(four_ion, scale, offset):
    _, _, spec = four_ion
    base = _raman(spec, offset)
    j0 = compute_couplings(spec, base).j
    scaled = RamanConfig(base.rabi * np.array(scale), base.detuning_mu)
    j1 = compute_couplings(spec, scaled).j
    assert np.allclose(j1, j0 * np.outer(scale, scale), rtol=1e-12, atol=0)
