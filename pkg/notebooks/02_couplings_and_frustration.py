# %% [markdown]
# # Spin-spin couplings and frustrated ground states
#
# A bichromatic Raman drive detuned by mu from the transverse modes produces
# an effective sigma_y sigma_y interaction J_ij whose sign pattern depends on
# which modes mu sits between. Here we map the couplings of the 4- and 7-ion
# crystals and enumerate the classical ground configurations.

# %%
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from trapped_ising.analysis import classical_ground_manifold, quasi_degenerate_manifold
from trapped_ising.coupling import RamanConfig, compute_couplings, scan_detuning
from trapped_ising.crystal import TrapConfig, solve_equilibrium
from trapped_ising.modes import transverse_modes

TWO_PI = 2 * np.pi
OUT = Path("notebook_output")
OUT.mkdir(exist_ok=True)


def crystal(n, mhz):
    cfg = TrapConfig.from_mhz(n, *mhz)
    geom = solve_equilibrium(cfg)
    return cfg, geom, transverse_modes(cfg, geom)


# %% [markdown]
# ## Four ions
#
# Just above the COM mode every pair couples with nearly the same strength
# and sign: J > 0 here, so the all-to-all model is antiferromagnetic and its
# top state is ferromagnetic.

# %%
cfg4, geom4, spec4 = crystal(4, (0.626, 0.404, 1.503))
raman = RamanConfig.uniform(4, TWO_PI * 50e3, spec4.frequencies[0] + TWO_PI * 10e3)
jm = compute_couplings(spec4, raman, cfg4.mass)
print(np.round(jm.j / TWO_PI, 1))

# %% [markdown]
# Red of the third mode the couplings change character: the sides of the
# rhombus become antiferromagnetic.

# %%
jm2 = compute_couplings(spec4, raman.with_detuning(spec4.frequencies[2] - TWO_PI * 10e3))
print(np.round(jm2.j / TWO_PI, 1))
print(classical_ground_manifold(jm2).bitstrings())

# %% [markdown]
# ## Seven ions
#
# Scanning mu across the transverse band shows how the size of the classical
# ground manifold changes. Points within 1 kHz of a mode are skipped.

# %%
cfg7, geom7, spec7 = crystal(7, (0.486, 0.407, 1.482))
template = RamanConfig.uniform(7, TWO_PI * 50e3, TWO_PI * 1.3e6)
f = spec7.frequencies
points = scan_detuning(spec7, template, (f[-1] - TWO_PI * 50e3, f[0] + TWO_PI * 20e3),
                       TWO_PI * 1e3, cfg7.mass)
mu = np.array([p.mu for p in points if not p.skipped]) / TWO_PI / 1e6
deg = np.array([p.degeneracy for p in points if not p.skipped])

fig, ax = plt.subplots(figsize=(7, 3))
ax.step(mu, deg, where="mid")
ax.vlines(f / TWO_PI / 1e6, 0, deg.max(), color="0.8", lw=0.8)
ax.set_xlabel("detuning (MHz)")
ax.set_ylabel("ground degeneracy")
fig.tight_layout()
fig.savefig(OUT / "degeneracy_scan.png", dpi=120)

# %% [markdown]
# The three operating points used in the reproduction presets. Ion 1 is the
# centre; bit 1 means spin up along y.

# %%
for mu_mhz in (1.328, 1.231, 1.416):
    jm7 = compute_couplings(spec7, template.with_detuning(TWO_PI * mu_mhz * 1e6), cfg7.mass)
    m = classical_ground_manifold(jm7)
    print(f"{mu_mhz:.3f} MHz: {m.size} configurations {m.bitstrings()}")

# %% [markdown]
# ## Ten ions
#
# At 1.296 MHz the lowest eight configurations are not exactly degenerate,
# but they sit far below the next level, so the quasi-degenerate cluster is
# the natural target manifold.

# %%
cfg10, geom10, spec10 = crystal(10, (0.626, 0.404, 1.503))
jm10 = compute_couplings(spec10, RamanConfig.uniform(10, TWO_PI * 50e3, TWO_PI * 1.296e6))
m10 = quasi_degenerate_manifold(jm10)
print(m10.size, m10.bitstrings())
print("exact-degeneracy manifold size:", classical_ground_manifold(jm10).size)
