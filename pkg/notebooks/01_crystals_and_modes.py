# %% [markdown]
# # Planar ion crystals and their transverse modes
#
# Ions in an anisotropic harmonic trap with a stiff z axis settle into a
# flat crystal in the xy plane. This script solves for the 4-, 7- and 10-ion
# crystals used throughout the package and looks at the out-of-plane
# (transverse) phonon spectrum that later mediates the spin couplings.

# %%
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from trapped_ising.crystal import TrapConfig, solve_equilibrium
from trapped_ising.modes import branch_counts, full_modes, transverse_modes

OUT = Path("notebook_output")
OUT.mkdir(exist_ok=True)

# %% [markdown]
# Trap frequencies are in MHz. The 7-ion trap is softer along x, which turns
# what would be a ladder into a centred hexagon.

# %%
traps = {
    4: (0.626, 0.404, 1.503),
    7: (0.486, 0.407, 1.482),
    10: (0.626, 0.404, 1.503),
}
crystals = {}
for n, mhz in traps.items():
    cfg = TrapConfig.from_mhz(n, *mhz)
    geom = solve_equilibrium(cfg)
    crystals[n] = (cfg, geom)
    print(f"N={n:2d}  max |z| = {geom.planarity_deviation:.1e} m  "
          f"residual force = {geom.max_residual_force:.1e} N")

# %% [markdown]
# Ion labels follow a fixed rule: interior ions first, then the outer ring
# counter-clockwise from -45 degrees. For 7 ions the centre is ion 1.

# %%
fig, axes = plt.subplots(1, 3, figsize=(11, 3.5))
for ax, (n, (cfg, geom)) in zip(axes, crystals.items()):
    p = geom.positions * 1e6
    ax.scatter(p[:, 0], p[:, 1], s=120)
    for k, (x, y) in enumerate(p[:, :2]):
        ax.annotate(str(k + 1), (x, y), ha="center", va="center", color="white", fontsize=8)
    ax.set_aspect("equal")
    ax.set_title(f"{n} ions")
    ax.set_xlabel("x (um)")
axes[0].set_ylabel("y (um)")
fig.tight_layout()
fig.savefig(OUT / "crystals.png", dpi=120)

# %% [markdown]
# The hexagon is visibly stretched along y. With w_x / w_y = 1.19 the ring
# radii differ by about a quarter; the ring only becomes regular as the two
# in-plane frequencies approach each other.

# %%
for fx in (0.41, 0.42, 0.45, 0.486):
    geom = solve_equilibrium(TrapConfig.from_mhz(7, fx, 0.407, 1.482))
    ring = geom.positions[1:, :2]
    r = np.linalg.norm(ring - ring.mean(axis=0), axis=1)
    print(f"w_x = {fx:.3f} MHz  ring radial spread {np.ptp(r) / r.mean():6.1%}")

# %% [markdown]
# ## Transverse modes
#
# The highest transverse mode is the centre-of-mass mode at exactly w_z with
# a uniform eigenvector; the rest spread below it.

# %%
fig, ax = plt.subplots(figsize=(6, 3))
for row, (n, (cfg, geom)) in enumerate(crystals.items()):
    spec = transverse_modes(cfg, geom)
    f = spec.frequencies_hz() / 1e6
    ax.vlines(f, row - 0.3, row + 0.3)
    print(f"N={n:2d}  COM {f[0]:.6f} MHz, lowest {f[-1]:.4f} MHz, "
          f"COM vector {np.round(spec.mode_matrix[:, 0], 4)}")
ax.set_yticks(range(3), [f"{n} ions" for n in crystals])
ax.set_xlabel("transverse mode frequency (MHz)")
fig.tight_layout()
fig.savefig(OUT / "transverse_modes.png", dpi=120)

# %% [markdown]
# The full 3N-dimensional problem splits cleanly into N transverse and 2N
# in-plane modes for a planar crystal.

# %%
cfg, geom = crystals[7]
print(branch_counts(full_modes(cfg, geom)))
