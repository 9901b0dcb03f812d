import numpy as np
import pytest

from trapped_ising.crystal import TrapConfig, solve_equilibrium
from trapped_ising.modes import transverse_modes

TWO_PI = 2 * np.pi
RHOMBUS_MHZ = (0.626, 0.404, 1.503)
HEXAGON_MHZ = (0.486, 0.407, 1.482)

# lines collected by the acceptance module, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


def _crystal(n, mhz):
    cfg = TrapConfig.from_mhz(n, *mhz)
    geom = solve_equilibrium(cfg)
    return cfg, geom, transverse_modes(cfg, geom)


@pytest.fixture(scope="session")
def four_ion():
    return _crystal(4, RHOMBUS_MHZ)


@pytest.fixture(scope="session")
def seven_ion():
    return _crystal(7, HEXAGON_MHZ)


@pytest.fixture(scope="session")
def ten_ion():
    return _crystal(10, RHOMBUS_MHZ)
