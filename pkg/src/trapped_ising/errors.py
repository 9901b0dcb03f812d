"""Exception hierarchy shared by all modules."""


class SimulationError(Exception):
    """Base class for numerical failures (CLI exit code 3)."""


class CoincidentIonsError(ValueError):
    """Two ions share a position; the Coulomb energy diverges."""


class DegenerateTrapError(ValueError):
    """Planar crystal is not rotationally pinned (omega_x ~ omega_y)."""


class ConvergenceError(SimulationError):
    def __init__(self, message, best_residual=None):
        super().__init__(message)
        self.best_residual = best_residual


class SaddlePointError(SimulationError):
    pass


class NotAtEquilibriumError(SimulationError):
    pass


class InstabilityError(SimulationError):
    pass


class ResonanceError(SimulationError):
    def __init__(self, message, mode_index=None):
        super().__init__(message)
        self.mode_index = mode_index


class IntegrationError(SimulationError):
    pass


class StepSizeError(IntegrationError):
    pass


class CutoffError(SimulationError):
    pass


class ConfigError(ValueError):
    """Invalid experiment configuration (CLI exit code 2)."""
