"""Exception types shared across the package."""


class QmmError(Exception):
    """Base class for all qmmsim errors."""


class ValidationError(QmmError):
    """A parameter or state object violates its invariants."""


class StabilityError(ValidationError):
    """Time step violates the CFL stability bound."""


class ShapeError(QmmError):
    """Arrays passed to an operation do not conform."""


class DivergenceError(QmmError):
    """Non-finite values appeared during time stepping."""

    def __init__(self, message, step_index=None, time=None):
        super().__init__(message)
        self.step_index = step_index
        self.time = time


class IntegrationError(QmmError):
    """The Bloch integrator lost more norm in one step than tolerated."""


class StateError(QmmError):
    """Insufficient history or otherwise unusable dynamical state."""


class ConvergenceError(QmmError):
    """A steady state was not reached within the allowed time."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ConfigError(QmmError):
    """Bad run configuration (unknown key, type mismatch, bad range)."""

    def __init__(self, message, line=None, key=None):
        super().__init__(message)
        self.line = line
        self.key = key


class PoleError(QmmError):
    """Evaluation exactly on a pole of a response function."""


class IncompleteExitError(QmmError):
    """Injected field energy did not leave the domain in the exit window."""


class InternalError(QmmError):
    """Contract broken between modules; a bug, not a user error."""
