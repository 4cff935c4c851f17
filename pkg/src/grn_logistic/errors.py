"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class UnsupportedConfigurationError(ValueError):
    """The requested delay/formulation combination is not covered by the analysis."""


class SimulationError(RuntimeError):
    """Integration produced a non-finite state.

    Attributes
    ----------
    time : float
        Simulation time (min) at which the failure was detected.
    """

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class ParameterRangeWarning(UserWarning):
    """A parameter lies outside its experimentally reported range."""


class UnitMismatchError(ValueError):
    """Sigmoid parameters with incompatible units were combined into a model."""
