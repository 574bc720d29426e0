"""Exception hierarchy shared by all platonav subsystems."""


class PlatoNavError(RuntimeError):
    """Base class for every error raised by platonav"""


class ContractViolation(PlatoNavError, ValueError):
    """A caller broke a documented precondition (shapes, ranges, ...)"""


class NumericalError(PlatoNavError):
    """A factorization or other numerical step failed"""

    def __init__(self, message, condition_number=None):
        if condition_number is not None:
            message = f"{message} (condition number {condition_number:.3e})"
        super().__init__(message)
        self.condition_number = condition_number


class SimulationDiverged(NumericalError):
    """Integration produced a non-finite state"""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class OptimizationFailed(NumericalError):
    """Trajectory optimization could not make Q_uu positive definite"""


class TrainingDiverged(NumericalError):
    """Policy training produced a non-finite loss"""


class GenerationError(PlatoNavError):
    """A world generator or respawn could not satisfy its constraints"""


class ConfigError(PlatoNavError, ValueError):
    """Invalid experiment configuration

    Args:
        message: What is wrong
        field: Dotted name of the offending field, if known
        line: 1-based line in the config file, if known
    """

    def __init__(self, message, field=None, line=None):
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(f"field '{field}'")
        if location:
            message = f"{', '.join(location)}: {message}"
        super().__init__(message)
        self.field = field
        self.line = line
