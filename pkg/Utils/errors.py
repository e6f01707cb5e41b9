"""Exception hierarchy shared by every package."""


class ChemoflowError(Exception):
    """Base class for all errors raised by chemoflow."""


class GridMismatchError(ChemoflowError):
    """Raised when operands live on different grids or have incompatible shapes."""


class PreconditionError(ChemoflowError):
    """Raised when an operation precondition does not hold for its input."""


class ParameterError(ChemoflowError):
    """Raised for invalid scalar parameters (R <= 0, dt <= 0, alpha out of range, ...)."""


class UndefinedRatioError(ChemoflowError):
    """Raised when a verification ratio has a vanishing denominator."""


class DivergenceError(ChemoflowError):
    """Raised when the evolved state stops being finite.

    Attributes:
        step_index (int): index of the step that produced non-finite values
        last_valid_time (float): simulation time of the last finite state
    """

    def __init__(self, step_index, last_valid_time):
        """Store where the run diverged.

        Args:
            step_index (int): index of the failing step
            last_valid_time (float): time of the last finite state
        """
        super().__init__(
            'non-finite state at step {} (last valid time {!r})'.format(
                step_index, last_valid_time))
        self.step_index = step_index
        self.last_valid_time = last_valid_time


class ConfigError(ChemoflowError):
    """Raised when a configuration file fails validation.

    Attributes:
        violations (list): one message per violation, each naming the key or lines
    """

    def __init__(self, violations):
        """Collect all violations instead of stopping at the first one.

        Args:
            violations (list): list of human readable violation strings
        """
        self.violations = list(violations)
        super().__init__('; '.join(self.violations))


class SnapshotFormatError(ChemoflowError):
    """Raised when a snapshot file has a bad header, size, or checksum."""
