"""Exception hierarchy shared by every szbench module."""


class SzBenchError(Exception):
    """Base class for all errors raised by szbench."""

    pass


class DimensionError(SzBenchError, ValueError):
    """Raised when tensor shapes do not line up.

    The message always names the offending axis.
    """

    def __init__(self, message: str, axis: str | None = None) -> None:
        """Initialize the DimensionError.

        Args:
            message: Error message.
            axis: Name of the axis whose size is wrong.
        """
        super().__init__(message if axis is None else f"{message} (axis: {axis})")
        self.axis = axis


class ParameterError(SzBenchError, ValueError):
    """Raised when an operation receives an out-of-range parameter."""

    pass


class ContractError(SzBenchError, ValueError):
    """Raised when a caller violates an operation's precondition."""

    pass


class DataError(SzBenchError, ValueError):
    """Raised when input data is malformed or unusable."""

    pass


class DivergenceError(SzBenchError, RuntimeError):
    """Raised when training produces a non-finite loss."""

    def __init__(self, message: str, epoch: int, batch: int) -> None:
        """Initialize the DivergenceError.

        Args:
            message: Error message.
            epoch: Epoch in which the loss diverged.
            batch: Mini-batch index within the epoch.
        """
        super().__init__(f"{message} (epoch {epoch}, batch {batch})")
        self.epoch = epoch
        self.batch = batch
