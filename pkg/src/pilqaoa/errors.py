"""Exception types raised across the package."""


class ConfigurationError(ValueError):
    """Invalid generator, schedule or experiment settings."""


class GenerationError(RuntimeError):
    """A randomized generator gave up after its retry cap."""


class ParseError(ValueError):
    """Malformed graph or config file."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ResourceError(ValueError):
    """Problem size exceeds the dense enumeration / simulation cap."""


class NumericalError(ArithmeticError):
    """Non-finite objective value encountered during optimization."""

    def __init__(self, message, iterate=None):
        self.iterate = iterate
        if iterate is not None:
            message = f"{message} (iterate={list(iterate)!r})"
        super().__init__(message)


class TrainingError(RuntimeError):
    """A training phase failed; ``partial`` holds the report built so far."""

    def __init__(self, message, partial=None):
        self.partial = partial
        super().__init__(message)
