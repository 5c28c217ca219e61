"""Exception types raised across the package."""


class InvalidArgumentError(ValueError):
    """An input violates a documented precondition."""


class UnitMismatchError(TypeError):
    """Arithmetic between quantities carrying different units."""


class DataInconsistencyError(ValueError):
    """Measured data implies a value outside the physical range of the model."""


class ChiParseError(ValueError):
    """A susceptibility file could not be parsed.

    ``lineno`` is 1-based and refers to the physical line in the file.
    """

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
