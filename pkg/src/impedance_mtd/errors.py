"""Exception hierarchy shared by every subpackage."""


class ImpedanceMtdError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(ImpedanceMtdError, ValueError):
    pass


class InvalidGeometryError(ParameterError):
    pass


class CapacityError(ImpedanceMtdError):
    """Raised when a region cannot hold the requested number of bits."""


class SingularityError(ImpedanceMtdError, ZeroDivisionError):
    pass


class DegenerateStateError(ImpedanceMtdError):
    pass


class DegeneratePartitionError(ImpedanceMtdError):
    """One side of a two-class split is empty."""


class OutOfTableError(ImpedanceMtdError, KeyError):
    pass


class BitstreamError(ImpedanceMtdError):
    """Malformed partial bitstream. ``field`` names the first violated field."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class ConfigError(ImpedanceMtdError):
    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path


class DataError(ImpedanceMtdError):
    """Archive on disk is inconsistent (checksum, dimensions, version)."""


class UsageError(ImpedanceMtdError):
    pass
