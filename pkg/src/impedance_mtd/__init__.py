"""Impedance side-channel simulator with a moving-target defense engine and impedance attacks."""
from . import attacks, fabric, impedance, mtd, target
from .errors import (BitstreamError, CapacityError, ConfigError, DataError, DegeneratePartitionError,
                     DegenerateStateError, ImpedanceMtdError, InvalidGeometryError, OutOfTableError,
                     ParameterError, SingularityError, UsageError)

__version__ = "0.1.0"

__all__ = [
    "attacks", "fabric", "impedance", "mtd", "target",
    "BitstreamError", "CapacityError", "ConfigError", "DataError", "DegeneratePartitionError",
    "DegenerateStateError", "ImpedanceMtdError", "InvalidGeometryError", "OutOfTableError",
    "ParameterError", "SingularityError", "UsageError",
]
