"""thermoarray common utilities shared by the rig simulator and the calibrator."""

from .cli_errors import (
    EXIT_CONFIG,
    EXIT_DATA,
    EXIT_INTERNAL,
    EXIT_IO,
    EXIT_MODEL,
    EXIT_OK,
    EXIT_PHYSICS,
    EXIT_RENDER,
    cli_error_handler,
    map_exception_to_exit_code,
)
from .exceptions import (
    ConfigError,
    ConfigValidationError,
    CsvParseError,
    DataError,
    DatasetError,
    DivergenceError,
    IngestError,
    LossError,
    ModelError,
    ModelFormatError,
    PhysicsError,
    RenderError,
    ScalerError,
    SplitError,
    SubsampleError,
    ThermistorDomainError,
    ThermistorFitError,
    ThermistorRangeError,
    ThermoArrayError,
)
from .seeding import derive_rng

__all__ = [
    # Exceptions
    "ThermoArrayError",
    "ConfigError",
    "ConfigValidationError",
    "PhysicsError",
    "ThermistorRangeError",
    "ThermistorDomainError",
    "ThermistorFitError",
    "DataError",
    "DatasetError",
    "CsvParseError",
    "IngestError",
    "SplitError",
    "SubsampleError",
    "ModelError",
    "ScalerError",
    "LossError",
    "DivergenceError",
    "ModelFormatError",
    "RenderError",
    # CLI utilities
    "cli_error_handler",
    "map_exception_to_exit_code",
    "EXIT_OK",
    "EXIT_INTERNAL",
    "EXIT_CONFIG",
    "EXIT_DATA",
    "EXIT_IO",
    "EXIT_MODEL",
    "EXIT_PHYSICS",
    "EXIT_RENDER",
    # Seeding
    "derive_rng",
]
