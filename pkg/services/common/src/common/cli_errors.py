"""CLI error handling utilities.

Provides a decorator and mapping functions to convert exceptions into
process exit codes, so each subcommand does not repeat its own try/except.
"""

from __future__ import annotations

import functools
import logging
from collections.abc import Callable
from typing import ParamSpec

from .exceptions import (
    ConfigError,
    DataError,
    ModelError,
    PhysicsError,
    RenderError,
    ThermoArrayError,
)

logger = logging.getLogger(__name__)

P = ParamSpec("P")

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_IO = 4
EXIT_MODEL = 5
EXIT_PHYSICS = 6
EXIT_RENDER = 7

# Exception to exit-code mapping (order matters - base classes last)
EXIT_CODE_MAP: list[tuple[type[BaseException], int, str]] = [
    (ConfigError, EXIT_CONFIG, "Invalid configuration"),
    (DataError, EXIT_DATA, "Data error"),
    (ModelError, EXIT_MODEL, "Model error"),
    (PhysicsError, EXIT_PHYSICS, "Physics error"),
    (RenderError, EXIT_RENDER, "Render error"),
    (OSError, EXIT_IO, "I/O error"),
    (ThermoArrayError, EXIT_INTERNAL, "Internal error"),
]

# Codes that indicate a problem with user input rather than a bug
USER_ERROR_CODES = frozenset({EXIT_CONFIG, EXIT_DATA, EXIT_IO, EXIT_PHYSICS, EXIT_RENDER})


def map_exception_to_exit_code(exc: BaseException) -> tuple[int, str]:
    """Map an exception to its exit code and log prefix.

    Args:
        exc: The exception to map.

    Returns:
        Tuple of (exit_code, log_prefix).

    """
    for exc_type, code, prefix in EXIT_CODE_MAP:
        if isinstance(exc, exc_type):
            return code, prefix
    return EXIT_INTERNAL, "Internal error"


def cli_error_handler(func: Callable[P, int]) -> Callable[P, int]:
    """Turn exceptions raised by a subcommand into exit codes.

    User errors are logged as warnings; anything else is logged with its
    traceback.

    Example:
        @cli_error_handler
        def cmd_train(args: argparse.Namespace) -> int:
            ...
            return EXIT_OK

    """

    @functools.wraps(func)
    def wrapper(*args: P.args, **kwargs: P.kwargs) -> int:
        try:
            return func(*args, **kwargs)
        except Exception as e:
            code, prefix = map_exception_to_exit_code(e)
            if code in USER_ERROR_CODES:
                logger.warning(f"{prefix}: {e}")
            else:
                logger.exception(f"{prefix}: {e}")
            return code

    return wrapper
