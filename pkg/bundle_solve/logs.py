"""Log setup for the command-line surface.

Library modules only call ``logging.getLogger(__name__)``; handlers are attached here,
once, by the CLI.
"""

import logging
import os

from rich.console import Console
from rich.logging import RichHandler

ENV_VAR = "BUNDLE_SOLVE_LOG"

LEVELS = {
    "error": logging.ERROR,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


def resolve_level(value: str | None) -> tuple[int, bool]:
    """Map a BUNDLE_SOLVE_LOG value to a logging level.

    Args:
        value: Raw value (case-insensitive), or None when unset

    Returns:
        Tuple of (level, recognized); unknown values map to ERROR with recognized=False
    """
    if value is None or not value.strip():
        return logging.ERROR, True
    level = LEVELS.get(value.strip().lower())
    if level is None:
        return logging.ERROR, False
    return level, True


def configure_logging(level: str | None = None) -> logging.Logger:
    """Attach a Rich stderr handler to the package logger.

    Args:
        level: Explicit level name. If None, read from the BUNDLE_SOLVE_LOG env var.

    Returns:
        The configured ``bundle_solve`` logger
    """
    raw = level if level is not None else os.environ.get(ENV_VAR)
    resolved, recognized = resolve_level(raw)

    logger = logging.getLogger("bundle_solve")
    logger.setLevel(resolved)
    # Replace our own handler on repeated calls (tests invoke the app many times)
    for handler in list(logger.handlers):
        if getattr(handler, "_bundle_solve", False):
            logger.removeHandler(handler)

    handler = RichHandler(
        console=Console(stderr=True),
        show_path=False,
        rich_tracebacks=False,
    )
    handler._bundle_solve = True
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    logger.addHandler(handler)
    logger.propagate = False

    if not recognized:
        # ERROR so it is visible under the fallback level
        logger.error("Unknown %s value %r, using 'error'", ENV_VAR, raw)
    return logger
