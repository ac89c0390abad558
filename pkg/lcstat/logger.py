"""
The lcstat logger.

Sweeps, spline builds and minimizations report progress through get_logger(). Output
is silent unless LCSTAT_LOGGING_LEVEL names a level (DEBUG, INFO, ...) or gives a
number; when a level is set, records go to stderr in LOG_FORMAT so a long phase
diagram run can be followed from the terminal.
"""
import logging
import os
import sys
from threading import Lock

LOGGER_NAME = os.environ.get("LCSTAT_LOGGER_NAME", "lcstat-logger")
LOGGING_LEVEL = os.environ.get("LCSTAT_LOGGING_LEVEL")
LOG_FORMAT = os.environ.get(
    "LCSTAT_LOG_FORMAT", "%(asctime)s %(name)s %(levelname)s: %(message)s"
)
LOGGING_OFF = logging.CRITICAL + 1

logger = None
logger_lock = Lock()


def _resolve_level(value):
    """
    Maps the LCSTAT_LOGGING_LEVEL text onto a numeric level, None if unrecognized.
    """
    value = value.strip()
    if value.isdigit():
        return int(value)
    level = logging.getLevelName(value.upper())
    return level if isinstance(level, int) else None


def _build_logger():
    new_logger = logging.getLogger(LOGGER_NAME)
    if not LOGGING_LEVEL:
        new_logger.setLevel(LOGGING_OFF)
        return new_logger

    level = _resolve_level(LOGGING_LEVEL)
    if level is None:
        new_logger.critical(
            f"Unknown LCSTAT_LOGGING_LEVEL {LOGGING_LEVEL!r}; lcstat logs are off."
        )
        new_logger.setLevel(LOGGING_OFF)
        return new_logger

    new_logger.setLevel(level)
    if not new_logger.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        new_logger.addHandler(handler)
    return new_logger


def get_logger():
    global logger
    if logger is None:
        with logger_lock:
            if logger is None:
                logger = _build_logger()
    return logger
