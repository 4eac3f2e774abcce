"""Logging setup for the compvar package.

Reports are written to stdout, so every log record, including numerical
warnings raised through `warnings` by scipy's integrators, goes to stderr.
"""

import logging
import sys

from ..config.settings import settings

PACKAGE_LOGGER = "compvar"


def setup_logging(level: str | None = None, format_string: str | None = None) -> None:
    """Configure the stderr handler and the package log level."""
    log_level = level or settings.LOG_LEVEL
    numeric_level = getattr(logging, log_level.upper(), logging.INFO)

    logging.basicConfig(
        level=numeric_level,
        format=format_string or settings.LOG_FORMAT,
        handlers=[logging.StreamHandler(sys.stderr)],
        force=True,
    )
    logging.getLogger(PACKAGE_LOGGER).setLevel(numeric_level)

    # scipy.integrate.quad reports slow convergence as an IntegrationWarning
    logging.captureWarnings(True)
    logging.getLogger("py.warnings").setLevel(max(numeric_level, logging.WARNING))


def get_logger(name: str) -> logging.Logger:
    """Logger below the package logger, e.g. `compvar.fp`."""
    return logging.getLogger(f"{PACKAGE_LOGGER}.{name}")
