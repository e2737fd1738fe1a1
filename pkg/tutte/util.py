"""Util module."""

import logging
import os
import sys
import tempfile
from collections.abc import MutableMapping
from fractions import Fraction
from logging.handlers import RotatingFileHandler

logformat = logging.Formatter(
    "[%(asctime)s] :: %(levelname)s :: %(name)s :: %(module)s :: %(funcName)s :: %(lineno)d :: %(message)s"
)

__loggers: MutableMapping[str, logging.Logger] = {}
log_to_stdout = os.environ.get("LOG_TO_STDOUT")


def get_logger(name: str, rotate: RotatingFileHandler | None = None) -> logging.Logger:
    """Get logger."""
    found_logger = __loggers.get(name)
    if found_logger:
        return found_logger

    logger = logging.getLogger(name)

    if not log_to_stdout:
        if not rotate:
            logs_dir = os.environ.get("TUTTE_LOGS") or "logs"
            os.makedirs(logs_dir, exist_ok=True)
            rotate = RotatingFileHandler(
                os.path.join(logs_dir, f"{name}.log"), maxBytes=5000000, backupCount=5
            )
            rotate.setFormatter(logformat)
        logger.addHandler(rotate)
    else:
        logger.addHandler(logging.StreamHandler(sys.stdout))

    __loggers[name] = logger

    return logger


def format_fraction(value: Fraction) -> str:
    """Format rational as p/q."""
    return f"{value.numerator}/{value.denominator}"


def parse_fraction(text: str) -> Fraction:
    """Parse p/q or p."""
    return Fraction(text)


def write_atomic(path: str, text: str) -> None:
    """Write file via temp file and rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
