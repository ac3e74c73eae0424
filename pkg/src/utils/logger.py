import logging
import sys
from contextlib import contextmanager
from contextvars import ContextVar
from typing import Dict, Iterator, Union

from src.config import settings

# ANSI color codes
COLORS = {
    "DEBUG": "\033[36m",  # Cyan
    "INFO": "\033[32m",  # Green
    "WARNING": "\033[33m",  # Yellow
    "ERROR": "\033[31m",  # Red
    "CRITICAL": "\033[35m",  # Magenta
}
DIM = "\033[2m"
RESET = "\033[0m"

LOG_FORMAT = "[%(levelname)s] %(asctime)s %(name)s [%(context)s] - %(message)s"
DATEFMT = "%Y-%m-%d %H:%M:%S"

# run id, generation, side ... of the work currently being logged
_context: ContextVar[Dict[str, str]] = ContextVar("log_context", default={})


@contextmanager
def log_context(**fields: Union[str, int]) -> Iterator[None]:
    """Tag every record logged inside the block, e.g. ``log_context(run="demo", generation=3)``.

    Nested blocks add to the outer fields and restore them on exit.
    """
    token = _context.set({**_context.get(), **{k: str(v) for k, v in fields.items()}})
    try:
        yield
    finally:
        _context.reset(token)


class ContextFilter(logging.Filter):
    def filter(self, record: logging.LogRecord) -> bool:
        fields = _context.get()
        setattr(record, "context", " ".join(f"{k}={v}" for k, v in fields.items()) if fields else "-")
        return True


class ColoredFormatter(logging.Formatter):
    def format(self, record: logging.LogRecord) -> str:
        # copy so other handlers see the plain level name
        record = logging.makeLogRecord(record.__dict__)
        if record.levelname in COLORS:
            record.levelname = f"{COLORS[record.levelname]}{record.levelname}{RESET}"
        setattr(record, "context", f"{DIM}{getattr(record, 'context', '-')}{RESET}")
        return super().format(record)


def _level_from_string(level_str: str) -> int:
    """
    Convert a logging level name (e.g. "INFO") to the numeric level.
    Defaults to logging.INFO for unknown values.
    """
    if not level_str:
        return logging.INFO
    return getattr(logging, level_str.upper(), logging.INFO)


def logger(name: str = "game") -> logging.Logger:
    """
    Factory that returns a configured logger instance with colored output.

    Progress goes to stderr; stdout is reserved for the cli's status lines.
    Records carry the fields of the enclosing ``log_context`` blocks.

    Usage:
        from src.utils.logger import logger
        log = logger(__name__)
    """
    lvl = _level_from_string(settings.logging_level)

    _logger = logging.getLogger(name)

    if not _logger.handlers:
        _logger.setLevel(lvl)

        handler = logging.StreamHandler(sys.stderr)
        handler.setLevel(lvl)
        handler.addFilter(ContextFilter())
        handler.setFormatter(ColoredFormatter(fmt=LOG_FORMAT, datefmt=DATEFMT))

        _logger.addHandler(handler)
        _logger.propagate = False

    return _logger
