"""
Logging configuration for py-phase-ident using loguru
"""

import sys
from pathlib import Path

from loguru import logger

from .settings import Settings

LOG_FORMAT = (
    "{time:YYYY-MM-DD HH:mm:ss.SSS} | {level: <8} | {name}:{function}:{line} - {message}"
)

# Remove default logger
logger.remove()

# Console logging until the CLI applies the configured settings
_console_id = logger.add(sys.stderr, format=LOG_FORMAT, level="INFO", colorize=True)
_file_ids: list[int] = []


def configure_logging(settings: Settings) -> None:
    """
    Apply the level and optional file sinks from the settings.

    Args:
        settings: Environment settings; file sinks are added when
            ``log_to_file`` is set.
    """
    global _console_id

    logger.remove(_console_id)
    _console_id = logger.add(
        sys.stderr, format=LOG_FORMAT, level=settings.log_level, colorize=True
    )

    for sink_id in _file_ids:
        logger.remove(sink_id)
    _file_ids.clear()

    if not settings.log_to_file:
        return

    log_dir = Path(settings.log_dir)
    log_dir.mkdir(parents=True, exist_ok=True)

    # General log
    _file_ids.append(
        logger.add(
            log_dir / "py_phase_ident.log",
            format=LOG_FORMAT,
            level="DEBUG",
            rotation="10 MB",
            retention="30 days",
            compression="gz",
            enqueue=True,
        )
    )

    # Error log
    _file_ids.append(
        logger.add(
            log_dir / "py_phase_ident_errors.log",
            format=LOG_FORMAT,
            level="ERROR",
            rotation="10 MB",
            retention="30 days",
            compression="gz",
            enqueue=True,
        )
    )

    # Pipeline milestones
    _file_ids.append(
        logger.add(
            log_dir / "py_phase_ident_runs.log",
            format=LOG_FORMAT,
            level="INFO",
            rotation="10 MB",
            retention="30 days",
            compression="gz",
            enqueue=True,
            filter=lambda record: "run_event" in record["extra"],
        )
    )


def get_logger(name: str = None):
    """
    Get a logger instance for the specified module.

    Args:
        name: Module name for the logger

    Returns:
        Logger instance
    """
    if name:
        return logger.bind(name=name)
    return logger


def log_run_event(message: str, level: str = "INFO"):
    """
    Log a pipeline milestone to the run log file.

    Args:
        message: Message to log
        level: Log level (INFO, WARNING, ERROR, etc.)
    """
    logger.bind(run_event=True).log(level, message)
