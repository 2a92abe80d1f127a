import logging
import sys
from pathlib import Path

_ROOT_LOGGER = "bobtaillab"


def setup_logger(
    run_id: str,
    command: str = "experiment",
    *,
    level: str = "INFO",
    log_file: Path | None = None,
) -> logging.Logger:
    """Set up the package logger for one CLI run.

    Console output carries INFO and above with a bare message format; when
    ``log_file`` is given everything down to DEBUG is also appended there with
    timestamps.

    Args:
        run_id: Identifier of this run (the resolved seed is a good choice)
        command: Subcommand being executed
        level: Console log level
        log_file: Optional path of a log file

    Returns:
        Configured package logger
    """
    logger = logging.getLogger(_ROOT_LOGGER)
    logger.setLevel(logging.DEBUG)

    # Clear any existing handlers to avoid duplicates across runs in one process
    logger.handlers.clear()
    logger.propagate = False

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level.upper())
    console_handler.setFormatter(logging.Formatter("%(message)s"))
    logger.addHandler(console_handler)

    if log_file is not None:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, mode="a")
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(
            logging.Formatter(
                "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
                datefmt="%Y-%m-%d %H:%M:%S",
            )
        )
        logger.addHandler(file_handler)
        logger.debug(f"Log file: {log_file}")

    logger.debug(f"Logger initialized - run: {run_id}, command: {command}")
    return logger
