"""Logging setup for posilab package.

Reports are written to stdout, so every log record goes to stderr.
"""

import logging
import sys

from posilab.util.config import Config

DIAGNOSTIC_FORMAT = "%(asctime)s %(levelname)s %(module)s %(message)s"
PROBLEM_FORMAT = "%(levelname)s %(module)s %(message)s"


class MaxLevelFilter(logging.Filter):
    """Filter class that ignores entries at and above a specified maximum logging level."""

    def __init__(self, min_ignore_level: int):
        """Constructor.

        Args:
            min_ignore_level: Min level of records to filter.
        """
        super().__init__()
        self.min_ignore_level = min_ignore_level

    def filter(self, record: logging.LogRecord) -> bool:
        """Filter out message with level at or above `self.min_ignore_level`.

        Args:
            record (logging.LogRecord): The record to filter.

        Returns:
            bool: True if the record should be logged.
        """
        return record.levelno < self.min_ignore_level


def setup_logger(verbose: bool = False):
    """Set up the logging structure of the entire package.

    Warnings and errors are always shown. Diagnostic records (info, and debug in
    development mode) are only shown when `verbose` is set or in development mode.

    Args:
        verbose: Show info records outside of development mode.
    """
    min_level_problems = logging.WARNING
    min_level_diagnostics = logging.INFO
    if Config.conf["development_mode"]:
        min_level_diagnostics = logging.DEBUG
    elif not verbose:
        min_level_diagnostics = min_level_problems

    diagnostic_handler = logging.StreamHandler(stream=sys.stderr)
    diagnostic_handler.setLevel(min_level_diagnostics)
    diagnostic_handler.addFilter(MaxLevelFilter(min_level_problems))
    diagnostic_handler.setFormatter(logging.Formatter(DIAGNOSTIC_FORMAT))

    problem_handler = logging.StreamHandler(stream=sys.stderr)
    problem_handler.setLevel(min_level_problems)
    problem_handler.setFormatter(logging.Formatter(PROBLEM_FORMAT))

    logging.basicConfig(
        handlers=[diagnostic_handler, problem_handler],
        level=min(min_level_diagnostics, min_level_problems),
        force=True,
    )
