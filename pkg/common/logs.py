"""Logging setup for command-line entry points."""

import logging
from pathlib import Path
from typing import List, Optional

from common import settings

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'


def configure_logging(level: Optional[str] = None, log_file: Optional[str] = None) -> None:
    """
    Configure root logging for a CLI run.

    Library modules only create module loggers; this is called once by the
    entry point.

    Args:
        level: Level name, defaults to DPP_LOG_LEVEL
        log_file: Optional log file path, defaults to DPP_LOG_FILE
    """
    level = (level or settings.LOG_LEVEL).upper()
    log_file = log_file or settings.LOG_FILE

    handlers: List[logging.Handler] = [logging.StreamHandler()]
    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )
