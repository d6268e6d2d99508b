"""
Logging configuration for command-line runs
"""
import logging
import sys
from typing import Optional

import colorlog

LOG_FORMAT = "%(log_color)s%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def configure_logging(level: Optional[str] = None) -> None:
    """Install a colored stderr handler on the root logger (idempotent)"""
    from .config import get_settings

    level = (level or get_settings().log_level).upper()
    root = logging.getLogger()

    for handler in root.handlers:
        if getattr(handler, "_sensornet", False):
            root.setLevel(level)
            return

    handler = colorlog.StreamHandler(sys.stderr)
    handler.setFormatter(colorlog.ColoredFormatter(
        LOG_FORMAT,
        log_colors={
            "DEBUG": "cyan",
            "INFO": "green",
            "WARNING": "yellow",
            "ERROR": "red",
            "CRITICAL": "bold_red",
        },
    ))
    handler._sensornet = True
    root.addHandler(handler)
    root.setLevel(level)
