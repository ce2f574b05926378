"""Logging setup for tunnelgap."""

from __future__ import annotations

import logging
import sys
from pathlib import Path
from typing import Any

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def setup_logging(config: dict[str, Any]) -> None:
    """Configure root logging from the ``logging`` config section.

    The console handler writes to stderr; stdout carries result rows only.
    """
    settings = config.get("logging", {})
    level_name = str(settings.get("level", "WARNING")).upper()
    level = getattr(logging, level_name, logging.WARNING)

    handlers: list[logging.Handler] = []
    formatter = logging.Formatter(LOG_FORMAT)

    if settings.get("console", True):
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(formatter)
        handlers.append(console_handler)

    file_path = str(settings.get("file") or "").strip()
    if file_path:
        path = Path(file_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(path, encoding="utf-8")
        file_handler.setFormatter(formatter)
        handlers.append(file_handler)

    root = logging.getLogger()
    root.handlers.clear()
    root.setLevel(level)
    for handler in handlers:
        root.addHandler(handler)

    if not handlers:
        root.addHandler(logging.NullHandler())


__all__ = ["setup_logging"]
