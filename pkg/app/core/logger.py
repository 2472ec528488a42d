import logging
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path

from app.core.config import settings

_configured = False


def setup_logger():
    """
    Configure application logging.

    Console output goes to stderr because stdout carries the JSON reports.
    A rotating file log is added only when LOG_DIR is set.
    """
    global _configured

    root_logger = logging.getLogger()
    if _configured:
        return root_logger

    root_logger.setLevel(settings.LOG_LEVEL)

    log_format = logging.Formatter(
        "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    )

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(log_format)
    console_handler.setLevel(settings.LOG_LEVEL)
    root_logger.addHandler(console_handler)

    if settings.LOG_DIR:
        logs_dir = Path(settings.LOG_DIR)
        logs_dir.mkdir(parents=True, exist_ok=True)
        file_handler = RotatingFileHandler(
            logs_dir / "dhym.log",
            maxBytes=10485760,  # 10MB
            backupCount=10,
        )
        file_handler.setFormatter(log_format)
        file_handler.setLevel(settings.LOG_LEVEL)
        root_logger.addHandler(file_handler)

    # Quieter third-party loggers
    logging.getLogger("httpx").setLevel(logging.WARNING)
    logging.getLogger("uvicorn").setLevel(logging.WARNING)

    _configured = True
    return root_logger
