# === FILE: cagsr/logging_config.py ===
import sys
from typing import Optional

from loguru import logger


def configure_logging(level: str = "INFO", log_file: Optional[str] = None) -> None:
    """One stderr sink at `level`; with `log_file`, also a JSON-lines sink at DEBUG."""
    logger.remove()
    logger.add(sys.stderr, level=level.upper(), backtrace=True, diagnose=False, enqueue=True)
    if log_file:
        logger.add(log_file, level="DEBUG", serialize=True, enqueue=True, mode="a", encoding="utf-8")
