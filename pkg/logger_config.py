"""
Structured logger configuration shared by the library and the command line.
"""
import logging
import os
import sys

import structlog
from dotenv import load_dotenv

load_dotenv()

LOG_LEVEL = os.getenv("SUSY_LOG_LEVEL", "INFO").upper()
LOG_FORMAT = os.getenv("SUSY_LOG_FORMAT", "console").lower()


def configure_logging(level: str = LOG_LEVEL, fmt: str = LOG_FORMAT) -> None:
    """Configure structlog to write event-style records to stderr"""
    renderer = (
        structlog.processors.JSONRenderer(sort_keys=True)
        if fmt == "json"
        else structlog.dev.ConsoleRenderer(colors=False)
    )
    structlog.configure(
        processors=[
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            renderer,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(
            getattr(logging, level, logging.INFO)
        ),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )


configure_logging()

# Create a structured logger instance
logger = structlog.get_logger("susy-partners")
