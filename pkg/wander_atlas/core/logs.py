"""Logging setup for the command line."""
import logging
from rich.console import Console
from rich.logging import RichHandler


def setup_logging(level: str = "WARNING") -> logging.Logger:
    """
    Attach a rich handler to the package logger.

    Args:
        level (str): Logging level name.

    Returns:
        logging.Logger: The `wander_atlas` logger.
    """
    logger = logging.getLogger("wander_atlas")
    if not any(isinstance(h, RichHandler) for h in logger.handlers):
        handler = RichHandler(console=Console(stderr=True), show_path=False, markup=False)
        handler.setFormatter(logging.Formatter("%(message)s"))
        logger.addHandler(handler)
    logger.setLevel(level.upper() if isinstance(level, str) else level)
    return logger
