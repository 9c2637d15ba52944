"""Logger setup for dynamap."""
from loguru import logger
import sys
import config as cfg


def configure(level: str = None, log_file: str = None):
    """
    Install the stderr and rotating file sinks.

    Args:
        level: Overrides logging.level from config
        log_file: Overrides logging.file; an empty string disables the file sink

    Returns:
        The configured loguru logger
    """
    settings = cfg.config.logging
    level = (level or settings['level']).upper()
    log_file = settings['file'] if log_file is None else log_file

    logger.remove()  # Remove default handler

    # Console handler; reports go to stdout, so logs stay on stderr
    logger.add(
        sys.stderr,
        format=settings['format'],
        level=level,
        colorize=True
    )

    # File handler; enqueue keeps threaded sweeps from interleaving lines
    if log_file:
        logger.add(
            log_file,
            format=settings['format'],
            level=level,
            rotation=settings['rotation'],
            retention=settings['retention'],
            compression="zip",
            enqueue=True
        )
    return logger


configure()
