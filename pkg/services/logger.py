"""
Logger - shared logger for the Davenport lab
Plain stdlib logging with colour-coded level names on a terminal
"""

import logging
import sys

try:
    import colorama
    from colorama import Fore, Style
    colorama.just_fix_windows_console()
    HAS_COLORAMA = True
except ImportError:
    HAS_COLORAMA = False


LOGGER_NAME = "davenport"

_LEVEL_COLOURS = {
    'DEBUG': 'CYAN',
    'INFO': 'GREEN',
    'WARNING': 'YELLOW',
    'ERROR': 'RED',
    'CRITICAL': 'MAGENTA',
}


class ColouredFormatter(logging.Formatter):
    """Formatter that paints the level name when the stream is a TTY"""

    def __init__(self, fmt: str, use_colour: bool):
        super().__init__(fmt)
        self.use_colour = use_colour and HAS_COLORAMA

    def format(self, record: logging.LogRecord) -> str:
        if not self.use_colour:
            return super().format(record)
        original = record.levelname
        colour = getattr(Fore, _LEVEL_COLOURS.get(original, 'WHITE'))
        record.levelname = f"{colour}{original}{Style.RESET_ALL}"
        try:
            return super().format(record)
        finally:
            record.levelname = original


def _build_logger() -> logging.Logger:
    logger = logging.getLogger(LOGGER_NAME)
    if not logger.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(ColouredFormatter(
            "[%(levelname)s] [%(name)s] %(message)s",
            use_colour=sys.stderr.isatty()
        ))
        logger.addHandler(handler)
        logger.setLevel(logging.WARNING)
        logger.propagate = False
    return logger


Logger = _build_logger()


def set_log_level(level: str) -> None:
    """Set the level from a name such as 'info' or 'DEBUG'"""
    numeric = logging.getLevelName(str(level).upper())
    if not isinstance(numeric, int):
        Logger.warning(f"Unknown log level '{level}', keeping {logging.getLevelName(Logger.level)}")
        return
    Logger.setLevel(numeric)
