"""
Logging setup for the command-line pipeline.
"""
import logging
import sys

from src.constants import LOG_DATE_FORMAT, LOG_FORMAT


class PipelineFormatter(logging.Formatter):
    """Formatter that keeps every log record on a single line."""

    def format(self, record):
        msg = super().format(record)
        # Tracebacks stay multi-line, messages do not
        head, sep, tail = msg.partition("\nTraceback")
        return head.replace("\n", " ") + (sep + tail if sep else "")


def setup_logging(log_level: str = 'INFO', enable_debug: bool = False) -> None:
    """Configure root logging on stderr.

    Nothing is written to disk so reruns leave output directories
    byte-identical.
    """
    formatter = PipelineFormatter(LOG_FORMAT, datefmt=LOG_DATE_FORMAT)

    root_logger = logging.getLogger()
    root_logger.setLevel(getattr(logging, log_level.upper(), logging.INFO))

    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    root_logger.addHandler(console_handler)

    loggers_config = {
        'src.services.training_service': 'DEBUG' if enable_debug else log_level,
        'src.services.feature_service': 'DEBUG' if enable_debug else log_level,
        'src.services.synth_service': 'DEBUG' if enable_debug else log_level,
        'numexpr': 'WARNING',
    }

    for logger_name, level in loggers_config.items():
        logging.getLogger(logger_name).setLevel(getattr(logging, level.upper(), logging.INFO))

    logging.debug(f"Logging configured - Level: {log_level}, Debug: {enable_debug}")
