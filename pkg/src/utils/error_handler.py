"""Centralized error handling utilities for the pipeline."""

import logging
from enum import Enum
from typing import Any, Dict, Optional

from src.constants import EXIT_DATA, EXIT_NUMERICAL, EXIT_USAGE

logger = logging.getLogger(__name__)


class ErrorType(Enum):
    """Types of errors that can occur in the pipeline."""
    USAGE = "usage"
    VALIDATION = "validation"
    DATA = "data"
    CONFIGURATION = "configuration"
    NUMERICAL = "numerical"
    SYSTEM = "system"


class ErrorSeverity(Enum):
    """Error severity levels."""
    LOW = "low"        # Run continues, the anomaly is counted
    MEDIUM = "medium"  # Subcommand aborted on bad input
    HIGH = "high"      # Numerical failure, results would be meaningless
    CRITICAL = "critical"  # Unexpected failure


EXIT_STATUS = {
    ErrorType.USAGE: EXIT_USAGE,
    ErrorType.VALIDATION: EXIT_DATA,
    ErrorType.DATA: EXIT_DATA,
    ErrorType.CONFIGURATION: EXIT_DATA,
    ErrorType.NUMERICAL: EXIT_NUMERICAL,
    ErrorType.SYSTEM: EXIT_DATA,
}

DEFAULT_SEVERITY = {
    ErrorType.USAGE: ErrorSeverity.MEDIUM,
    ErrorType.VALIDATION: ErrorSeverity.MEDIUM,
    ErrorType.DATA: ErrorSeverity.MEDIUM,
    ErrorType.CONFIGURATION: ErrorSeverity.MEDIUM,
    ErrorType.NUMERICAL: ErrorSeverity.HIGH,
    ErrorType.SYSTEM: ErrorSeverity.CRITICAL,
}


class PipelineError(Exception):
    """Custom exception class for pipeline errors."""

    def __init__(
        self,
        message: str,
        error_type: ErrorType,
        severity: Optional[ErrorSeverity] = None,
        context: Optional[Dict[str, Any]] = None
    ):
        super().__init__(message)
        self.error_type = error_type
        self.severity = severity or DEFAULT_SEVERITY[error_type]
        self.context = context or {}

    @property
    def reason(self) -> str:
        """Single-line reason for the machine-parsable error stream."""
        return " ".join(str(self).split())

    @property
    def exit_status(self) -> int:
        return EXIT_STATUS[self.error_type]

    def format_line(self) -> str:
        return f"error[{self.error_type.value}]: {self.reason}"


class ErrorHandler:
    """Centralized error handler for the command-line surface."""

    def __init__(self):
        self.error_stats: Dict[str, int] = {}

    def handle_error(
        self,
        error: Exception,
        additional_context: Optional[Dict[str, Any]] = None
    ) -> PipelineError:
        """Log an error, update statistics and return it as a PipelineError."""
        if not isinstance(error, PipelineError):
            pipeline_error = self._convert_to_pipeline_error(error)
        else:
            pipeline_error = error

        self._log_error(pipeline_error, additional_context)
        self._update_error_stats(pipeline_error)
        return pipeline_error

    def _convert_to_pipeline_error(self, error: Exception) -> PipelineError:
        """Convert generic exception to PipelineError."""
        error_type_name = type(error).__name__
        if isinstance(error, (FileNotFoundError, PermissionError, IsADirectoryError)):
            error_type = ErrorType.DATA
        elif isinstance(error, (ValueError, KeyError)):
            error_type = ErrorType.VALIDATION
        elif isinstance(error, (ArithmeticError, FloatingPointError)):
            error_type = ErrorType.NUMERICAL
        else:
            error_type = ErrorType.SYSTEM

        return PipelineError(
            message=f"{error_type_name}: {error}",
            error_type=error_type,
            context={"original_error_type": error_type_name}
        )

    def _log_error(
        self,
        error: PipelineError,
        additional_context: Optional[Dict[str, Any]]
    ) -> None:
        """Log error with appropriate level based on severity."""
        log_context = {
            "error_type": error.error_type.value,
            "severity": error.severity.value,
        }
        if additional_context:
            log_context.update(additional_context)

        log_message = f"Pipeline error: {error.error_type.value} - {error.reason[:200]}"

        if error.severity == ErrorSeverity.CRITICAL:
            logger.critical(log_message, extra={"pipeline": log_context}, exc_info=error)
        elif error.severity == ErrorSeverity.HIGH:
            logger.error(log_message, extra={"pipeline": log_context})
        elif error.severity == ErrorSeverity.MEDIUM:
            logger.warning(log_message, extra={"pipeline": log_context})
        else:
            logger.info(log_message, extra={"pipeline": log_context})

    def _update_error_stats(self, error: PipelineError) -> None:
        error_key = f"{error.error_type.value}_{error.severity.value}"
        self.error_stats[error_key] = self.error_stats.get(error_key, 0) + 1

    def get_error_stats(self) -> Dict[str, int]:
        return self.error_stats.copy()

    def reset_error_stats(self) -> None:
        self.error_stats.clear()


# Global error handler instance
global_error_handler = ErrorHandler()


def validation_error(message: str, **context: Any) -> PipelineError:
    return PipelineError(message, ErrorType.VALIDATION, context=context)


def data_error(message: str, **context: Any) -> PipelineError:
    return PipelineError(message, ErrorType.DATA, context=context)


def configuration_error(message: str, **context: Any) -> PipelineError:
    return PipelineError(message, ErrorType.CONFIGURATION, context=context)


def numerical_error(message: str, **context: Any) -> PipelineError:
    return PipelineError(message, ErrorType.NUMERICAL, context=context)


def usage_error(message: str, **context: Any) -> PipelineError:
    return PipelineError(message, ErrorType.USAGE, context=context)
