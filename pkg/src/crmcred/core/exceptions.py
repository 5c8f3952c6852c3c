"""
Author: Louis Goodnews
Date: 2025-09-13
"""

from typing import Final, Optional


__all__: Final[list[str]] = [
    "CalibrationError",
    "ConfigError",
    "CrmError",
    "DomainError",
    "HistoryError",
    "ParameterError",
    "RangeError",
    "ReportError",
    "SimulationSizeError",
    "SingularSystemError",
    "UsageError",
]


class CrmError(Exception):
    """
    Base class of every error raised by crmcred.
    """


class ParameterError(CrmError, ValueError):
    """
    Exception raised when a record field violates its invariant.
    """


class DomainError(CrmError, ValueError):
    """
    Exception raised when an MGF argument lies at or beyond the inverse Gaussian branch point.
    """


class RangeError(CrmError, OverflowError):
    """
    Exception raised when a closed form overflows double precision.
    """


class CalibrationError(CrmError, ValueError):
    """
    Exception raised when the severity dispersion calibration is not positive.
    """


class UsageError(CrmError):
    """
    Exception raised when an operation is called outside its contract.
    """


class HistoryError(ParameterError):
    """
    Exception raised when a claim history is inconsistent.
    """


class SingularSystemError(CrmError, ArithmeticError):
    """
    Exception raised when a normal equations system is numerically singular.
    """

    def __init__(
        self,
        message: str,
        condition_number: float,
    ) -> None:
        """
        Initialize the SingularSystemError instance.

        Args:
            message (str): The error message.
            condition_number (float): The 2-norm condition number of the Gram matrix.

        Returns:
            None
        """

        # Call the parent class' __init__ method
        super().__init__(f"{message} (condition number {condition_number:.3e})")

        # Store the condition number
        self.condition_number: Final[float] = condition_number


class SimulationSizeError(CrmError, MemoryError):
    """
    Exception raised when a simulated panel exceeds the configured cell cap.
    """


class ConfigError(CrmError, ValueError):
    """
    Exception raised when an input document cannot be parsed or is incomplete.
    """

    def __init__(
        self,
        message: str,
        path: Optional[str] = None,
        line: Optional[int] = None,
        column: Optional[int] = None,
    ) -> None:
        """
        Initialize the ConfigError instance with a path:line:column anchored message.

        Args:
            message (str): The reason.
            path (Optional[str]): The offending file.
            line (Optional[int]): The 1-based line number.
            column (Optional[int]): The 1-based column number.

        Returns:
            None
        """

        # Collect the anchor parts that are known
        anchor: list[str] = [
            str(part)
            for part in (
                path,
                line,
                column,
            )
            if part is not None
        ]

        # Call the parent class' __init__ method
        super().__init__(f"{':'.join(anchor)}: {message}" if anchor else message)

        # Store the anchor
        self.path: Final[Optional[str]] = path
        self.line: Final[Optional[int]] = line
        self.column: Final[Optional[int]] = column


class ReportError(CrmError, OSError):
    """
    Exception raised when an output file cannot be written.
    """
