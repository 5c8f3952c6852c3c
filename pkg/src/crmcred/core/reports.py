"""
Author: Louis Goodnews
Date: 2025-09-13
"""

import csv
import io
import json
import logging

from pathlib import Path
from typing import Any, Final, Iterable, Optional, Sequence

from crmcred.core.exceptions import ReportError
from crmcred.core.files import ensure_directory, write_file_atomically
from crmcred.utils.utils import run_async


__all__: Final[list[str]] = [
    "CrmReportService",
    "render_csv",
    "render_json",
]


def _cell(value: Any) -> str:
    """
    Render one CSV cell, floats in their shortest round-trip form.

    Args:
        value (Any): The cell value.

    Returns:
        str: The rendered cell.
    """

    # Render floats with repr so a cell parses back to the exact value
    if isinstance(
        value,
        float,
    ):
        return repr(value)

    # Render None as an empty cell
    if value is None:
        return ""

    # Render everything else with str
    return str(value)


def render_csv(rows: Iterable[Sequence[Any]]) -> str:
    """
    Render rows as CSV text with LF line endings.

    Args:
        rows (Iterable[Sequence[Any]]): The header followed by the data rows.

    Returns:
        str: The CSV text.
    """

    # Initialize an in-memory buffer
    buffer: io.StringIO = io.StringIO()

    # Initialize the CSV writer
    writer = csv.writer(
        buffer,
        lineterminator="\n",
    )

    # Write the rows
    for row in rows:
        writer.writerow([_cell(value) for value in row])

    # Return the CSV text
    return buffer.getvalue()


def render_json(value: Any) -> str:
    """
    Render a JSON document deterministically.

    Args:
        value (Any): The JSON-ready value.

    Returns:
        str: The JSON text, sorted keys and two-space indent, newline terminated.
    """

    # Return the JSON text
    return (
        json.dumps(
            value,
            indent=2,
            sort_keys=True,
        )
        + "\n"
    )


class CrmReportService:
    """
    The singleton writer of every output file.
    """

    _shared_instance: Optional["CrmReportService"] = None

    def __new__(cls) -> "CrmReportService":
        """
        Create a new instance of the CrmReportService class.

        Returns:
            CrmReportService: The shared instance of the CrmReportService class.
        """

        if cls._shared_instance is None:
            cls._shared_instance = super(CrmReportService, cls).__new__(cls)
            cls._shared_instance.init()
        return cls._shared_instance

    def init(self) -> None:
        """
        Initialize the CrmReportService instance.

        Returns:
            None
        """

        # Initialize this instance's logger
        self._logger: logging.Logger = logging.getLogger(self.__class__.__name__)

    def publish(
        self,
        path: Path,
        content: str,
    ) -> Path:
        """
        Write the content to the path atomically, creating missing directories.

        Args:
            path (Path): The output file.
            content (str): The file content.

        Returns:
            Path: The written path.

        Raises:
            ReportError: If the file cannot be written.
        """

        try:
            # Create the parent directory
            if not run_async(
                function=ensure_directory,
                path=path.parent,
            ):
                # Raise an OSError over the missing directory
                raise OSError(f"cannot create directory '{path.parent}'")

            # Write the content through a temporary sibling
            if not run_async(
                function=write_file_atomically,
                content=content,
                path=path,
            ):
                # Raise an OSError over the failed write
                raise OSError(f"cannot write '{path}'")
        except OSError as e:
            # Log the exception
            self._logger.exception(f"Failed to publish report '{path}': {e}")

            # Raise a ReportError exception
            raise ReportError(f"Failed to publish report '{path}': {e}") from e

        # Log the success
        self._logger.info(f"Report '{path}' published ({len(content)} characters)")

        # Return the written path
        return path

    def publish_csv(
        self,
        path: Path,
        rows: Iterable[Sequence[Any]],
    ) -> Path:
        """
        Render rows as CSV and publish them.

        Args:
            path (Path): The output file.
            rows (Iterable[Sequence[Any]]): The header followed by the data rows.

        Returns:
            Path: The written path.
        """

        # Publish the rendered CSV
        return self.publish(
            content=render_csv(rows=rows),
            path=path,
        )

    def publish_json(
        self,
        path: Path,
        value: Any,
    ) -> Path:
        """
        Render a value as JSON and publish it.

        Args:
            path (Path): The output file.
            value (Any): The JSON-ready value.

        Returns:
            Path: The written path.
        """

        # Publish the rendered JSON
        return self.publish(
            content=render_json(value=value),
            path=path,
        )
