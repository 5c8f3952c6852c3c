"""
Author: Louis Goodnews
Date: 2025-09-13
"""

import asyncio
import weakref

from pathlib import Path
from typing import Final

import aiofiles
import aiofiles.os


__all__: Final[list[str]] = [
    "delete_file",
    "ensure_directory",
    "read_file",
    "write_file",
    "write_file_atomically",
]


# Initialize the per event loop locks as a module variable
_LOCKS: "weakref.WeakKeyDictionary[asyncio.AbstractEventLoop, asyncio.Lock]" = (
    weakref.WeakKeyDictionary()
)


def _lock() -> asyncio.Lock:
    """
    Return the lock of the running event loop.

    An asyncio.Lock is bound to the loop it is first used on, and run_async
    creates a new loop per call, so one lock is kept per loop.

    Returns:
        asyncio.Lock: The lock object.
    """

    # Get the running event loop
    loop: asyncio.AbstractEventLoop = asyncio.get_running_loop()

    # Get the lock of the running loop
    lock: asyncio.Lock | None = _LOCKS.get(loop)

    # Check if the loop has no lock yet
    if lock is None:
        # Create a new asyncio.Lock object
        lock = asyncio.Lock()

        # Store the lock for the running loop
        _LOCKS[loop] = lock

    # Return the lock
    return lock


async def delete_file(
    path: Path,
) -> bool:
    """
    Delete a file at the passed path.

    Args:
        path (Path): The path to the file to delete.

    Returns:
        bool: True if the file is gone afterwards, False otherwise.
    """

    # Acquire the lock
    async with _lock():
        try:
            # Check if the file exists
            if not await aiofiles.os.path.exists(path):
                # Nothing to delete
                return True

            # Delete the file
            await aiofiles.os.remove(path)

            # Return True as the file was deleted
            return True
        except OSError:
            # Return False if the file was not deleted
            return False


async def ensure_directory(
    path: Path,
) -> bool:
    """
    Create the passed directory and its parents if they do not exist.

    Args:
        path (Path): The directory to create.

    Returns:
        bool: True if the directory exists afterwards, False otherwise.
    """

    try:
        # Create the directory tree
        await aiofiles.os.makedirs(
            path,
            exist_ok=True,
        )

        # Return True as the directory exists
        return True
    except OSError:
        # Return False if the directory could not be created
        return False


async def read_file(
    path: Path,
) -> str:
    """
    Read a UTF-8 text file at the passed path.

    Args:
        path (Path): The path to the file to read.

    Returns:
        str: The content of the file.

    Raises:
        FileNotFoundError: If the file does not exist.
    """

    # Acquire the lock
    async with _lock():
        # Open the file
        async with aiofiles.open(
            path,
            encoding="utf-8",
            mode="r",
        ) as file:
            # Return the content of the file
            return await file.read()


async def write_file(
    path: Path,
    content: str,
) -> bool:
    """
    Write a UTF-8 text file at the passed path.

    Args:
        path (Path): The path to the file to write.
        content (str): The content to write to the file.

    Returns:
        bool: True if the file was written, False otherwise.
    """

    # Acquire the lock
    async with _lock():
        try:
            # Open the file
            async with aiofiles.open(
                path,
                encoding="utf-8",
                mode="w",
                newline="",
            ) as file:
                # Write the content to the file
                await file.write(content)

            # Return True as the file was written
            return True
        except OSError:
            # Return False if the file was not written
            return False


async def write_file_atomically(
    path: Path,
    content: str,
) -> bool:
    """
    Write a file through a temporary sibling that is renamed over the target.

    Readers never observe a partially written file.

    Args:
        path (Path): The path to the file to write.
        content (str): The content to write to the file.

    Returns:
        bool: True if the file was written, False otherwise.
    """

    # Build the temporary sibling path
    temporary: Path = path.with_name(f"{path.name}.tmp")

    # Write the content to the temporary file
    if not await write_file(
        content=content,
        path=temporary,
    ):
        # Return False as the temporary file could not be written
        return False

    try:
        # Replace the target with the temporary file
        await aiofiles.os.replace(
            temporary,
            path,
        )
    except OSError:
        # Remove the orphaned temporary file
        await delete_file(path=temporary)

        # Return False as the rename failed
        return False

    # Return True as the file was written
    return True
