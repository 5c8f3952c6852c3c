"""
Author: Louis Goodnews
Date: 2025-09-13
"""

import asyncio
import hashlib
import inspect
import types

from concurrent.futures import ThreadPoolExecutor
from typing import (
    get_args,
    get_origin,
    Any,
    Callable,
    Coroutine,
    Final,
    Literal,
    Type,
    Union,
)


__all__: Final[list[str]] = [
    "analyze_typing",
    "derive_seed",
    "merge_dicts",
    "NotACoroutineFunctionError",
    "run_async",
]


# Initialize the mask of an unsigned 64 bit integer as a module constant
_UINT64_MASK: Final[int] = (1 << 64) - 1


class NotACoroutineFunctionError(Exception):
    """
    Exception raised when the passed function is not a coroutine function.
    """


def analyze_typing(
    typing: Any,
) -> Union[Type[Any], tuple[Type[Any], ...]]:
    """
    Reduce the passed annotation to something isinstance understands.

    Parametrized generics collapse to their origin (tuple[float, ...] -> tuple),
    unions and optionals to a tuple of their members and literals to the types
    of their values.

    Args:
        typing (Any): The annotation to analyze.

    Returns:
        Union[Type[Any], tuple[Type[Any], ...]]: A type or a tuple of types.
    """

    # Check if the typing is Any
    if typing is Any:
        # Every value is an object
        return object

    # Get the origin of the typing
    origin: Any = get_origin(typing)

    # Check if the typing is not parametrized
    if origin is None:
        # Return the typing itself
        return typing

    # Check if the typing is a union (Optional included)
    if origin is Union or origin is types.UnionType:
        # Initialize the result list
        result: list[Type[Any]] = []

        # Iterate over the members of the union
        for arg in get_args(typing):
            # Analyze the current member
            analyzed: Union[Type[Any], tuple[Type[Any], ...]] = analyze_typing(typing=arg)

            # Flatten nested unions
            if isinstance(
                analyzed,
                tuple,
            ):
                result.extend(analyzed)
            else:
                result.append(analyzed)

        # Return the members as a tuple
        return tuple(result)

    # Check if the typing is a literal
    if origin is Literal:
        # Return the distinct types of the literal values
        return tuple(dict.fromkeys(type(arg) for arg in get_args(typing)))

    # Return the origin of the parametrized generic
    return origin


def derive_seed(
    seed: int,
    index: int,
) -> int:
    """
    Derive a per-task seed as seed XOR hash(index).

    The hash is a keyed-free BLAKE2b digest, so the result does not depend on
    the interpreter's hash randomization or on scheduling order.

    Args:
        seed (int): The root seed.
        index (int): The task index.

    Returns:
        int: The derived unsigned 64 bit seed.
    """

    # Hash the index into 8 bytes
    digest: bytes = hashlib.blake2b(
        index.to_bytes(
            8,
            byteorder="little",
            signed=False,
        ),
        digest_size=8,
    ).digest()

    # Return the XOR of the seed and the digest
    return (seed ^ int.from_bytes(digest, byteorder="little")) & _UINT64_MASK


def merge_dicts(
    new: dict[str, Any],
    old: dict[str, Any],
) -> dict[str, Any]:
    """
    Overlay the passed new dictionary onto the passed old dictionary.

    Nested dictionaries are merged recursively, every other value of the new
    dictionary replaces the old one. Neither input is modified.

    Args:
        new (dict[str, Any]): The overriding dictionary.
        old (dict[str, Any]): The dictionary holding the defaults.

    Returns:
        dict[str, Any]: The merged dictionary.
    """

    # Initialize the result to a copy of the old dictionary
    result: dict[str, Any] = old.copy()

    # Iterate over the new dictionary
    for (
        key,
        new_value,
    ) in new.items():
        # Get the old value
        old_value: Any = result.get(key)

        # Check if both values are dictionaries
        if isinstance(
            old_value,
            dict,
        ) and isinstance(
            new_value,
            dict,
        ):
            # Merge the dictionaries
            result[key] = merge_dicts(
                new=new_value,
                old=old_value,
            )
        else:
            # Set the new value
            result[key] = new_value

    # Return the merged dictionary
    return result


def run_async(
    function: Callable[..., Coroutine[Any, Any, Any]],
    *args: Any,
    **kwargs: Any,
) -> Any:
    """
    Run the passed coroutine function to completion from synchronous code.

    When the calling thread already runs an event loop, the coroutine is run
    on a fresh loop in a helper thread.

    Args:
        function (Callable[..., Coroutine[Any, Any, Any]]): The coroutine function to run.
        *args: The arguments to pass to the function.
        **kwargs: The keyword arguments to pass to the function.

    Returns:
        Any: The result of the coroutine.

    Raises:
        NotACoroutineFunctionError: If the passed function is not a coroutine function.
    """

    # Check if the passed function is a coroutine function
    if not inspect.iscoroutinefunction(function):
        # Raise a NotACoroutineFunctionError exception
        raise NotACoroutineFunctionError(
            f"{getattr(function, '__name__', function)!r} is not a coroutine function",
        )

    try:
        # Check for an event loop running in this thread
        asyncio.get_running_loop()
    except RuntimeError:
        # No loop is running, so run the coroutine on a new one
        return asyncio.run(
            function(
                *args,
                **kwargs,
            )
        )

    # Run the coroutine on a new loop in a helper thread
    with ThreadPoolExecutor(max_workers=1) as executor:
        return executor.submit(
            asyncio.run,
            function(
                *args,
                **kwargs,
            ),
        ).result()
