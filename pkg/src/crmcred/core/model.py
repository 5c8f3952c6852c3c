"""
Author: Louis Goodnews
Date: 2025-09-13
"""

import inspect

from typing import (
    TYPE_CHECKING,
    get_origin,
    get_type_hints,
    Any,
    ClassVar,
    Final,
    Optional,
    Type,
    Union,
)

from crmcred.core.exceptions import ParameterError
from crmcred.utils.utils import analyze_typing

if TYPE_CHECKING:
    from typing_extensions import Self


__all__: Final[list[str]] = [
    "CrmModel",
    "MISSING",
]


class _Missing:
    """
    Sentinel type of absent field values.
    """

    def __repr__(self) -> str:
        """
        Return a string representation of the sentinel.

        Returns:
            str: The string representation.
        """

        # Return the sentinel's name
        return "MISSING"


# Initialize the generic missing value as a module constant
MISSING: Final[_Missing] = _Missing()


class CrmModel:
    """
    Base class of the immutable value records.

    Subclasses declare their fields as class annotations (optionally with a
    default). Every field is type checked at construction, exposed through a
    read-only property and frozen afterwards. Subclasses put their invariants
    into _validate.
    """

    # The defaults declared by each subclass
    _defaults: ClassVar[dict[str, Any]] = {}

    # The resolved field annotations, cached per subclass
    _field_types: ClassVar[Optional[dict[str, Any]]] = None

    def __init__(
        self,
        **kwargs: Any,
    ) -> None:
        """
        Initialize the instance.

        Args:
            **kwargs: The field values.

        Returns:
            None

        Raises:
            ParameterError: If a required field is missing.
            TypeError: If a field has the wrong type or an unknown field is passed.
        """

        # Get the field annotations of this class
        fields: dict[str, Any] = self.__class__._fields()

        # Check for unknown keyword arguments
        unknown: set[str] = set(kwargs) - set(fields)

        # Raise a TypeError over unknown fields
        if unknown:
            raise TypeError(f"{self.__class__.__name__} got unknown fields: {sorted(unknown)}")

        # Iterate over the field field type pairs
        for (
            field,
            field_type,
        ) in fields.items():
            # Get the passed value or the declared default
            value: Any = kwargs.get(
                field,
                self.__class__._defaults.get(
                    field,
                    MISSING,
                ),
            )

            # Check if the current field is missing
            if value is MISSING:
                # Raise a ParameterError over the missing field
                raise ParameterError(f"{self.__class__.__name__}: missing required field '{field}'")

            # Coerce and type check the value
            value = self._coerce(
                field=field,
                field_type=field_type,
                value=value,
            )

            # Store the value behind the read-only property
            object.__setattr__(
                self,
                f"_{field}",
                value,
            )

        # Check the subclass invariants
        self._validate()

        # Freeze the instance
        object.__setattr__(
            self,
            "_frozen",
            True,
        )

    def __init_subclass__(
        cls,
        **kwargs: Any,
    ) -> None:
        """
        Turn the annotated fields of the subclass into read-only properties.

        Args:
            **kwargs: Passed on to the parent class.

        Returns:
            None
        """

        # Call the parent class' __init_subclass__ method
        super().__init_subclass__(**kwargs)

        # Inherit the defaults of the parent classes
        defaults: dict[str, Any] = {}
        for base in reversed(cls.__mro__[1:]):
            defaults.update(getattr(base, "_defaults", {}))

        # Reset the annotation cache of the subclass
        cls._field_types = None

        # Iterate over the fields declared by this subclass
        for (
            field,
            annotation,
        ) in inspect.get_annotations(cls).items():
            # Skip private and class level annotations
            if field.startswith("_") or "ClassVar" in str(annotation):
                continue

            # Remember the declared default
            if field in cls.__dict__:
                defaults[field] = cls.__dict__[field]

            def getter(
                self: "CrmModel",
                key: str = f"_{field}",
            ) -> Any:
                """
                Return the value of the field.

                Returns:
                    Any: The value of the field.
                """

                # Return the stored value
                return self.__dict__[key]

            # Append the read-only property to the subclass
            setattr(
                cls,
                field,
                property(getter),
            )

        # Store the collected defaults
        cls._defaults = defaults

    def __eq__(
        self,
        other: object,
    ) -> bool:
        """
        Check if the passed other object holds the same field values.

        Args:
            other (object): The other object.

        Returns:
            bool: True if both records are equal, False otherwise.
        """

        # Check if the other object is a record of the same class
        if not isinstance(
            other,
            self.__class__,
        ):
            # Comparison between different classes is not supported
            return NotImplemented

        # Compare the field values
        return self._values() == other._values()

    def __hash__(self) -> int:
        """
        Return the hash of the field values.

        Returns:
            int: The hash.
        """

        # Hash the class together with the field values
        return hash(
            (
                self.__class__.__name__,
                self._values(),
            )
        )

    def __repr__(self) -> str:
        """
        Return a string representation of the record.

        Returns:
            str: A string representation of the record.
        """

        # Return a string representation of the record
        return f"<{self.__class__.__name__}({', '.join(f'{key}={value!r}' for key, value in zip(self.__class__._fields(), self._values()))})>"

    def __setattr__(
        self,
        key: str,
        value: Any,
    ) -> None:
        """
        Reject attribute assignment once the record is frozen.

        Args:
            key (str): The attribute name.
            value (Any): The value.

        Returns:
            None

        Raises:
            AttributeError: If the record is frozen.
        """

        # Check if the record is frozen
        if self.__dict__.get("_frozen", False):
            # Raise an AttributeError as records are immutable
            raise AttributeError(f"{self.__class__.__name__} is immutable")

        # Set the attribute
        object.__setattr__(
            self,
            key,
            value,
        )

    def __str__(self) -> str:
        """
        Return a string representation of the record.

        Returns:
            str: A string representation of the record.
        """

        # Return a string representation of the record
        return self.__repr__()

    @classmethod
    def _fields(cls) -> dict[str, Any]:
        """
        Return the resolved annotations of the public fields.

        Returns:
            dict[str, Any]: The field name to annotation mapping.
        """

        # Check if the annotations were resolved before
        if cls._field_types is None:
            # Resolve the annotations of the class hierarchy
            cls._field_types = {
                field: annotation
                for (
                    field,
                    annotation,
                ) in get_type_hints(cls).items()
                if not field.startswith("_") and get_origin(annotation) is not ClassVar
            }

        # Return the resolved annotations
        return cls._field_types

    def _coerce(
        self,
        field: str,
        field_type: Any,
        value: Any,
    ) -> Any:
        """
        Coerce integers to floats and lists to tuples, then type check the value.

        Args:
            field (str): The field name.
            field_type (Any): The field annotation.
            value (Any): The value.

        Returns:
            Any: The coerced value.

        Raises:
            TypeError: If the value does not match the annotation.
        """

        # Reduce the annotation to isinstance-compatible types
        expected: Union[Type[Any], tuple[Type[Any], ...]] = analyze_typing(typing=field_type)

        # Normalize the expected types to a tuple
        candidates: tuple[Type[Any], ...] = (
            expected
            if isinstance(
                expected,
                tuple,
            )
            else (expected,)
        )

        # Check if an integer is passed for a float field
        if (
            float in candidates
            and int not in candidates
            and isinstance(
                value,
                int,
            )
            and not isinstance(
                value,
                bool,
            )
        ):
            # Widen the integer to a float
            value = float(value)

        # Check if a list is passed for a tuple field
        if tuple in candidates and isinstance(
            value,
            list,
        ):
            # Freeze the list into a tuple
            value = tuple(value)

        # Check if the value's type corresponds to the expected type
        if not isinstance(
            value,
            candidates,
        ):
            # Raise a TypeError if the actual type does not match the annotated one
            raise TypeError(
                f"{self.__class__.__name__}.{field} expected {field_type}, got {type(value).__name__}"
            )

        # Return the coerced value
        return value

    def _validate(self) -> None:
        """
        Check the invariants of the record. Subclasses override this hook.

        Returns:
            None
        """

    def _values(self) -> tuple[Any, ...]:
        """
        Return the field values in declaration order.

        Returns:
            tuple[Any, ...]: The field values.
        """

        # Return the field values
        return tuple(self.__dict__[f"_{field}"] for field in self.__class__._fields())

    def replace(
        self,
        **changes: Any,
    ) -> "Self":
        """
        Return a copy of the record with the passed fields replaced.

        Args:
            **changes: The fields to replace.

        Returns:
            Self: The new record.
        """

        # Collect the current field values
        values: dict[str, Any] = dict(
            zip(
                self.__class__._fields(),
                self._values(),
            )
        )

        # Return a new record with the changes applied
        return self.__class__(**{**values, **changes})

    def to_dict(
        self,
        exclude: Optional[list[str]] = None,
    ) -> dict[str, Any]:
        """
        Return a JSON-ready dictionary representation of the record.

        Nested records are converted recursively and tuples become lists.

        Args:
            exclude (Optional[list[str]], optional): The fields to exclude. Defaults to None.

        Returns:
            dict[str, Any]: A dictionary representation of the record.
        """

        def convert(value: Any) -> Any:
            # Convert nested records and containers
            if isinstance(
                value,
                CrmModel,
            ):
                return value.to_dict()
            if isinstance(
                value,
                (
                    list,
                    tuple,
                ),
            ):
                return [convert(item) for item in value]
            return value

        # Return the dictionary representation without the excluded fields
        return {
            field: convert(value)
            for (
                field,
                value,
            ) in zip(
                self.__class__._fields(),
                self._values(),
            )
            if exclude is None or field not in exclude
        }
