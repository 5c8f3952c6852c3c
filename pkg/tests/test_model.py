"""
Author: Louis Goodnews
Date: 2025-09-13
"""

from typing import Optional

import pytest

from crmcred.core.exceptions import ParameterError
from crmcred.core.model import CrmModel


class Point(CrmModel):
    x: float
    y: float = 0.0
    tags: tuple[str, ...] = ()
    label: Optional[str] = None

    def _validate(self) -> None:
        if self.x < 0.0:
            raise ParameterError("x must be nonnegative")


class Segment(CrmModel):
    start: Point
    end: Point


def test_integers_are_widened_and_lists_frozen() -> None:
    point = Point(x=1, tags=["a", "b"])

    assert isinstance(point.x, float)
    assert point.tags == ("a", "b")
    assert point.y == 0.0
    assert point.label is None


def test_missing_field_raises_parameter_error() -> None:
    with pytest.raises(ParameterError, match="missing required field 'x'"):
        Point()


def test_unknown_field_raises_type_error() -> None:
    with pytest.raises(TypeError, match="unknown fields"):
        Point(x=1.0, z=2.0)


def test_wrong_type_raises_type_error() -> None:
    with pytest.raises(TypeError):
        Point(x="1.0")


def test_bool_is_not_widened_to_float() -> None:
    with pytest.raises(TypeError):
        Point(x=True)


def test_validate_hook_runs() -> None:
    with pytest.raises(ParameterError):
        Point(x=-1.0)


def test_records_are_immutable() -> None:
    point = Point(x=1.0)

    with pytest.raises(AttributeError):
        point.x = 2.0

    with pytest.raises(AttributeError):
        point.other = 1


def test_equality_and_hash() -> None:
    assert Point(x=1.0, y=2.0) == Point(x=1, y=2)
    assert hash(Point(x=1.0, y=2.0)) == hash(Point(x=1, y=2))
    assert Point(x=1.0) != Point(x=2.0)
    assert len({Point(x=1.0), Point(x=1.0), Point(x=3.0)}) == 2


def test_replace_returns_validated_copy() -> None:
    point = Point(x=1.0, y=2.0)
    moved = point.replace(y=5.0)

    assert moved.y == 5.0
    assert point.y == 2.0

    with pytest.raises(ParameterError):
        point.replace(x=-3.0)


def test_to_dict_converts_nested_records() -> None:
    segment = Segment(
        end=Point(x=2.0, tags=("b",)),
        start=Point(x=1.0),
    )

    assert segment.to_dict() == {
        "end": {"label": None, "tags": ["b"], "x": 2.0, "y": 0.0},
        "start": {"label": None, "tags": [], "x": 1.0, "y": 0.0},
    }
    assert "start" not in segment.to_dict(exclude=["start"])


def test_repr_names_the_fields() -> None:
    assert repr(Point(x=1.0)) == "<Point(x=1.0, y=0.0, tags=(), label=None)>"
