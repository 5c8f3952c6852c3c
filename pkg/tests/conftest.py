"""
Author: Louis Goodnews
Date: 2025-09-13
"""

import json

from pathlib import Path
from typing import Any, Callable

import pytest

from crmcred.core.constants import DEFAULT_LAMBDA1, DEFAULT_LAMBDA2
from crmcred.core.crm import ModelParams, calibrate_psi


# Initialize the severity variance of the scenario study as a module constant
STUDY_C: float = 2.008e7


def make_params(
    beta0: float,
    b1: float,
    b2: float,
    c: float = STUDY_C,
) -> ModelParams:
    """
    Return the study's parameters for one (beta0, b1, b2) cell with psi2 calibrated to c.
    """

    return ModelParams(
        b1=b1,
        b2=b2,
        beta0=beta0,
        lambda1=DEFAULT_LAMBDA1,
        lambda2=DEFAULT_LAMBDA2,
        psi2=calibrate_psi(
            b1=b1,
            b2=b2,
            beta0=beta0,
            c=c,
            lambda1=DEFAULT_LAMBDA1,
            lambda2=DEFAULT_LAMBDA2,
        ),
    )


@pytest.fixture
def study_params() -> Callable[..., ModelParams]:
    return make_params


@pytest.fixture
def base_params() -> ModelParams:
    # beta0 = 0, b1 = 0.5, b2 = 0.01
    return make_params(
        b1=0.5,
        b2=0.01,
        beta0=0.0,
    )


@pytest.fixture
def mc_params() -> ModelParams:
    # Frequent claims and moderate severities keep the Monte Carlo noise low
    return ModelParams(
        b1=0.5,
        b2=0.2,
        beta0=-0.1,
        lambda1=0.8,
        lambda2=100.0,
        psi2=1.0,
    )


@pytest.fixture
def e13() -> float:
    # (lambda1 lambda2)^2 of the study
    return (DEFAULT_LAMBDA1 * DEFAULT_LAMBDA2) ** 2


@pytest.fixture
def write_json(tmp_path: Path) -> Callable[[str, Any], Path]:
    def write(name: str, document: Any) -> Path:
        path: Path = tmp_path / name
        path.write_text(
            json.dumps(document) if not isinstance(document, str) else document,
            encoding="utf-8",
        )
        return path

    return write

