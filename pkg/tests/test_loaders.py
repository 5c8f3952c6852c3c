"""
Author: Louis Goodnews
Date: 2025-09-13
"""

import math

from pathlib import Path

import pytest

from crmcred.core.constants import DEFAULT_LAMBDA1, DEFAULT_LAMBDA2, DEFAULT_SEED
from crmcred.core.crm import calibrate_psi, var_individual_severity
from crmcred.core.exceptions import ConfigError, HistoryError, ParameterError
from crmcred.core.loaders import (
    ClaimHistoryLoader,
    ModelParamsBuilder,
    ModelParamsLoader,
    PortfolioLoader,
    PublishedTableLoader,
    ScenarioGridLoader,
    published_table_path,
)


# Initialize the configuration directory shipped with the repository as a module constant
CONFIGS: Path = Path(__file__).resolve().parent.parent / "configs"


def test_builder_calibrates_the_dispersion() -> None:
    builder = (
        ModelParamsBuilder()
        .with_lambda1(value=DEFAULT_LAMBDA1)
        .with_lambda2(value=DEFAULT_LAMBDA2)
        .with_beta0(value=-0.05)
        .with_b1(value=1.5)
        .with_b2(value=0.2)
        .with_severity_variance(value=2.008e7)
    )

    assert "c" in builder
    assert "psi2" not in builder

    params = builder.build()

    assert params.psi2 == calibrate_psi(
        b1=1.5,
        b2=0.2,
        beta0=-0.05,
        c=2.008e7,
        lambda1=DEFAULT_LAMBDA1,
        lambda2=DEFAULT_LAMBDA2,
    )
    assert "c" in builder.configuration


def test_builder_needs_exactly_one_dispersion() -> None:
    builder = (
        ModelParamsBuilder()
        .with_lambda1(value=0.2)
        .with_lambda2(value=1000.0)
        .with_beta0(value=0.0)
        .with_b1(value=0.5)
        .with_b2(value=0.01)
    )

    with pytest.raises(ParameterError):
        builder.build()

    with pytest.raises(ParameterError):
        builder.with_psi2(value=1.0).with_severity_variance(value=2.008e7).build()

    with pytest.raises(ParameterError):
        ModelParamsBuilder().with_beta0(value=0.0).build()


def test_load_params_with_covariates() -> None:
    params = ModelParamsLoader.load(path=CONFIGS / "params.json")

    assert params.lambda1 == pytest.approx(math.exp(-1.9), rel=1e-14)
    assert params.lambda2 == pytest.approx(math.exp(8.4), rel=1e-14)
    assert (params.beta0, params.b1, params.b2) == (0.0, 0.5, 0.01)
    assert var_individual_severity(params=params) == pytest.approx(2.008e7, rel=1e-12)


def test_load_params_with_explicit_dispersion() -> None:
    params = ModelParamsLoader.load(path=CONFIGS / "params_dependent.json")

    assert params.psi2 == 0.9
    assert params.beta0 == -0.1


def test_comment_keys_are_ignored(write_json) -> None:
    path = write_json(
        "params.json",
        {
            "_comment": "ignored",
            "lambda1": {"_note": "also ignored", "covariates": [1], "coefficients": [-1.0]},
            "lambda2": 100,
            "beta0": 0,
            "b1": 0,
            "b2": 0,
            "psi2": 1,
        },
    )

    params = ModelParamsLoader.load(path=path)

    assert params.lambda1 == pytest.approx(math.exp(-1.0))
    assert params.lambda2 == 100.0


def test_invalid_json_is_anchored_at_the_error(write_json) -> None:
    path = write_json("broken.json", '{\n  "b1": 0.5,\n}\n')

    with pytest.raises(ConfigError) as info:
        ModelParamsLoader.load(path=path)

    assert info.value.line == 3
    assert info.value.column == 1
    assert str(info.value).startswith(f"{path}:3:1: ")


def test_missing_file_is_a_config_error(tmp_path: Path) -> None:
    with pytest.raises(ConfigError, match="file not found"):
        ModelParamsLoader.load(path=tmp_path / "absent.json")


@pytest.mark.parametrize(
    ("document", "message"),
    [
        ({"lambda1": 0.2, "lambda2": 1000, "beta0": 0, "b1": 0.5, "psi2": 1}, "missing field 'b2'"),
        ({"lambda1": "fast", "lambda2": 1000, "beta0": 0, "b1": 0.5, "b2": 0, "psi2": 1}, "'lambda1'"),
        ({"lambda1": 0.2, "lambda2": 1000, "beta0": "zero", "b1": 0.5, "b2": 0, "psi2": 1}, "beta0"),
        ([1, 2, 3], "JSON object"),
    ],
)
def test_malformed_parameters_are_config_errors(write_json, document: object, message: str) -> None:
    with pytest.raises(ConfigError, match=message):
        ModelParamsLoader.load(path=write_json("params.json", document))


def test_load_portfolio() -> None:
    portfolio = PortfolioLoader.load(path=CONFIGS / "portfolio.json")

    assert [item.weight for item in portfolio.classes] == [0.7, 0.3]
    assert portfolio.classes[1].params.b2 == 0.4


def test_portfolio_needs_a_list_of_classes(write_json) -> None:
    with pytest.raises(ConfigError):
        PortfolioLoader.load(path=write_json("portfolio.json", {"classes": {"weight": 1.0}}))


def test_load_history() -> None:
    history = ClaimHistoryLoader.load(path=CONFIGS / "history.json")

    assert history.horizon == 5
    assert history.frequencies == (0, 1, 0, 2, 0)
    assert history.aggregates == (0.0, 3120.5, 0.0, 9875.25, 0.0)


def test_load_history_given_as_objects(write_json) -> None:
    history = ClaimHistoryLoader.load(
        path=write_json("history.json", {"periods": [{"N": 1, "S": 10.0}, {"N": 0, "S": 0}]})
    )

    assert history.frequencies == (1, 0)


def test_load_history_rejects_inconsistent_periods(write_json) -> None:
    with pytest.raises(HistoryError):
        ClaimHistoryLoader.load(path=write_json("history.json", {"periods": [[1, 0.0]]}))

    with pytest.raises(ConfigError):
        ClaimHistoryLoader.load(path=write_json("history.json", {"years": []}))


def test_grid_is_overlaid_on_the_defaults() -> None:
    grid = ScenarioGridLoader.load(path=CONFIGS / "grid_c_2.008e7.json")

    assert grid.c == 2.008e7
    assert grid.seed == 20240101
    assert grid.beta0 == (0.0, -0.05, -0.1)
    assert grid.b1 == (0.5, 1.5, 3.0)
    assert grid.b2 == (0.01, 0.2, 0.4)
    assert grid.t == tuple(range(1, 11))
    assert grid.cardinality == 27


def test_grid_fields_replace_the_defaults(write_json) -> None:
    grid = ScenarioGridLoader.load(path=write_json("grid.json", {"c": 2.008e7, "b1": [1], "t": [1, 2]}))

    assert grid.b1 == (1.0,)
    assert grid.t == (1, 2)
    assert grid.seed == DEFAULT_SEED
    assert grid.cardinality == 9


@pytest.mark.parametrize(
    ("document", "message"),
    [
        ({"b1": [0.5]}, "missing field 'c'"),
        ({"c": 2.008e7, "horizon": 5}, "unknown fields"),
        ({"c": 2.008e7, "b1": "0.5"}, "b1"),
    ],
)
def test_malformed_grids_are_config_errors(write_json, document: dict, message: str) -> None:
    with pytest.raises(ConfigError, match=message):
        ScenarioGridLoader.load(path=write_json("grid.json", document))


def test_published_table_in_raw_units() -> None:
    table = PublishedTableLoader.load()

    assert published_table_path().name == "published_hmse.csv"
    assert len(table.cells) == 81

    cell = table.lookup(b1=0.5, b2=0.01, beta0=0.0, t=1)
    assert cell is not None
    assert cell.hmse1 == pytest.approx(0.1652e6)
    assert cell.hmse2 == pytest.approx(0.1579e6)
    assert table.lookup(b1=0.5, b2=0.01, beta0=0.0, t=2) is None


def test_published_table_checks_the_header(tmp_path: Path) -> None:
    path = tmp_path / "table.csv"
    path.write_text("# comment, with a comma\nbeta0,b1,b2,t,hmse1,hmse2\n", encoding="utf-8")

    with pytest.raises(ConfigError) as info:
        PublishedTableLoader.load(path=path)

    assert info.value.line == 2
    assert str(info.value).startswith(f"{path}:2: ")


@pytest.mark.parametrize("row", ["0,0.01,0.5,one,0.1,0.1", "0,0.01,0.5,1,0.1"])
def test_published_table_rejects_malformed_rows(tmp_path: Path, row: str) -> None:
    path = tmp_path / "table.csv"
    path.write_text(f"beta0,b2,b1,t,hmse1,hmse2\n{row}\n", encoding="utf-8")

    with pytest.raises(ConfigError) as info:
        PublishedTableLoader.load(path=path)

    assert info.value.line == 2
