"""
Author: Louis Goodnews
Date: 2025-09-13
"""

import csv
import json

from pathlib import Path

import pytest

from crmcred.core.constants import (
    AGGREGATE_SEVERITY,
    COMPARISON_CSV_HEADER,
    EXIT_CONFIG_ERROR,
    EXIT_INFEASIBLE_GRID,
    EXIT_SUCCESS,
    EXIT_VERIFICATION_FAILURE,
    FREQUENCY,
)
from crmcred.core.simlab import OracleCheck
from crmcred.crmctl import main


# Initialize the configuration directory shipped with the repository as a module constant
CONFIGS: Path = Path(__file__).resolve().parent.parent / "configs"


def _small_grid(write_json, c: float = 2.008e7) -> Path:
    return write_json(
        "grid.json",
        {
            "asymptotic_t_max": 5,
            "b1": [0.5, 3.0],
            "b2": [0.01, 0.4],
            "beta0": [0.0, -0.1],
            "c": c,
            "t": [1, 5, 10],
        },
    )


def test_scenario_writes_every_report(tmp_path: Path, write_json, capsys) -> None:
    out = tmp_path / "out"

    code = main(["scenario", "--config", str(_small_grid(write_json)), "--out", str(out)])

    assert code == EXIT_SUCCESS
    assert sorted(path.name for path in out.iterdir()) == [
        "figure_asymptotic_beta0_0.csv",
        "figure_beta0_-0.1.csv",
        "figure_beta0_0.csv",
        "hmse.csv",
        "hmse.json",
        "infeasible.csv",
    ]
    assert len((out / "hmse.csv").read_text(encoding="utf-8").splitlines()) == 1 + 8 * 3
    assert len(json.loads((out / "hmse.json").read_text(encoding="utf-8"))["rows"]) == 24
    assert (out / "infeasible.csv").read_text(encoding="utf-8") == "beta0,b1,b2,constraint,message\n"
    assert len(capsys.readouterr().out.splitlines()) == 1 + 8 * 2


def test_scenario_is_byte_identical_across_runs(tmp_path: Path, write_json) -> None:
    config = _small_grid(write_json)

    for name in ("first", "second"):
        assert main(["scenario", "--config", str(config), "--out", str(tmp_path / name), "--published"]) == 0

    first = sorted((tmp_path / "first").iterdir())
    assert "comparison_vs_published.csv" in [path.name for path in first]
    for path in first:
        assert path.read_bytes() == (tmp_path / "second" / path.name).read_bytes()


def test_scenario_reports_infeasible_cells(tmp_path: Path, write_json) -> None:
    out = tmp_path / "out"

    code = main(["scenario", "--config", str(_small_grid(write_json, c=2.008e6)), "--out", str(out)])

    assert code == EXIT_INFEASIBLE_GRID
    assert len((out / "infeasible.csv").read_text(encoding="utf-8").splitlines()) == 1 + 4
    assert len((out / "hmse.csv").read_text(encoding="utf-8").splitlines()) == 1 + 4 * 3


def test_scenario_output_does_not_depend_on_the_number_of_jobs(tmp_path: Path, write_json) -> None:
    config = _small_grid(write_json)

    for name, jobs in (("serial", "1"), ("threaded", "3")):
        code = main(
            [
                "scenario",
                "--config",
                str(config),
                "--out",
                str(tmp_path / name),
                "--published",
                "--jobs",
                jobs,
            ]
        )
        assert code == EXIT_SUCCESS

    for path in sorted((tmp_path / "serial").iterdir()):
        assert path.read_bytes() == (tmp_path / "threaded" / path.name).read_bytes(), path.name


@pytest.mark.slow
def test_scenario_empirical_errors_do_not_depend_on_the_number_of_jobs(tmp_path: Path, write_json) -> None:
    config = _small_grid(write_json)

    for name, jobs in (("serial", "1"), ("threaded", "4")):
        code = main(
            [
                "scenario",
                "--config",
                str(config),
                "--out",
                str(tmp_path / name),
                "--n",
                "10000",
                "--jobs",
                jobs,
            ]
        )
        assert code == EXIT_SUCCESS

    serial = (tmp_path / "serial" / "empirical.csv").read_bytes()
    assert len(serial.splitlines()) == 1 + 8 * 3
    assert serial == (tmp_path / "threaded" / "empirical.csv").read_bytes()


def _comparison(tmp_path: Path) -> dict[tuple[float, float, float, int], dict[str, str]]:
    out = tmp_path / "out"
    code = main(
        [
            "scenario",
            "--config",
            str(CONFIGS / "grid_c_2.008e7.json"),
            "--out",
            str(out),
            "--published",
            "--jobs",
            "2",
        ]
    )
    assert code == EXIT_SUCCESS

    with (out / "comparison_vs_published.csv").open(encoding="utf-8", newline="") as file:
        reader = csv.DictReader(file)
        assert tuple(reader.fieldnames or ()) == COMPARISON_CSV_HEADER
        return {
            (float(row["beta0"]), float(row["b1"]), float(row["b2"]), int(row["t"])): row
            for row in reader
        }


@pytest.mark.parametrize("beta0", [0.0, -0.05, -0.1])
def test_scenario_orders_the_premiums_like_the_published_study(tmp_path: Path, beta0: float) -> None:
    rows = _comparison(tmp_path)

    for t in (1, 5, 10):
        # Small severity heterogeneity favours the frequency premium
        assert rows[(beta0, 3.0, 0.01, t)]["computed_order"] == FREQUENCY
        assert rows[(beta0, 3.0, 0.01, t)]["order_match"] == "True"
        # Large severity heterogeneity favours the aggregate severity premium
        assert rows[(beta0, 0.5, 0.4, t)]["computed_order"] == AGGREGATE_SEVERITY
        assert rows[(beta0, 0.5, 0.4, t)]["order_match"] == "True"


def test_scenario_reports_the_known_disagreement_with_the_published_study(tmp_path: Path) -> None:
    rows = _comparison(tmp_path)

    # The published errors rank the frequency premium first at t = 5, the closed forms do not
    mismatch = rows[(-0.05, 3.0, 0.2, 5)]
    assert mismatch["order_match"] == "False"
    assert mismatch["published_order"] == FREQUENCY
    assert mismatch["computed_order"] == AGGREGATE_SEVERITY

    # At t = 10 the orders agree while the aggregate severity error sits a quarter below the published one
    agreement = rows[(-0.05, 3.0, 0.2, 10)]
    assert agreement["order_match"] == "True"
    assert float(agreement["computed_hmse1"]) == pytest.approx(0.3611e6, rel=1e-2)
    assert float(agreement["computed_hmse2"]) == pytest.approx(0.4762e6, rel=1e-2)
    assert float(agreement["rel_dev_hmse1"]) == pytest.approx(-0.244, abs=0.01)

    assert rows[(-0.05, 3.0, 0.2, 1)]["order_match"] == "True"


def test_premium_prints_the_quote(capsys) -> None:
    code = main(
        [
            "premium",
            "--config",
            str(CONFIGS / "params.json"),
            "--history",
            str(CONFIGS / "history.json"),
        ]
    )

    assert code == EXIT_SUCCESS

    quote = json.loads(capsys.readouterr().out)
    assert quote["variant"] == AGGREGATE_SEVERITY
    assert quote["t"] == 5
    assert quote["premium"] == pytest.approx(
        quote["z"] * quote["observation_mean"] + (1.0 - quote["z"]) * quote["u"],
        rel=1e-12,
    )


@pytest.mark.parametrize(("flag", "variant"), [("freq", FREQUENCY), ("count", "FrequencyCount")])
def test_quote_alias_and_variants(capsys, flag: str, variant: str) -> None:
    code = main(
        [
            "quote",
            "--config",
            str(CONFIGS / "params.json"),
            "--history",
            str(CONFIGS / "history.json"),
            "--variant",
            flag,
        ]
    )

    assert code == EXIT_SUCCESS
    assert json.loads(capsys.readouterr().out)["variant"] == variant


def test_count_premium_of_a_dependent_model_is_a_usage_error(capsys) -> None:
    code = main(
        [
            "premium",
            "--config",
            str(CONFIGS / "params_dependent.json"),
            "--history",
            str(CONFIGS / "history.json"),
            "--variant",
            "count",
        ]
    )

    assert code == EXIT_CONFIG_ERROR
    assert capsys.readouterr().err.startswith("crmctl: error: ")


def test_recommend_text(capsys) -> None:
    code = main(["recommend", "--config", str(CONFIGS / "params.json"), "--t-max", "10"])

    lines = capsys.readouterr().out.splitlines()

    assert code == EXIT_SUCCESS
    assert len(lines) == 1 + 10 + 2
    assert lines[1].split()[-1] == FREQUENCY
    assert lines[-2] == "crossover: none"
    assert lines[-1].startswith("hmse2_limit: ")


def test_recommend_json(capsys) -> None:
    code = main(["recommend", "--config", str(CONFIGS / "params.json"), "--t-max", "5", "--json"])

    document = json.loads(capsys.readouterr().out)

    assert code == EXIT_SUCCESS
    assert [row["t"] for row in document["rows"]] == [1, 2, 3, 4, 5]
    assert {row["recommended"] for row in document["rows"]} == {FREQUENCY}
    assert document["crossover"] is None
    assert document["hmse2_limit"] > 0.0


def test_verify_exit_codes(mocker, capsys) -> None:
    def check(passed: bool) -> OracleCheck:
        return OracleCheck(
            estimate=1.0,
            expected=1.0,
            name="mean_aggregate",
            passed=passed,
            std_error=0.1,
            threshold=4.0,
            z=0.0,
        )

    suite = mocker.patch("crmcred.crmctl.run_oracle_suite", return_value=[check(True)])
    arguments = ["verify", "--config", str(CONFIGS / "params_dependent.json"), "--n", "10000"]

    assert main(arguments) == EXIT_SUCCESS
    assert suite.call_args.kwargs["n"] == 10_000
    assert "1 of 1 checks passed" in capsys.readouterr().out

    suite.return_value = [check(True), check(False)]
    assert main(arguments) == EXIT_VERIFICATION_FAILURE
    assert "FAIL  mean_aggregate" in capsys.readouterr().out


@pytest.mark.parametrize(
    "arguments",
    [
        ["verify", "--config", "{configs}/params.json", "--n", "100"],
        ["recommend", "--config", "{tmp}/absent.json"],
        ["scenario", "--config", "{configs}/grid_c_2.008e7.json"],
        ["scenario", "--config", "{configs}/grid_c_2.008e7.json", "--out", "{tmp}/out", "--jobs", "0"],
        ["simulate"],
        ["recommend", "--config", "{configs}/params.json", "--t-max", "ten"],
    ],
)
def test_usage_and_configuration_errors(tmp_path: Path, arguments: list[str]) -> None:
    argv = [value.format(configs=CONFIGS, tmp=tmp_path) for value in arguments]

    assert main(argv) == EXIT_CONFIG_ERROR


def test_help_exits_cleanly(capsys) -> None:
    assert main(["--help"]) == EXIT_SUCCESS
    assert "scenario" in capsys.readouterr().out
