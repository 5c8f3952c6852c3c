"""
Author: Louis Goodnews
Date: 2025-09-13

Command-line front end.

    crmctl scenario --config GRID.json --out DIR [--published [CSV]] [--n N] [--jobs J] [--scale F]
    crmctl premium --config PARAMS.json --history HISTORY.json [--variant agg|freq|count]
    crmctl verify --config PARAMS.json [--n N] [--seed U64] [--jobs J]
    crmctl recommend --config PARAMS.json [--t-max T] [--json]

Exit codes: 0 success, 1 usage or configuration error, 2 verification
failure, 3 infeasible grid cells.
"""

import argparse
import logging
import sys

from pathlib import Path
from typing import Callable, Final, Optional, Sequence

from crmcred.core.constants import (
    AGGREGATE_SEVERITY,
    DEFAULT_T_MAX,
    EXIT_CONFIG_ERROR,
    EXIT_INFEASIBLE_GRID,
    EXIT_SUCCESS,
    EXIT_VERIFICATION_FAILURE,
    FREQUENCY,
    FREQUENCY_COUNT,
)
from crmcred.core.credibility import PremiumQuote, premium_agg, premium_freq, premium_freq_count
from crmcred.core.crm import ClaimHistory, ModelParams
from crmcred.core.exceptions import CrmError, UsageError
from crmcred.core.loaders import (
    ClaimHistoryLoader,
    ModelParamsLoader,
    PublishedTableLoader,
    ScenarioGridLoader,
    published_table_path,
)
from crmcred.core.reports import CrmReportService, render_json
from crmcred.core.risk_mse import MseReport, build_report
from crmcred.core.scenario import (
    GridExpansion,
    ScenarioGrid,
    asymptotic_rows,
    compare_with_published,
    empirical_rows,
    expand_grid,
    figure_rows,
    hmse_report,
    infeasible_rows,
    summary_table,
)
from crmcred.core.simlab import OracleCheck, RngStream, run_oracle_suite


__all__: Final[list[str]] = [
    "build_parser",
    "cmd_premium",
    "cmd_recommend",
    "cmd_scenario",
    "cmd_verify",
    "main",
]


logger: Final[logging.Logger] = logging.getLogger("crmctl")


# Initialize the premium functions by variant flag as a module constant
PREMIUMS: Final[dict[str, Callable[..., PremiumQuote]]] = {
    "agg": premium_agg,
    "count": premium_freq_count,
    "freq": premium_freq,
}

# Initialize the smallest sample size of a verification run as a module constant
MIN_VERIFY_SAMPLES: Final[int] = 10_000


def _beta_label(beta0: float) -> str:
    # Compact rendering of beta0 for file names, e.g. 0, -0.05
    return f"{beta0:g}"


def cmd_scenario(arguments: argparse.Namespace) -> int:
    """
    Run the scenario study and write its reports.

    Writes hmse.csv, hmse.json, infeasible.csv, figure_beta0_<beta0>.csv for every beta0,
    figure_asymptotic_beta0_<beta0>.csv for the first beta0, and optionally
    comparison_vs_published.csv and empirical.csv. Prints the summary table.

    Args:
        arguments (argparse.Namespace): The parsed arguments.

    Returns:
        int: 0, or 3 when the grid holds infeasible cells.
    """

    # Load the grid and apply the seed override
    grid: ScenarioGrid = ScenarioGridLoader.load(path=arguments.config)
    if arguments.seed is not None:
        grid = grid.replace(seed=arguments.seed)

    # Expand and evaluate the grid
    expansion: GridExpansion = expand_grid(grid=grid)
    report: MseReport = hmse_report(
        expansion=expansion,
        grid=grid,
        jobs=arguments.jobs,
    )

    # Write the reports
    service: CrmReportService = CrmReportService()
    out: Path = arguments.out
    service.publish_csv(
        path=out / "hmse.csv",
        rows=report.csv_rows(),
    )
    service.publish_json(
        path=out / "hmse.json",
        value=report.to_dict(),
    )
    service.publish_csv(
        path=out / "infeasible.csv",
        rows=infeasible_rows(expansion=expansion),
    )

    for beta0 in grid.beta0:
        service.publish_csv(
            path=out / f"figure_beta0_{_beta_label(beta0)}.csv",
            rows=figure_rows(
                beta0=beta0,
                report=report,
            ),
        )

    service.publish_csv(
        path=out / f"figure_asymptotic_beta0_{_beta_label(grid.beta0[0])}.csv",
        rows=asymptotic_rows(
            cells=[cell for cell in expansion.feasible if cell.params.beta0 == grid.beta0[0]],
            t_max=grid.asymptotic_t_max,
        ),
    )

    if arguments.published is not None:
        service.publish_csv(
            path=out / "comparison_vs_published.csv",
            rows=compare_with_published(
                published=PublishedTableLoader.load(path=arguments.published),
                report=report,
            ),
        )

    if arguments.n is not None:
        service.publish_csv(
            path=out / "empirical.csv",
            rows=empirical_rows(
                expansion=expansion,
                grid=grid,
                jobs=arguments.jobs,
                n=arguments.n,
            ),
        )

    # Print the summary table
    sys.stdout.write(
        summary_table(
            report=report,
            scale=arguments.scale,
        )
    )

    if expansion.infeasible:
        logger.warning("%d infeasible grid cells, see infeasible.csv", len(expansion.infeasible))
        return EXIT_INFEASIBLE_GRID

    return EXIT_SUCCESS


def cmd_premium(arguments: argparse.Namespace) -> int:
    """
    Quote a Buhlmann premium for a claim history and print it as JSON.

    Args:
        arguments (argparse.Namespace): The parsed arguments.

    Returns:
        int: 0
    """

    params: ModelParams = ModelParamsLoader.load(path=arguments.config)
    history: ClaimHistory = ClaimHistoryLoader.load(path=arguments.history)

    quote: PremiumQuote = PREMIUMS[arguments.variant](
        history=history,
        params=params,
    )

    sys.stdout.write(render_json(value=quote.to_summary()))

    return EXIT_SUCCESS


def _format_check(check: OracleCheck) -> str:
    # One line of the verification matrix
    return (
        f"{'PASS' if check.passed else 'FAIL'}  {check.name:<34} "
        f"expected={check.expected:<14.6g} estimate={check.estimate:<14.6g} "
        f"z={check.z:>8.3f} tol={check.threshold:.3f}"
    )


def cmd_verify(arguments: argparse.Namespace) -> int:
    """
    Run the Monte Carlo oracle suite and print the pass/fail matrix.

    Args:
        arguments (argparse.Namespace): The parsed arguments.

    Returns:
        int: 0 when every check passes, 2 otherwise.
    """

    if arguments.n < MIN_VERIFY_SAMPLES:
        raise UsageError(f"verification needs --n >= {MIN_VERIFY_SAMPLES}, got {arguments.n}")

    params: ModelParams = ModelParamsLoader.load(path=arguments.config)
    params.check_feasible()

    checks: list[OracleCheck] = run_oracle_suite(
        jobs=arguments.jobs,
        n=arguments.n,
        params=params,
        stream=RngStream(seed=arguments.seed),
    )

    for check in checks:
        sys.stdout.write(_format_check(check=check) + "\n")

    failed: int = sum(not check.passed for check in checks)
    sys.stdout.write(f"{len(checks) - failed} of {len(checks)} checks passed\n")

    return EXIT_VERIFICATION_FAILURE if failed else EXIT_SUCCESS


def cmd_recommend(arguments: argparse.Namespace) -> int:
    """
    Print the preferred premium per horizon, the crossover horizon and the limit of HMSE2.

    Args:
        arguments (argparse.Namespace): The parsed arguments.

    Returns:
        int: 0
    """

    if arguments.t_max < 1:
        raise UsageError(f"--t-max must be at least 1, got {arguments.t_max}")

    params: ModelParams = ModelParamsLoader.load(path=arguments.config)
    params.check_feasible()

    report: MseReport = build_report(
        scenarios=[(params, range(1, arguments.t_max + 1))],
        t_max=arguments.t_max,
    )
    crossover: Optional[int] = report.rows[0].crossover
    limit: float = report.rows[0].hmse2_limit

    if arguments.json:
        sys.stdout.write(
            render_json(
                value={
                    "crossover": crossover,
                    "hmse2_limit": limit,
                    "rows": [
                        {
                            "hmse1": row.hmse1,
                            "hmse2": row.hmse2,
                            "recommended": row.recommended,
                            "t": row.t,
                        }
                        for row in report.rows
                    ],
                }
            )
        )
        return EXIT_SUCCESS

    lines: list[str] = [f"{'t':>4} {'hmse1':>16} {'hmse2':>16}  recommended"]
    lines.extend(
        f"{row.t:>4} {row.hmse1:>16.6g} {row.hmse2:>16.6g}  {row.recommended}" for row in report.rows
    )
    lines.append(f"crossover: {crossover if crossover is not None else 'none'}")
    lines.append(f"hmse2_limit: {limit!r}")
    sys.stdout.write("\n".join(lines) + "\n")

    return EXIT_SUCCESS


def build_parser() -> argparse.ArgumentParser:
    """
    Build the argument parser with one subcommand per operation.

    Returns:
        argparse.ArgumentParser: The parser.
    """

    parser: argparse.ArgumentParser = argparse.ArgumentParser(
        description="Credibility premiums and their mean-square errors for dependent collective risk models.",
        prog="crmctl",
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="log INFO (-v) or DEBUG (-vv) messages to stderr",
    )

    subparsers = parser.add_subparsers(
        dest="command",
        required=True,
    )

    # scenario
    scenario = subparsers.add_parser(
        "scenario",
        help="run the scenario grid and write the HMSE reports",
    )
    scenario.add_argument("--config", type=Path, required=True, help="scenario grid JSON")
    scenario.add_argument("--out", type=Path, required=True, help="output directory")
    scenario.add_argument(
        "--published",
        type=Path,
        nargs="?",
        const=published_table_path(),
        default=None,
        help="published HMSE table CSV (the shipped transcription when no path is given)",
    )
    scenario.add_argument("--n", type=int, default=None, help="policyholders per empirical HMSE estimate")
    scenario.add_argument("--seed", type=int, default=None, help="override the grid's root seed")
    scenario.add_argument("--jobs", type=int, default=1, help="worker threads for scenario cells")
    scenario.add_argument("--scale", type=float, default=1e6, help="divisor of the printed errors")
    scenario.set_defaults(handler=cmd_scenario)

    # premium and its alias
    premium = subparsers.add_parser(
        "premium",
        aliases=["quote"],
        help="quote a premium for a claim history",
    )
    premium.add_argument("--config", type=Path, required=True, help="model parameters JSON")
    premium.add_argument("--history", type=Path, required=True, help="claim history JSON")
    premium.add_argument(
        "--variant",
        choices=sorted(PREMIUMS),
        default="agg",
        help=f"agg: {AGGREGATE_SEVERITY}, freq: {FREQUENCY}, count: {FREQUENCY_COUNT}",
    )
    premium.set_defaults(handler=cmd_premium)

    # verify
    verify = subparsers.add_parser(
        "verify",
        help="check every closed form against the Monte Carlo oracle",
    )
    verify.add_argument("--config", type=Path, required=True, help="model parameters JSON")
    verify.add_argument("--n", type=int, default=1_000_000, help="samples per check")
    verify.add_argument("--seed", type=int, default=0, help="root seed")
    verify.add_argument("--jobs", type=int, default=1, help="simulation worker threads")
    verify.set_defaults(handler=cmd_verify)

    # recommend
    recommend = subparsers.add_parser(
        "recommend",
        help="print the preferred premium per horizon",
    )
    recommend.add_argument("--config", type=Path, required=True, help="model parameters JSON")
    recommend.add_argument("--t-max", type=int, default=DEFAULT_T_MAX, help="last horizon")
    recommend.add_argument("--json", action="store_true", help="emit JSON")
    recommend.set_defaults(handler=cmd_recommend)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run crmctl.

    Args:
        argv (Optional[Sequence[str]], optional): The arguments. Defaults to sys.argv[1:].

    Returns:
        int: The exit code.
    """

    try:
        arguments: argparse.Namespace = build_parser().parse_args(argv)
    except SystemExit as e:
        # argparse exits with 2 on usage errors, which is the verification failure code here
        return EXIT_SUCCESS if e.code in (0, None) else EXIT_CONFIG_ERROR

    logging.basicConfig(
        format="%(levelname)s %(name)s: %(message)s",
        level=(logging.WARNING, logging.INFO, logging.DEBUG)[min(arguments.verbose, 2)],
        stream=sys.stderr,
    )

    try:
        return arguments.handler(arguments)
    except CrmError as e:
        sys.stderr.write(f"crmctl: error: {e}\n")
        return EXIT_CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
