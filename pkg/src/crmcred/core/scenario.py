"""
Author: Louis Goodnews
Date: 2025-09-13

The scenario study: a Cartesian grid over (beta0, b1, b2) at fixed a priori
rates and severity variance c, evaluated over a list of horizons.
"""

import logging
import math

from concurrent.futures import ThreadPoolExecutor
from typing import Final, Iterable, Optional

from crmcred.core.constants import (
    AGGREGATE_SEVERITY,
    COMPARISON_CSV_HEADER,
    DEFAULT_ASYMPTOTIC_T_MAX,
    DEFAULT_SEED,
    DEFAULT_T_MAX,
    EMPIRICAL_CSV_HEADER,
    FIGURE_CSV_HEADER,
    FREQUENCY,
    INFEASIBLE_CSV_HEADER,
)
from crmcred.core.crm import ModelParams, calibrate_psi
from crmcred.core.exceptions import CalibrationError, DomainError, ParameterError, RangeError, UsageError
from crmcred.core.model import CrmModel
from crmcred.core.risk_mse import (
    MseReport,
    MseRow,
    build_report,
    classify,
    hmse_agg_expanded,
    hmse_freq_expanded,
)
from crmcred.core.simlab import RngStream, SimEstimate, empirical_premium_mse
from crmcred.utils.utils import derive_seed


__all__: Final[list[str]] = [
    "GridExpansion",
    "InfeasibleCell",
    "PublishedCell",
    "PublishedTable",
    "ScenarioCell",
    "ScenarioGrid",
    "asymptotic_rows",
    "compare_with_published",
    "empirical_rows",
    "expand_grid",
    "figure_rows",
    "hmse_report",
    "infeasible_rows",
    "summary_table",
]


logger: Final[logging.Logger] = logging.getLogger(__name__)


# Initialize the constraint name of a failed dispersion calibration as a module constant
PSI_CALIBRATION: Final[str] = "psi_calibration"

# Initialize the constraint name of an infeasible calibration argument as a module constant
ZETA2_BRANCH_POINT: Final[str] = "zeta2_branch_point"

# Initialize the constraint name of an overflowing closed form as a module constant
DOUBLE_RANGE: Final[str] = "double_range"


def _floats(
    name: str,
    values: tuple[object, ...],
) -> tuple[float, ...]:
    # Check a non-empty list of finite reals and widen integers
    if not values:
        raise ParameterError(f"ScenarioGrid.{name} must not be empty")
    result: list[float] = []
    for value in values:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ParameterError(f"ScenarioGrid.{name} holds a non-real entry {value!r}")
        result.append(float(value))
    return tuple(result)


class ScenarioGrid(CrmModel):
    """
    The scenario study configuration.

    Fields:
        lambda1, lambda2: the a priori rates shared by every cell.
        c: the individual severity variance every cell's psi2 is calibrated to.
        beta0, b1, b2: the grid axes.
        t: the horizons evaluated per cell.
        seed: the root seed of the Monte Carlo runs.
        t_max: the crossover scan horizon.
        asymptotic_t_max: the last horizon of the long-run figure series.
    """

    lambda1: float
    lambda2: float
    c: float
    beta0: tuple[float, ...]
    b1: tuple[float, ...]
    b2: tuple[float, ...]
    t: tuple[int, ...]
    seed: int = DEFAULT_SEED
    t_max: int = DEFAULT_T_MAX
    asymptotic_t_max: int = DEFAULT_ASYMPTOTIC_T_MAX

    def _validate(self) -> None:
        for name in ("lambda1", "lambda2", "c"):
            value: float = getattr(self, name)
            if not math.isfinite(value) or value <= 0.0:
                raise ParameterError(f"ScenarioGrid.{name} must be a positive finite real, got {value}")

        for name in ("beta0", "b1", "b2"):
            object.__setattr__(self, f"_{name}", _floats(name, getattr(self, name)))

        if not self.t:
            raise ParameterError("ScenarioGrid.t must not be empty")
        for value in self.t:
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ParameterError(f"ScenarioGrid.t holds an invalid horizon {value!r}")

        if self.t_max < 1 or self.asymptotic_t_max < 1:
            raise ParameterError("t_max and asymptotic_t_max must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ParameterError(f"seed must be an unsigned 64-bit integer, got {self.seed}")

    @property
    def cardinality(self) -> int:
        """
        Return the number of (beta0, b1, b2) cells.

        Returns:
            int: The size of the Cartesian product.
        """

        return len(self.beta0) * len(self.b1) * len(self.b2)


class ScenarioCell(CrmModel):
    """
    A feasible grid cell with its position in the expansion order.
    """

    index: int
    params: ModelParams


class InfeasibleCell(CrmModel):
    """
    A grid cell rejected with the name of the violated constraint.
    """

    index: int
    beta0: float
    b1: float
    b2: float
    constraint: str
    message: str


class GridExpansion(CrmModel):
    """
    The cells of a grid, split into feasible and infeasible ones.
    """

    feasible: tuple[ScenarioCell, ...] = ()
    infeasible: tuple[InfeasibleCell, ...] = ()


def _expand_cell(
    grid: ScenarioGrid,
    index: int,
    beta0: float,
    b1: float,
    b2: float,
) -> ScenarioCell | InfeasibleCell:
    """
    Calibrate one cell and check its MGF domain.

    Args:
        grid (ScenarioGrid): The grid.
        index (int): The cell index.
        beta0 (float): The dependence coefficient.
        b1 (float): The frequency random effect variance.
        b2 (float): The severity random effect variance.

    Returns:
        ScenarioCell | InfeasibleCell: The feasible cell or the rejection.
    """

    def reject(constraint: str, message: str) -> InfeasibleCell:
        logger.warning("infeasible cell beta0=%r b1=%r b2=%r: %s", beta0, b1, b2, message)
        return InfeasibleCell(
            b1=b1,
            b2=b2,
            beta0=beta0,
            constraint=constraint,
            index=index,
            message=message,
        )

    try:
        psi2: float = calibrate_psi(
            b1=b1,
            b2=b2,
            beta0=beta0,
            c=grid.c,
            lambda1=grid.lambda1,
            lambda2=grid.lambda2,
        )
    except CalibrationError as e:
        return reject(PSI_CALIBRATION, str(e))
    except RangeError as e:
        return reject(DOUBLE_RANGE, str(e))
    except DomainError as e:
        return reject(ZETA2_BRANCH_POINT, str(e))

    params: ModelParams = ModelParams(
        b1=b1,
        b2=b2,
        beta0=beta0,
        lambda1=grid.lambda1,
        lambda2=grid.lambda2,
        psi2=psi2,
    )

    violations: list[str] = params.feasibility_violations()
    if violations:
        return reject(
            ";".join(violations),
            f"MGF argument at or beyond the branch point {params.frequency_effect.branch_point}",
        )

    return ScenarioCell(
        index=index,
        params=params,
    )


def expand_grid(grid: ScenarioGrid) -> GridExpansion:
    """
    Expand the grid in (beta0, b2, b1) order, the row-major layout of the HMSE table.

    Infeasible cells are reported, never dropped silently.

    Args:
        grid (ScenarioGrid): The grid.

    Returns:
        GridExpansion: The feasible and infeasible cells.
    """

    feasible: list[ScenarioCell] = []
    infeasible: list[InfeasibleCell] = []
    index: int = 0

    for beta0 in grid.beta0:
        for b2 in grid.b2:
            for b1 in grid.b1:
                cell = _expand_cell(
                    b1=b1,
                    b2=b2,
                    beta0=beta0,
                    grid=grid,
                    index=index,
                )
                if isinstance(cell, ScenarioCell):
                    feasible.append(cell)
                else:
                    infeasible.append(cell)
                index += 1

    logger.info(
        "expanded %d scenarios: %d feasible, %d infeasible",
        grid.cardinality,
        len(feasible),
        len(infeasible),
    )

    return GridExpansion(
        feasible=tuple(feasible),
        infeasible=tuple(infeasible),
    )


def hmse_report(
    expansion: GridExpansion,
    grid: ScenarioGrid,
    jobs: int = 1,
) -> MseReport:
    """
    Evaluate every feasible cell at every horizon of the grid.

    Args:
        expansion (GridExpansion): The expanded grid.
        grid (ScenarioGrid): The grid.
        jobs (int, optional): The number of worker threads cells are dispatched to. Defaults to 1.

    Returns:
        MseReport: One row per feasible cell and horizon, in cell order.
    """

    return build_report(
        jobs=jobs,
        scenarios=[(cell.params, grid.t) for cell in expansion.feasible],
        t_max=grid.t_max,
    )


def infeasible_rows(expansion: GridExpansion) -> list[list[object]]:
    """
    Return the infeasible cell report.

    Args:
        expansion (GridExpansion): The expanded grid.

    Returns:
        list[list[object]]: The header followed by (beta0, b1, b2, constraint, message) rows.
    """

    return [list(INFEASIBLE_CSV_HEADER)] + [
        [cell.beta0, cell.b1, cell.b2, cell.constraint, cell.message]
        for cell in expansion.infeasible
    ]


class PublishedCell(CrmModel):
    """
    One transcribed cell of the published HMSE table, in raw units.
    """

    beta0: float
    b1: float
    b2: float
    t: int
    hmse1: float
    hmse2: float


class PublishedTable(CrmModel):
    """
    The transcribed published HMSE table.
    """

    cells: tuple[PublishedCell, ...] = ()

    def lookup(
        self,
        beta0: float,
        b1: float,
        b2: float,
        t: int,
    ) -> Optional[PublishedCell]:
        """
        Return the published cell of a scenario and horizon.

        Args:
            beta0 (float): The dependence coefficient.
            b1 (float): The frequency random effect variance.
            b2 (float): The severity random effect variance.
            t (int): The horizon.

        Returns:
            Optional[PublishedCell]: The cell, None if the table does not hold it.
        """

        for cell in self.cells:
            if (
                cell.t == t
                and math.isclose(cell.beta0, beta0, abs_tol=1e-12)
                and math.isclose(cell.b1, b1, abs_tol=1e-12)
                and math.isclose(cell.b2, b2, abs_tol=1e-12)
            ):
                return cell

        return None


def compare_with_published(
    report: MseReport,
    published: PublishedTable,
) -> list[list[object]]:
    """
    Compare computed errors with the published ones, cell by cell.

    Rows of the report without a published counterpart are skipped.

    Args:
        report (MseReport): The computed report.
        published (PublishedTable): The transcribed table.

    Returns:
        list[list[object]]: The header followed by one comparison row per matched cell.
    """

    rows: list[list[object]] = [list(COMPARISON_CSV_HEADER)]
    matches: int = 0

    for row in report.rows:
        cell: Optional[PublishedCell] = published.lookup(
            b1=row.b1,
            b2=row.b2,
            beta0=row.beta0,
            t=row.t,
        )
        if cell is None:
            continue

        published_order: str = classify(hmse1=cell.hmse1, hmse2=cell.hmse2)
        matches += published_order == row.recommended
        rows.append(
            [
                row.beta0,
                row.b1,
                row.b2,
                row.t,
                cell.hmse1,
                cell.hmse2,
                row.hmse1,
                row.hmse2,
                (row.hmse1 - cell.hmse1) / cell.hmse1,
                (row.hmse2 - cell.hmse2) / cell.hmse2,
                published_order,
                row.recommended,
                published_order == row.recommended,
            ]
        )

    logger.info("published orderings reproduced in %d of %d cells", matches, len(rows) - 1)

    return rows


def figure_rows(
    report: MseReport,
    beta0: float,
) -> list[list[object]]:
    """
    Return the HMSE curves of one beta0, panels ordered by (b2, b1) and t along the x-axis.

    Args:
        report (MseReport): The computed report.
        beta0 (float): The dependence coefficient of the figure.

    Returns:
        list[list[object]]: The header followed by (b1, b2, t, hmse1, hmse2) rows.
    """

    selected: list[MseRow] = sorted(
        (row for row in report.rows if row.beta0 == beta0),
        key=lambda row: (row.b2, row.b1, row.t),
    )

    return [list(FIGURE_CSV_HEADER)] + [
        [row.b1, row.b2, row.t, row.hmse1, row.hmse2] for row in selected
    ]


def asymptotic_rows(
    cells: Iterable[ScenarioCell],
    t_max: int,
) -> list[list[object]]:
    """
    Return the HMSE curves over t = 1..t_max for the long-run figure.

    Args:
        cells (Iterable[ScenarioCell]): The cells of one beta0.
        t_max (int): The last horizon.

    Returns:
        list[list[object]]: The header followed by (b1, b2, t, hmse1, hmse2) rows.
    """

    rows: list[list[object]] = [list(FIGURE_CSV_HEADER)]
    for cell in sorted(cells, key=lambda item: (item.params.b2, item.params.b1)):
        for t in range(1, t_max + 1):
            rows.append(
                [
                    cell.params.b1,
                    cell.params.b2,
                    t,
                    hmse_agg_expanded(params=cell.params, t=t),
                    hmse_freq_expanded(params=cell.params, t=t),
                ]
            )

    return rows


def empirical_rows(
    expansion: GridExpansion,
    grid: ScenarioGrid,
    n: int,
    jobs: int = 1,
) -> list[list[object]]:
    """
    Return Monte Carlo mean-square errors of both premiums for every feasible cell and horizon.

    Cell i draws from the stream seeded with seed XOR hash(i), so adding or
    removing cells leaves the draws of the others unchanged. Cells are
    dispatched to a pool of jobs worker threads and each cell simulates its
    blocks serially; the rows do not depend on jobs.

    Args:
        expansion (GridExpansion): The expanded grid.
        grid (ScenarioGrid): The grid, providing the horizons and the root seed.
        n (int): The number of policyholders per estimate.
        jobs (int, optional): The number of worker threads. Defaults to 1.

    Returns:
        list[list[object]]: The header followed by one row per cell and horizon.

    Raises:
        UsageError: If jobs is not positive.
    """

    if jobs < 1:
        raise UsageError(f"jobs must be positive, got {jobs}")

    def cell_rows(cell: ScenarioCell) -> list[list[object]]:
        seed: int = derive_seed(seed=grid.seed, index=cell.index)
        result: list[list[object]] = []
        for t in grid.t:
            estimates: list[SimEstimate] = [
                empirical_premium_mse(
                    jobs=1,
                    n=n,
                    params=cell.params,
                    stream=RngStream(seed=seed, stream=2 * t + offset),
                    t=t,
                    variant=variant,
                )
                for offset, variant in enumerate((AGGREGATE_SEVERITY, FREQUENCY))
            ]
            result.append(
                [
                    cell.params.beta0,
                    cell.params.b1,
                    cell.params.b2,
                    t,
                    estimates[0].value,
                    estimates[0].std_error,
                    estimates[1].value,
                    estimates[1].std_error,
                ]
            )
        return result

    if jobs == 1:
        batches: list[list[list[object]]] = [cell_rows(cell) for cell in expansion.feasible]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            batches = list(executor.map(cell_rows, expansion.feasible))

    return [list(EMPIRICAL_CSV_HEADER)] + [row for batch in batches for row in batch]


def summary_table(
    report: MseReport,
    scale: float = 1e6,
) -> str:
    """
    Render the report as a fixed-width table, one line per cell and premium.

    Args:
        report (MseReport): The computed report.
        scale (float, optional): The divisor of every error. Defaults to 1e6.

    Returns:
        str: The table text.
    """

    if not scale > 0.0:
        raise ParameterError(f"scale must be positive, got {scale}")

    cells: dict[tuple[float, float, float], list[MseRow]] = {}
    for row in report.rows:
        cells.setdefault((row.beta0, row.b2, row.b1), []).append(row)

    horizons: list[int] = sorted({row.t for row in report.rows})
    lines: list[str] = [
        f"{'beta0':>7} {'b2':>5} {'b1':>5} {'':>5} "
        + " ".join(f"{f't={t}':>9}" for t in horizons)
    ]

    for (beta0, b2, b1), rows in cells.items():
        by_t: dict[int, MseRow] = {row.t: row for row in rows}
        for label in ("hmse1", "hmse2"):
            lines.append(
                f"{beta0:>7g} {b2:>5g} {b1:>5g} {'H' + label[-1]:>5} "
                + " ".join(
                    f"{getattr(by_t[t], label) / scale:>9.4f}" if t in by_t else f"{'':>9}"
                    for t in horizons
                )
            )

    return "\n".join(lines) + "\n"
