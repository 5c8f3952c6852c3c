"""
Author: Louis Goodnews
Date: 2025-09-13

Hypothetical mean-square errors E[(h - Prem)^2] of the two Buhlmann premiums.

Each error is implemented twice: as the full expansion in the premium
coefficients and as the reduced form (a1 v1 / (t a1 + v1) for the aggregate
severity premium, a1 - Z2 a2 for the frequency premium). The reduced forms
are the cross-check of the expansions.
"""

import json
import logging
import math

from concurrent.futures import ThreadPoolExecutor
from typing import Final, Iterable, Optional, Sequence

from crmcred.core.constants import (
    AGGREGATE_SEVERITY,
    DEFAULT_T_MAX,
    FREQUENCY,
    HMSE_CSV_HEADER,
    TIE,
    TIE_TOLERANCE,
)
from crmcred.core.credibility import CredibilityComponents, components_agg, components_freq
from crmcred.core.crm import (
    ModelParams,
    Portfolio,
    cov_aggregate_lag,
    hypothetical_second_moment,
    mean_aggregate,
    var_aggregate,
    zeta,
)
from crmcred.core.exceptions import CrmError, ParameterError, UsageError
from crmcred.core.model import CrmModel
from crmcred.core.momentkit import JointAux, ig_mgf_d1, ig_mgf_d2, joint_aux


__all__: Final[list[str]] = [
    "MseReport",
    "MseRow",
    "build_report",
    "classify",
    "crossover_horizon",
    "hmse_agg_expanded",
    "hmse_agg_simplified",
    "hmse_for",
    "hmse_freq_expanded",
    "hmse_freq_limit",
    "hmse_freq_simplified",
    "recommend",
    "weighted_hmse",
]


logger: Final[logging.Logger] = logging.getLogger(__name__)


# Initialize the relative size of tolerated negative round-off as a module constant
_NEGATIVE_ROUND_OFF: Final[float] = 1e-9

# Initialize the admissible recommendations as a module constant
_RECOMMENDATIONS: Final[tuple[str, ...]] = (
    AGGREGATE_SEVERITY,
    FREQUENCY,
    TIE,
)


def _require_horizon(t: int) -> None:
    if t < 1:
        raise UsageError(f"the mean-square error needs t >= 1, got {t}")


def _clear_round_off(
    value: float,
    scale: float,
) -> float:
    """
    Return a mean-square error, clearing negative round-off.

    Args:
        value (float): The evaluated expansion.
        scale (float): The magnitude of the terms that cancelled.

    Returns:
        float: max(value, 0).

    Raises:
        CrmError: If the value is negative beyond round-off.
    """

    if value >= 0.0:
        return value
    if -value <= _NEGATIVE_ROUND_OFF * scale:
        return 0.0

    raise CrmError(f"mean-square error expansion evaluated to {value}, a transcription defect")


def hmse_agg_expanded(
    params: ModelParams,
    t: int,
) -> float:
    """
    Return the mean-square error of the aggregate severity premium, fully expanded.

    With alpha0 = (1 - Z1) u and alpha1 = Z1 / t:

        E[h^2] + alpha0^2 + t alpha1^2 (var S + u^2) + 2 t alpha0 alpha1 u
        + t (t - 1) alpha1^2 (cov(S_1, S_2) + u^2) - 2 alpha0 u - 2 alpha1 t E[h^2]

    Args:
        params (ModelParams): The model parameters.
        t (int): The horizon, at least 1.

    Returns:
        float: The nonnegative mean-square error.
    """

    _require_horizon(t=t)

    components: CredibilityComponents = components_agg(params=params, t=t)
    u: float = mean_aggregate(params=params)
    alpha0: float = (1.0 - components.z) * u
    alpha1: float = components.z / t
    second: float = hypothetical_second_moment(params=params)

    value: float = (
        second
        + alpha0 * alpha0
        + t * alpha1 * alpha1 * (var_aggregate(params=params) + u * u)
        + 2.0 * t * alpha0 * alpha1 * u
        + t * (t - 1) * alpha1 * alpha1 * (cov_aggregate_lag(params=params) + u * u)
        - 2.0 * alpha0 * u
        - 2.0 * alpha1 * t * second
    )

    return _clear_round_off(
        scale=second,
        value=value,
    )


def hmse_agg_simplified(
    params: ModelParams,
    t: int,
) -> float:
    """
    Return a1 v1 / (t a1 + v1), the reduced mean-square error of the aggregate severity premium.

    Args:
        params (ModelParams): The model parameters.
        t (int): The horizon, at least 1.

    Returns:
        float: The nonnegative mean-square error.
    """

    _require_horizon(t=t)

    components: CredibilityComponents = components_agg(params=params, t=t)
    if components.a == 0.0:
        return 0.0

    return components.a * components.v / (t * components.a + components.v)


def hmse_freq_expanded(
    params: ModelParams,
    t: int,
) -> float:
    """
    Return the mean-square error of the frequency premium, fully expanded.

    With alpha0 = (1 - Z2) u and alpha1 = Z2 / t:

        E[h^2] + alpha0^2 + t alpha1^2 E[S~^2] + 2 t alpha0 alpha1 u
        + t (t - 1) alpha1^2 E[S~_1 S~_2] - 2 alpha0 u - 2 alpha1 t E[S~ h]

    where E[S~_1 S~_2] = E[S~ h] = L^2 e^{2 beta0} M''(2 zeta1). The last term
    is the cross moment of a Buhlmann observation with the hypothetical mean.

    Args:
        params (ModelParams): The model parameters.
        t (int): The horizon, at least 1.

    Returns:
        float: The nonnegative mean-square error.
    """

    _require_horizon(t=t)

    components: CredibilityComponents = components_freq(params=params, t=t)
    u: float = components.u
    alpha0: float = (1.0 - components.z) * u
    alpha1: float = components.z / t
    second: float = hypothetical_second_moment(params=params)

    aux: JointAux = joint_aux(
        lambda1=params.lambda1,
        spec=params.frequency_effect,
        z=params.beta0,
    )
    lambda2_squared: float = params.lambda2 * params.lambda2

    # E[S~^2] = lambda2^2 E[N^2 e^{2 beta0 N}]
    _, zeta2 = zeta(params=params)
    tilted: float = params.lambda1 * math.exp(2.0 * params.beta0)
    d1: float = ig_mgf_d1(z=zeta2, spec=params.frequency_effect)
    observation_square: float = lambda2_squared * (
        tilted * tilted * ig_mgf_d2(z=zeta2, spec=params.frequency_effect) + tilted * d1
    )

    # E[S~_1 S~_2] and E[S~ h]
    observation_cross: float = lambda2_squared * aux.cross_time
    target_cross: float = (
        params.lambda1 * lambda2_squared * math.exp(params.beta0) * aux.tilted_cross
    )

    value: float = (
        second
        + alpha0 * alpha0
        + t * alpha1 * alpha1 * observation_square
        + 2.0 * t * alpha0 * alpha1 * u
        + t * (t - 1) * alpha1 * alpha1 * observation_cross
        - 2.0 * alpha0 * u
        - 2.0 * alpha1 * t * target_cross
    )

    return _clear_round_off(
        scale=second,
        value=value,
    )


def hmse_freq_simplified(
    params: ModelParams,
    t: int,
) -> float:
    """
    Return a1 - Z2 a2, the reduced mean-square error of the frequency premium.

    Args:
        params (ModelParams): The model parameters.
        t (int): The horizon, at least 1.

    Returns:
        float: The nonnegative mean-square error.
    """

    _require_horizon(t=t)

    aggregate: CredibilityComponents = components_agg(params=params, t=t)
    frequency: CredibilityComponents = components_freq(params=params, t=t)

    return max(aggregate.a - frequency.z * frequency.a, 0.0)


def hmse_freq_limit(params: ModelParams) -> float:
    """
    Return the limit of the frequency premium's error as t grows, b2 L^2 e^{2 beta0} M''(2 zeta1).

    The frequency history identifies R1 but never R2, so the error stays
    positive unless the severity random effect is degenerate.

    Args:
        params (ModelParams): The model parameters.

    Returns:
        float: The nonnegative limit, zero iff b2 = 0.
    """

    zeta1, _ = zeta(params=params)
    level: float = params.lambda1 * params.lambda2 * math.exp(params.beta0)

    return params.b2 * level * level * ig_mgf_d2(z=2.0 * zeta1, spec=params.frequency_effect)


def hmse_for(
    params: ModelParams,
    t: int,
    variant: str,
) -> float:
    """
    Return the expanded mean-square error of the named premium variant.

    Args:
        params (ModelParams): The model parameters.
        t (int): The horizon, at least 1.
        variant (str): AggregateSeverity or Frequency.

    Returns:
        float: The mean-square error.

    Raises:
        UsageError: For any other variant.
    """

    if variant == AGGREGATE_SEVERITY:
        return hmse_agg_expanded(params=params, t=t)
    if variant == FREQUENCY:
        return hmse_freq_expanded(params=params, t=t)

    raise UsageError(f"mean-square errors are defined for {AGGREGATE_SEVERITY} and {FREQUENCY}, not '{variant}'")


def weighted_hmse(
    portfolio: Portfolio,
    t: int,
    variant: str,
) -> float:
    """
    Return the portfolio mean-square error, the weighted sum of the per class errors.

    Args:
        portfolio (Portfolio): The weighted risk classes.
        t (int): The horizon, at least 1.
        variant (str): AggregateSeverity or Frequency.

    Returns:
        float: The weighted mean-square error.
    """

    return math.fsum(
        item.weight
        * hmse_for(
            params=item.params,
            t=t,
            variant=variant,
        )
        for item in portfolio.classes
    )


def classify(
    hmse1: float,
    hmse2: float,
) -> str:
    """
    Return the premium with the smaller error, Tie within relative TIE_TOLERANCE.

    Args:
        hmse1 (float): The aggregate severity premium's error.
        hmse2 (float): The frequency premium's error.

    Returns:
        str: AggregateSeverity, Frequency or Tie.
    """

    if abs(hmse1 - hmse2) <= TIE_TOLERANCE * max(abs(hmse1), abs(hmse2)):
        return TIE

    return AGGREGATE_SEVERITY if hmse1 < hmse2 else FREQUENCY


def crossover_horizon(
    params: ModelParams,
    t_max: int = DEFAULT_T_MAX,
) -> Optional[int]:
    """
    Return the smallest horizon whose preferred premium differs from the one at t = 1.

    The scan stops early once the frequency premium's limit exceeds the
    aggregate severity premium's error, beyond which the latter wins for good.

    Args:
        params (ModelParams): The model parameters.
        t_max (int, optional): The last horizon scanned. Defaults to DEFAULT_T_MAX.

    Returns:
        Optional[int]: The crossover horizon, None if the preference never switches.
    """

    if t_max < 1:
        raise UsageError(f"t_max must be at least 1, got {t_max}")

    limit: float = hmse_freq_limit(params=params)
    first: str = classify(
        hmse1=hmse_agg_simplified(params=params, t=1),
        hmse2=hmse_freq_simplified(params=params, t=1),
    )

    for t in range(2, t_max + 1):
        hmse1: float = hmse_agg_simplified(params=params, t=t)

        if limit > hmse1:
            # The aggregate severity premium is preferred from here on
            return t if first != AGGREGATE_SEVERITY else None

        if classify(hmse1=hmse1, hmse2=hmse_freq_simplified(params=params, t=t)) != first:
            return t

    return None


class MseRow(CrmModel):
    """
    Mean-square errors of both premiums for one scenario and horizon.
    """

    beta0: float
    b1: float
    b2: float
    t: int
    hmse1: float
    hmse2: float
    hmse1_simplified: float
    hmse2_simplified: float
    hmse2_limit: float
    recommended: str
    crossover: Optional[int] = None

    def _validate(self) -> None:
        for name in ("hmse1", "hmse2", "hmse1_simplified", "hmse2_simplified", "hmse2_limit"):
            if getattr(self, name) < 0.0:
                raise ParameterError(f"{name} must be nonnegative, got {getattr(self, name)}")
        if self.recommended not in _RECOMMENDATIONS:
            raise ParameterError(f"unknown recommendation '{self.recommended}'")
        if self.recommended != classify(hmse1=self.hmse1, hmse2=self.hmse2):
            raise ParameterError("recommendation does not follow the errors")

    def csv_row(self) -> list[object]:
        """
        Return the row in HMSE_CSV_HEADER order.

        Returns:
            list[object]: beta0, b1, b2, t, hmse1, hmse2, hmse2_limit, recommended.
        """

        return [getattr(self, column) for column in HMSE_CSV_HEADER]


def recommend(
    params: ModelParams,
    t: int,
    t_max: int = DEFAULT_T_MAX,
) -> MseRow:
    """
    Return both errors at horizon t with the preferred premium and the crossover horizon.

    Args:
        params (ModelParams): The model parameters.
        t (int): The horizon, at least 1.
        t_max (int, optional): The crossover scan horizon. Defaults to DEFAULT_T_MAX.

    Returns:
        MseRow: The report row.
    """

    _require_horizon(t=t)

    hmse1: float = hmse_agg_expanded(params=params, t=t)
    hmse2: float = hmse_freq_expanded(params=params, t=t)

    return MseRow(
        b1=params.b1,
        b2=params.b2,
        beta0=params.beta0,
        crossover=crossover_horizon(params=params, t_max=t_max),
        hmse1=hmse1,
        hmse1_simplified=hmse_agg_simplified(params=params, t=t),
        hmse2=hmse2,
        hmse2_limit=hmse_freq_limit(params=params),
        hmse2_simplified=hmse_freq_simplified(params=params, t=t),
        recommended=classify(hmse1=hmse1, hmse2=hmse2),
        t=t,
    )


class MseReport(CrmModel):
    """
    Ordered rows of mean-square errors across scenarios and horizons.
    """

    rows: tuple[MseRow, ...] = ()

    def csv_rows(self) -> list[list[object]]:
        """
        Return the header followed by one row per scenario and horizon.

        Returns:
            list[list[object]]: The CSV rows.
        """

        return [list(HMSE_CSV_HEADER)] + [row.csv_row() for row in self.rows]

    def to_json(self) -> str:
        """
        Return the report as a deterministic JSON document.

        Returns:
            str: The JSON text.
        """

        return json.dumps(
            {"rows": [row.to_dict() for row in self.rows]},
            indent=2,
            sort_keys=True,
        )


def build_report(
    scenarios: Iterable[tuple[ModelParams, Sequence[int]]],
    t_max: int = DEFAULT_T_MAX,
    jobs: int = 1,
) -> MseReport:
    """
    Evaluate every scenario at each of its horizons.

    Scenarios are dispatched to a pool of jobs worker threads; the rows come
    back in input order whatever the pool size.

    Args:
        scenarios (Iterable[tuple[ModelParams, Sequence[int]]]): Parameters with their horizons.
        t_max (int, optional): The crossover scan horizon. Defaults to DEFAULT_T_MAX.
        jobs (int, optional): The number of worker threads. Defaults to 1.

    Returns:
        MseReport: The rows in input order.

    Raises:
        UsageError: If jobs is not positive.
    """

    if jobs < 1:
        raise UsageError(f"jobs must be positive, got {jobs}")

    def evaluate(scenario: tuple[ModelParams, Sequence[int]]) -> list[MseRow]:
        params, horizons = scenario
        return [
            recommend(
                params=params,
                t=t,
                t_max=t_max,
            )
            for t in horizons
        ]

    if jobs == 1:
        batches: list[list[MseRow]] = [evaluate(scenario) for scenario in scenarios]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            batches = list(executor.map(evaluate, scenarios))

    rows: list[MseRow] = [row for batch in batches for row in batch]

    logger.info("built mean-square error report with %d rows on %d threads", len(rows), jobs)

    return MseReport(rows=tuple(rows))
