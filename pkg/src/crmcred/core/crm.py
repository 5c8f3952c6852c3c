"""
Author: Louis Goodnews
Date: 2025-09-13

The dependent collective risk model.

Given a priori rates (lambda1, lambda2), a policyholder carries latent unit-mean
random effects R1 ~ IG(1, b1) and R2 ~ Gamma(mean 1, variance b2). Per period
N | R ~ Poisson(lambda1 R1) and, given N, the severities Y_j are i.i.d.
Gamma(mean lambda2 e^{beta0 N} R2, dispersion psi2), i.e. variance psi2 mean^2,
so claim count and severity are coupled through e^{beta0 N}.
"""

import logging
import math

from typing import Final, Iterable, Optional

import numpy as np

from crmcred.core.constants import LOG_LINK, WEIGHT_TOLERANCE
from crmcred.core.exceptions import (
    CalibrationError,
    DomainError,
    HistoryError,
    ParameterError,
)
from crmcred.core.model import CrmModel
from crmcred.core.momentkit import IgSpec, JointAux, ig_mgf, ig_mgf_d1, ig_mgf_d2, joint_aux


__all__: Final[list[str]] = [
    "ClaimHistory",
    "CovariateSpec",
    "ModelParams",
    "Portfolio",
    "RiskClass",
    "a_priori_rate",
    "calibrate_psi",
    "cov_aggregate_lag",
    "cov_freq_severity_cross_period",
    "cov_freq_severity_same_period",
    "cov_frequency_lag",
    "cov_severity_cross_period",
    "cov_severity_same_period",
    "hypothetical_second_moment",
    "mean_aggregate",
    "resolve_rate",
    "var_aggregate",
    "var_individual_severity",
    "zeta",
]


logger: Final[logging.Logger] = logging.getLogger(__name__)


def _positive(
    name: str,
    value: float,
) -> None:
    # Raise a ParameterError unless the value is a positive finite real
    if not math.isfinite(value) or value <= 0.0:
        raise ParameterError(f"{name} must be a positive finite real, got {value}")


def _nonnegative(
    name: str,
    value: float,
) -> None:
    # Raise a ParameterError unless the value is a nonnegative finite real
    if not math.isfinite(value) or value < 0.0:
        raise ParameterError(f"{name} must be a nonnegative finite real, got {value}")


class ModelParams(CrmModel):
    """
    Full parameter record of the frequency-severity model for one risk class.

    Fields:
        lambda1: a priori frequency rate.
        lambda2: a priori severity scale.
        beta0: dependence coefficient of the severity mean on the claim count.
        psi2: gamma severity dispersion, variance = psi2 * mean^2.
        b1: variance of the inverse Gaussian frequency random effect.
        b2: variance of the gamma severity random effect.
    """

    lambda1: float
    lambda2: float
    beta0: float
    psi2: float
    b1: float
    b2: float

    def _validate(self) -> None:
        _positive("lambda1", self.lambda1)
        _positive("lambda2", self.lambda2)
        _positive("psi2", self.psi2)
        _nonnegative("b1", self.b1)
        _nonnegative("b2", self.b2)
        if not math.isfinite(self.beta0):
            raise ParameterError(f"beta0 must be finite, got {self.beta0}")

    @property
    def frequency_effect(self) -> IgSpec:
        """
        Return the law of the frequency random effect R1.

        Returns:
            IgSpec: IG(1, b1).
        """

        return IgSpec(b=self.b1)

    def feasibility_violations(self) -> list[str]:
        """
        Return the names of the violated MGF domain constraints.

        The closed forms evaluate M'' at zeta2 = lambda1 (e^{2 beta0} - 1) and at
        2 zeta1 = 2 lambda1 (e^{beta0} - 1); both must lie strictly below 1/(2 b1).

        Returns:
            list[str]: zeta2_branch_point and/or two_zeta1_branch_point, empty when feasible.
        """

        # Every argument is admissible in degenerate mode
        spec: IgSpec = self.frequency_effect
        if spec.is_degenerate:
            return []

        # Compare both arguments with the branch point
        zeta1, zeta2 = zeta(params=self)
        violations: list[str] = []
        if not zeta2 < spec.branch_point:
            violations.append("zeta2_branch_point")
        if not 2.0 * zeta1 < spec.branch_point:
            violations.append("two_zeta1_branch_point")

        return violations

    def check_feasible(self) -> None:
        """
        Raise a DomainError naming the first violated MGF domain constraint.

        Returns:
            None

        Raises:
            DomainError: If the parameters are infeasible.
        """

        # Get the violated constraints
        violations: list[str] = self.feasibility_violations()

        # Raise a DomainError over the first violation
        if violations:
            raise DomainError(
                f"{violations[0]}: beta0={self.beta0} lambda1={self.lambda1} puts an MGF "
                f"argument at or beyond 1/(2 b1) = {self.frequency_effect.branch_point}"
            )


class CovariateSpec(CrmModel):
    """
    Covariates x and coefficients beta of an a priori rate exp(x . beta).
    """

    covariates: tuple[float, ...]
    coefficients: tuple[float, ...]
    link: str = LOG_LINK

    def _validate(self) -> None:
        if len(self.covariates) != len(self.coefficients):
            raise ParameterError(
                f"covariates and coefficients differ in length: "
                f"{len(self.covariates)} != {len(self.coefficients)}"
            )
        if self.link != LOG_LINK:
            raise ParameterError(f"only the '{LOG_LINK}' link is supported, got '{self.link}'")


class RiskClass(CrmModel):
    """
    A risk class of a portfolio with its weight.
    """

    params: ModelParams
    weight: float

    def _validate(self) -> None:
        if not 0.0 <= self.weight <= 1.0:
            raise ParameterError(f"risk class weight must lie in [0, 1], got {self.weight}")


class Portfolio(CrmModel):
    """
    Ordered collection of risk classes whose weights sum to one.
    """

    classes: tuple[RiskClass, ...]

    def _validate(self) -> None:
        if not self.classes:
            raise ParameterError("a portfolio needs at least one risk class")
        for item in self.classes:
            if not isinstance(item, RiskClass):
                raise TypeError(f"portfolio classes must be RiskClass, got {type(item).__name__}")

        # Weights are validated, never normalized
        total: float = math.fsum(item.weight for item in self.classes)
        if abs(total - 1.0) > WEIGHT_TOLERANCE:
            raise ParameterError(f"risk class weights sum to {total!r}, not 1")


class ClaimHistory(CrmModel):
    """
    Observed (N_t, S_t) pairs of one policyholder, oldest period first.

    A period with no claims carries S_t = 0 and a period with claims S_t > 0.
    The frequency and aggregate projections are the information sets of the
    frequency and the aggregate severity premiums.
    """

    periods: tuple[tuple[int, float], ...] = ()

    def _validate(self) -> None:
        for index, period in enumerate(self.periods):
            if not isinstance(period, (tuple, list)) or len(period) != 2:
                raise HistoryError(f"period {index}: expected an (N, S) pair, got {period!r}")
            frequency, aggregate = period
            if isinstance(frequency, bool) or not isinstance(frequency, (int, np.integer)):
                raise HistoryError(f"period {index}: claim count must be an integer, got {frequency!r}")
            if frequency < 0:
                raise HistoryError(f"period {index}: negative claim count {frequency}")
            if not isinstance(aggregate, (int, float, np.floating, np.integer)) or isinstance(aggregate, bool):
                raise HistoryError(f"period {index}: aggregate must be a real, got {aggregate!r}")
            if not math.isfinite(aggregate) or aggregate < 0.0:
                raise HistoryError(f"period {index}: aggregate must be nonnegative, got {aggregate}")
            if frequency == 0 and aggregate != 0.0:
                raise HistoryError(f"period {index}: S={aggregate} > 0 with N=0")
            if frequency > 0 and aggregate == 0.0:
                raise HistoryError(f"period {index}: S=0 with N={frequency} > 0")

        # Normalize the pairs to (int, float) tuples
        object.__setattr__(
            self,
            "_periods",
            tuple((int(frequency), float(aggregate)) for frequency, aggregate in self.periods),
        )

    @classmethod
    def from_pairs(
        cls,
        pairs: Iterable[tuple[int, float]],
    ) -> "ClaimHistory":
        """
        Build a history from an iterable of (N, S) pairs.

        Args:
            pairs (Iterable[tuple[int, float]]): The periods.

        Returns:
            ClaimHistory: The history.
        """

        return cls(periods=tuple(tuple(pair) for pair in pairs))

    @property
    def horizon(self) -> int:
        """
        Return the number of observed periods t.

        Returns:
            int: The horizon.
        """

        return len(self.periods)

    @property
    def frequencies(self) -> tuple[int, ...]:
        """
        Return the claim counts N_1..N_t, the frequency information set.

        Returns:
            tuple[int, ...]: The claim counts.
        """

        return tuple(frequency for frequency, _ in self.periods)

    @property
    def aggregates(self) -> tuple[float, ...]:
        """
        Return the aggregate claims S_1..S_t, the aggregate information set.

        Returns:
            tuple[float, ...]: The aggregate claims.
        """

        return tuple(aggregate for _, aggregate in self.periods)

    @property
    def average_severities(self) -> tuple[float, ...]:
        """
        Return M_t = S_t / N_t, defined as 0 for claim-free periods.

        Returns:
            tuple[float, ...]: The average severities.
        """

        return tuple(
            aggregate / frequency if frequency > 0 else 0.0
            for frequency, aggregate in self.periods
        )


def a_priori_rate(spec: CovariateSpec) -> float:
    """
    Return the a priori rate exp(x . beta) under the log link.

    Args:
        spec (CovariateSpec): The covariates and coefficients.

    Returns:
        float: The positive a priori rate.
    """

    return float(
        np.exp(
            np.dot(
                np.asarray(spec.covariates, dtype=float),
                np.asarray(spec.coefficients, dtype=float),
            )
        )
    )


def zeta(params: ModelParams) -> tuple[float, float]:
    """
    Return zeta1 = lambda1 (e^{beta0} - 1) and zeta2 = lambda1 (e^{2 beta0} - 1).

    Args:
        params (ModelParams): The model parameters.

    Returns:
        tuple[float, float]: (zeta1, zeta2).
    """

    return (
        params.lambda1 * math.expm1(params.beta0),
        params.lambda1 * math.expm1(2.0 * params.beta0),
    )


def calibrate_psi(
    c: float,
    lambda1: float,
    lambda2: float,
    beta0: float,
    b1: float,
    b2: float,
) -> float:
    """
    Return the severity dispersion psi2 for which var[Y_{t,j}] equals c.

    psi2 = (c / lambda2^2 + M(zeta1)^2) / ((1 + b2) M(zeta2)) - 1.

    Args:
        c (float): The target individual severity variance, in raw currency units squared.
        lambda1 (float): The a priori frequency rate.
        lambda2 (float): The a priori severity scale.
        beta0 (float): The dependence coefficient.
        b1 (float): The frequency random effect variance.
        b2 (float): The severity random effect variance.

    Returns:
        float: The calibrated dispersion.

    Raises:
        CalibrationError: If the result is not positive.
        DomainError: If an MGF argument is infeasible.
    """

    _positive("c", c)
    _positive("lambda1", lambda1)
    _positive("lambda2", lambda2)
    _nonnegative("b1", b1)
    _nonnegative("b2", b2)

    # MGF of the frequency random effect at zeta1 and zeta2
    spec: IgSpec = IgSpec(b=b1)
    m1: float = ig_mgf(z=lambda1 * math.expm1(beta0), spec=spec)
    m2: float = ig_mgf(z=lambda1 * math.expm1(2.0 * beta0), spec=spec)

    psi: float = (c / (lambda2 * lambda2) + m1 * m1) / ((1.0 + b2) * m2) - 1.0

    if not psi > 0.0:
        raise CalibrationError(
            f"c={c} gives a non-positive severity dispersion psi2={psi} "
            f"(beta0={beta0}, b1={b1}, b2={b2}, c/lambda2^2={c / (lambda2 * lambda2)})"
        )

    logger.debug("calibrated psi2=%r for c=%r beta0=%r b1=%r b2=%r", psi, c, beta0, b1, b2)

    return psi


def _aux(
    params: ModelParams,
    z: float,
) -> JointAux:
    # Auxiliary expectations of the frequency side at tilt z
    return joint_aux(
        lambda1=params.lambda1,
        spec=params.frequency_effect,
        z=z,
    )


def _single_period(
    params: ModelParams,
    z: float,
) -> tuple[float, float, float]:
    # E[e^{zN}], E[N e^{zN}] and E[N^2 e^{zN}] of one period, without the two-period terms
    w: float = params.lambda1 * math.expm1(z)
    tilted: float = params.lambda1 * math.exp(z)
    spec: IgSpec = params.frequency_effect
    d1: float = ig_mgf_d1(z=w, spec=spec)

    return (
        ig_mgf(z=w, spec=spec),
        tilted * d1,
        tilted * tilted * ig_mgf_d2(z=w, spec=spec) + tilted * d1,
    )


def mean_aggregate(params: ModelParams) -> float:
    """
    Return E[S_t] = lambda2 E[N e^{beta0 N}].

    Args:
        params (ModelParams): The model parameters.

    Returns:
        float: The collective mean of the aggregate claim.
    """

    return params.lambda2 * _aux(params, params.beta0).first_moment


def var_aggregate(params: ModelParams) -> float:
    """
    Return var[S_t].

    E[S^2] = lambda2^2 (1 + b2) (psi2 E[N e^{2 beta0 N}] + E[N^2 e^{2 beta0 N}]).

    Args:
        params (ModelParams): The model parameters.

    Returns:
        float: The variance of the aggregate claim.
    """

    # Tilt 2 beta0 carries the squared severity means
    _, first, second = _single_period(params, 2.0 * params.beta0)
    mean: float = mean_aggregate(params=params)

    return (
        params.lambda2
        * params.lambda2
        * (1.0 + params.b2)
        * (params.psi2 * first + second)
        - mean * mean
    )


def cov_aggregate_lag(params: ModelParams) -> float:
    """
    Return cov[S_{t1}, S_{t2}] for t1 != t2.

    Args:
        params (ModelParams): The model parameters.

    Returns:
        float: The serial covariance of the aggregate claims.
    """

    aux: JointAux = _aux(params, params.beta0)

    return (
        params.lambda2
        * params.lambda2
        * ((1.0 + params.b2) * aux.cross_time - aux.first_moment * aux.first_moment)
    )


def cov_frequency_lag(params: ModelParams) -> float:
    """
    Return cov[N_{t1}, N_{t2}] = lambda1^2 b1 for t1 != t2.

    Args:
        params (ModelParams): The model parameters.

    Returns:
        float: The serial covariance of the claim counts.
    """

    return params.lambda1 * params.lambda1 * params.frequency_effect.b


def var_individual_severity(params: ModelParams) -> float:
    """
    Return var[Y_{t,j}] = lambda2^2 ((1 + b2)(1 + psi2) E[e^{2 beta0 N}] - E[e^{beta0 N}]^2).

    Args:
        params (ModelParams): The model parameters.

    Returns:
        float: The variance of a single severity.
    """

    single: float = _aux(params, params.beta0).mgf
    doubled: float = ig_mgf(z=zeta(params=params)[1], spec=params.frequency_effect)

    return (
        params.lambda2
        * params.lambda2
        * ((1.0 + params.b2) * (1.0 + params.psi2) * doubled - single * single)
    )


def cov_severity_same_period(params: ModelParams) -> float:
    """
    Return cov[Y_{t,j1}, Y_{t,j2}] for j1 != j2.

    Args:
        params (ModelParams): The model parameters.

    Returns:
        float: The covariance of two severities of one period.
    """

    single: float = _aux(params, params.beta0).mgf
    doubled: float = ig_mgf(z=zeta(params=params)[1], spec=params.frequency_effect)

    return params.lambda2 * params.lambda2 * ((1.0 + params.b2) * doubled - single * single)


def cov_severity_cross_period(params: ModelParams) -> float:
    """
    Return cov[Y_{t1,j1}, Y_{t2,j2}] for t1 != t2.

    Uses E[e^{beta0 (N_1 + N_2)}] = M(2 zeta1).

    Args:
        params (ModelParams): The model parameters.

    Returns:
        float: The covariance of severities of two periods.
    """

    zeta1, _ = zeta(params=params)
    single: float = _aux(params, params.beta0).mgf
    joint: float = ig_mgf(z=2.0 * zeta1, spec=params.frequency_effect)

    return params.lambda2 * params.lambda2 * ((1.0 + params.b2) * joint - single * single)


def cov_freq_severity_same_period(params: ModelParams) -> float:
    """
    Return cov[N_t, Y_{t,j}] = lambda2 (E[N e^{beta0 N}] - lambda1 E[e^{beta0 N}]).

    Args:
        params (ModelParams): The model parameters.

    Returns:
        float: The within-period covariance of count and severity.
    """

    aux: JointAux = _aux(params, params.beta0)

    return params.lambda2 * (aux.first_moment - params.lambda1 * aux.mgf)


def cov_freq_severity_cross_period(params: ModelParams) -> float:
    """
    Return cov[N_{t1}, Y_{t2,j} | R] for t1 != t2, which vanishes identically.

    Periods are independent given the random effects. Without that
    conditioning the covariance is lambda1 lambda2 cov(R1, e^{zeta1 R1}),
    zero only for beta0 = 0 or a degenerate R1.

    Args:
        params (ModelParams): The model parameters.

    Returns:
        float: 0.0
    """

    return 0.0


def hypothetical_second_moment(params: ModelParams) -> float:
    """
    Return E[h^2] for the hypothetical mean h = E[S_{t+1} | R].

    E[h^2] = (1 + b2) lambda2^2 E[N_1 N_2 e^{beta0 (N_1 + N_2)}].

    Args:
        params (ModelParams): The model parameters.

    Returns:
        float: The second moment of the hypothetical mean.
    """

    return (
        (1.0 + params.b2)
        * params.lambda2
        * params.lambda2
        * _aux(params, params.beta0).cross_time
    )


def resolve_rate(
    value: Optional[float] = None,
    spec: Optional[CovariateSpec] = None,
) -> float:
    """
    Return an a priori rate given either directly or through covariates.

    Args:
        value (Optional[float]): The rate itself.
        spec (Optional[CovariateSpec]): The covariates producing the rate.

    Returns:
        float: The rate.

    Raises:
        ParameterError: If neither or both are given.
    """

    if (value is None) == (spec is None):
        raise ParameterError("give an a priori rate either directly or through covariates")

    return a_priori_rate(spec=spec) if spec is not None else float(value)  # type: ignore[arg-type]
