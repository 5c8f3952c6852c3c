"""
Author: Louis Goodnews
Date: 2025-09-13

Buhlmann premiums of the dependent collective risk model.

Two linear premiums predict the hypothetical mean h = E[S_{t+1} | R]: the
aggregate severity premium credibility-weights the observed aggregates S_k,
the frequency premium credibility-weights the Buhlmann observations
S~_k = lambda2 N_k e^{beta0 N_k} built from the claim counts alone. Under
independence (beta0 = 0) the frequency premium is lambda2 times the
classical Buhlmann premium of the claim counts.
"""

import logging
import math

from typing import Final, Union

import numpy as np
import numpy.typing as npt
import scipy.linalg

from crmcred.core.constants import (
    AGGREGATE_SEVERITY,
    BLP_MODES,
    BLP_STATED,
    BLP_TOLERANCE,
    CONDITION_LIMIT,
    FREQUENCY,
    FREQUENCY_COUNT,
)
from crmcred.core.crm import (
    ClaimHistory,
    ModelParams,
    cov_aggregate_lag,
    hypothetical_second_moment,
    mean_aggregate,
    var_aggregate,
    zeta,
)
from crmcred.core.exceptions import CrmError, ParameterError, SingularSystemError, UsageError
from crmcred.core.model import CrmModel
from crmcred.core.momentkit import IgSpec, ig_mgf_d1, ig_mgf_d2, joint_aux


__all__: Final[list[str]] = [
    "CredibilityComponents",
    "CredibilityComponentsFactory",
    "PremiumQuote",
    "blp_oracle",
    "buhlmann_observation",
    "coefficients",
    "components_agg",
    "components_for",
    "components_freq",
    "components_freq_count",
    "hypothetical_mean",
    "premium_agg",
    "premium_freq",
    "premium_freq_count",
]


logger: Final[logging.Logger] = logging.getLogger(__name__)


# Initialize the relative size below which a structural variance is round-off as a module constant
_ROUND_OFF: Final[float] = 1e-12

# Initialize the admissible premium variants as a module constant
_VARIANTS: Final[tuple[str, ...]] = (
    AGGREGATE_SEVERITY,
    FREQUENCY,
    FREQUENCY_COUNT,
)

# A scalar or an array of draws
ArrayOrFloat = Union[float, npt.NDArray[np.float64]]


def _credibility_factor(
    t: int,
    a: float,
    v: float,
) -> float:
    # Z = t a / (t a + v), zero without experience or heterogeneity
    if t == 0 or a == 0.0:
        return 0.0
    return t * a / (t * a + v)


class CredibilityComponents(CrmModel):
    """
    Structural parameters of one premium variant at horizon t.

    Fields:
        u: collective mean.
        v: expected process variance.
        a: variance of the hypothetical means.
        z: credibility factor t a / (t a + v).
        t: number of observed periods.
        variant: AggregateSeverity, Frequency or FrequencyCount.
    """

    u: float
    v: float
    a: float
    z: float
    t: int
    variant: str

    def _validate(self) -> None:
        if self.variant not in _VARIANTS:
            raise ParameterError(f"unknown premium variant '{self.variant}'")
        if self.t < 0:
            raise ParameterError(f"horizon must be nonnegative, got {self.t}")
        if self.a < 0.0 or self.v < 0.0:
            raise ParameterError(f"structural variances must be nonnegative, got a={self.a} v={self.v}")
        if self.z != _credibility_factor(self.t, self.a, self.v) or not 0.0 <= self.z < 1.0:
            raise ParameterError(f"credibility factor {self.z} inconsistent with t, a and v")


class CredibilityComponentsFactory:
    """
    A factory class for creating CredibilityComponents instances.
    """

    @classmethod
    def create(
        cls,
        u: float,
        v: float,
        a: float,
        t: int,
        variant: str,
    ) -> CredibilityComponents:
        """
        Create components, deriving the credibility factor and clearing round-off.

        Structural variances within _ROUND_OFF * u^2 of zero are set to zero, as
        the degenerate random effects produce differences of equal exponentials.

        Args:
            u (float): The collective mean.
            v (float): The expected process variance.
            a (float): The variance of the hypothetical means.
            t (int): The horizon.
            variant (str): The premium variant.

        Returns:
            CredibilityComponents: The components.
        """

        # Clear round-off around zero
        scale: float = _ROUND_OFF * max(u * u, 1.0)
        if abs(a) <= scale:
            a = 0.0
        if abs(v) <= scale:
            v = 0.0

        return CredibilityComponents(
            a=a,
            t=t,
            u=u,
            v=v,
            variant=variant,
            z=_credibility_factor(t, a, v),
        )


class PremiumQuote(CrmModel):
    """
    A Buhlmann premium z * observation_mean + (1 - z) * u.
    """

    premium: float
    components: CredibilityComponents
    observation_mean: float

    def _validate(self) -> None:
        z: float = self.components.z
        if self.premium != z * self.observation_mean + (1.0 - z) * self.components.u:
            raise ParameterError("premium is not the credibility-weighted mean")
        if self.premium < 0.0:
            raise CrmError(f"negative premium {self.premium}")

    @property
    def coefficients(self) -> tuple[float, float]:
        """
        Return (alpha0, alpha_shared) of the premium, (u, 0) without experience.

        Returns:
            tuple[float, float]: The intercept and the common weight of each period.
        """

        if self.components.t == 0:
            return (self.components.u, 0.0)
        return coefficients(components=self.components)

    def to_summary(self) -> dict[str, object]:
        """
        Return the quote as a flat JSON-ready dictionary.

        Returns:
            dict[str, object]: variant, t, premium, z, u, v, a, coefficients, observation_mean.
        """

        return {
            "a": self.components.a,
            "coefficients": list(self.coefficients),
            "observation_mean": self.observation_mean,
            "premium": self.premium,
            "t": self.components.t,
            "u": self.components.u,
            "v": self.components.v,
            "variant": self.components.variant,
            "z": self.components.z,
        }


def hypothetical_mean(
    params: ModelParams,
    r1: ArrayOrFloat,
    r2: ArrayOrFloat,
) -> ArrayOrFloat:
    """
    Return h = E[S_{t+1} | R] = lambda1 lambda2 r1 r2 e^{beta0} exp(lambda1 r1 (e^{beta0} - 1)).

    Broadcasts over arrays of random effect draws.

    Args:
        params (ModelParams): The model parameters.
        r1 (ArrayOrFloat): The frequency random effect.
        r2 (ArrayOrFloat): The severity random effect.

    Returns:
        ArrayOrFloat: The hypothetical mean, a float for scalar arguments.
    """

    r1_array: npt.NDArray[np.float64] = np.asarray(r1, dtype=float)
    value: npt.NDArray[np.float64] = (
        params.lambda1
        * params.lambda2
        * math.exp(params.beta0)
        * r1_array
        * np.asarray(r2, dtype=float)
        * np.exp(params.lambda1 * math.expm1(params.beta0) * r1_array)
    )

    return float(value) if value.ndim == 0 else value


def buhlmann_observation(
    n: Union[int, npt.NDArray[np.int64]],
    params: ModelParams,
) -> ArrayOrFloat:
    """
    Return the Buhlmann observation S~ = lambda2 n e^{beta0 n}, zero for n = 0.

    Args:
        n (Union[int, npt.NDArray[np.int64]]): The claim count(s).
        params (ModelParams): The model parameters.

    Returns:
        ArrayOrFloat: The observation, a float for a scalar count.
    """

    counts: npt.NDArray[np.float64] = np.asarray(n, dtype=float)
    if np.any(counts < 0):
        raise ParameterError("claim counts must be nonnegative")

    value: npt.NDArray[np.float64] = params.lambda2 * counts * np.exp(params.beta0 * counts)

    return float(value) if value.ndim == 0 else value


def components_agg(
    params: ModelParams,
    t: int,
) -> CredibilityComponents:
    """
    Return the components of the aggregate severity premium.

    With L = lambda1 lambda2 and e = e^{beta0}:

    - u1 = L e M'(zeta1)
    - a1 = L^2 e^2 [(1 + b2) M''(2 zeta1) - M'(zeta1)^2]
    - v1 = lambda1 lambda2^2 e^2 (1 + b2) [(1 + psi2) M'(zeta2) + lambda1 e^2 M''(zeta2) - lambda1 M''(2 zeta1)]

    Args:
        params (ModelParams): The model parameters.
        t (int): The horizon.

    Returns:
        CredibilityComponents: The components.

    Raises:
        DomainError: If an MGF argument is infeasible.
    """

    spec: IgSpec = params.frequency_effect
    zeta1, zeta2 = zeta(params=params)
    level: float = params.lambda1 * params.lambda2 * math.exp(params.beta0)
    e2: float = math.exp(2.0 * params.beta0)

    d1: float = ig_mgf_d1(z=zeta1, spec=spec)
    d2_joint: float = ig_mgf_d2(z=2.0 * zeta1, spec=spec)

    u: float = level * d1
    a: float = level * level * ((1.0 + params.b2) * d2_joint - d1 * d1)
    v: float = (
        params.lambda1
        * params.lambda2
        * params.lambda2
        * e2
        * (1.0 + params.b2)
        * (
            (1.0 + params.psi2) * ig_mgf_d1(z=zeta2, spec=spec)
            + params.lambda1 * e2 * ig_mgf_d2(z=zeta2, spec=spec)
            - params.lambda1 * d2_joint
        )
    )

    return CredibilityComponentsFactory.create(
        a=a,
        t=t,
        u=u,
        v=v,
        variant=AGGREGATE_SEVERITY,
    )


def components_freq(
    params: ModelParams,
    t: int,
) -> CredibilityComponents:
    """
    Return the components of the frequency premium.

    - u2 = L e M'(zeta1), equal to u1
    - a2 = L^2 e^2 [M''(2 zeta1) - M'(zeta1)^2]
    - v2 = lambda1 lambda2^2 e^2 [lambda1 e^2 M''(zeta2) + M'(zeta2) - lambda1 M''(2 zeta1)]

    Args:
        params (ModelParams): The model parameters.
        t (int): The horizon.

    Returns:
        CredibilityComponents: The components.

    Raises:
        DomainError: If an MGF argument is infeasible.
    """

    spec: IgSpec = params.frequency_effect
    zeta1, zeta2 = zeta(params=params)
    level: float = params.lambda1 * params.lambda2 * math.exp(params.beta0)
    e2: float = math.exp(2.0 * params.beta0)

    d1: float = ig_mgf_d1(z=zeta1, spec=spec)
    d2_joint: float = ig_mgf_d2(z=2.0 * zeta1, spec=spec)

    u: float = level * d1
    a: float = level * level * (d2_joint - d1 * d1)
    v: float = (
        params.lambda1
        * params.lambda2
        * params.lambda2
        * e2
        * (
            params.lambda1 * e2 * ig_mgf_d2(z=zeta2, spec=spec)
            + ig_mgf_d1(z=zeta2, spec=spec)
            - params.lambda1 * d2_joint
        )
    )

    return CredibilityComponentsFactory.create(
        a=a,
        t=t,
        u=u,
        v=v,
        variant=FREQUENCY,
    )


def _require_independence(params: ModelParams) -> None:
    # The claim count premium links to the frequency premium only when beta0 = 0
    if params.beta0 != 0.0:
        raise UsageError(
            f"the frequency count premium requires beta0 = 0 (independence), got {params.beta0}"
        )


def components_freq_count(
    params: ModelParams,
    t: int,
) -> CredibilityComponents:
    """
    Return the components of the classical Buhlmann premium of the claim counts.

    a = var[E[N | R]] = lambda1^2 b1, v = E[var[N | R]] = lambda1, u = lambda1.

    Args:
        params (ModelParams): The model parameters, with beta0 = 0.
        t (int): The horizon.

    Returns:
        CredibilityComponents: The components, in claim-count units.

    Raises:
        UsageError: If beta0 != 0.
    """

    _require_independence(params=params)

    return CredibilityComponentsFactory.create(
        a=params.lambda1 * params.lambda1 * params.b1,
        t=t,
        u=params.lambda1,
        v=params.lambda1,
        variant=FREQUENCY_COUNT,
    )


def components_for(
    params: ModelParams,
    t: int,
    variant: str,
) -> CredibilityComponents:
    """
    Return the components of the named premium variant.

    Args:
        params (ModelParams): The model parameters.
        t (int): The horizon.
        variant (str): AggregateSeverity, Frequency or FrequencyCount.

    Returns:
        CredibilityComponents: The components.

    Raises:
        UsageError: If the variant is unknown.
    """

    if variant == AGGREGATE_SEVERITY:
        return components_agg(params=params, t=t)
    if variant == FREQUENCY:
        return components_freq(params=params, t=t)
    if variant == FREQUENCY_COUNT:
        return components_freq_count(params=params, t=t)

    raise UsageError(f"unknown premium variant '{variant}'")


def coefficients(components: CredibilityComponents) -> tuple[float, float]:
    """
    Return the premium coefficients alpha0 = (1 - Z) u and alpha_1 = ... = alpha_t = Z / t.

    Args:
        components (CredibilityComponents): The components at horizon t >= 1.

    Returns:
        tuple[float, float]: (alpha0, alpha_shared).

    Raises:
        UsageError: If t < 1.
    """

    if components.t < 1:
        raise UsageError(f"coefficients need at least one observed period, got t={components.t}")

    alpha0: float = (1.0 - components.z) * components.u
    shared: float = components.z / components.t

    # Unbiasedness: alpha0 + t alpha_shared u = u
    if not math.isclose(
        alpha0 + components.t * shared * components.u,
        components.u,
        rel_tol=BLP_TOLERANCE,
        abs_tol=BLP_TOLERANCE,
    ):
        raise CrmError("premium coefficients are not unbiased")

    return (
        alpha0,
        shared,
    )


def _quote(
    components: CredibilityComponents,
    observations: list[float],
) -> PremiumQuote:
    # Convex combination of the observation mean and the collective mean
    observation_mean: float = math.fsum(observations) / len(observations) if observations else 0.0

    return PremiumQuote(
        components=components,
        observation_mean=observation_mean,
        premium=components.z * observation_mean + (1.0 - components.z) * components.u,
    )


def premium_agg(
    history: ClaimHistory,
    params: ModelParams,
) -> PremiumQuote:
    """
    Return the aggregate severity premium Z1 mean(S) + (1 - Z1) u1.

    An empty history yields the collective premium u1.

    Args:
        history (ClaimHistory): The claim history.
        params (ModelParams): The model parameters.

    Returns:
        PremiumQuote: The quote.
    """

    return _quote(
        components=components_agg(params=params, t=history.horizon),
        observations=list(history.aggregates),
    )


def premium_freq(
    history: ClaimHistory,
    params: ModelParams,
) -> PremiumQuote:
    """
    Return the frequency premium Z2 mean(S~) + (1 - Z2) u2, using the claim counts only.

    Args:
        history (ClaimHistory): The claim history.
        params (ModelParams): The model parameters.

    Returns:
        PremiumQuote: The quote.
    """

    return _quote(
        components=components_freq(params=params, t=history.horizon),
        observations=[
            float(buhlmann_observation(n=frequency, params=params))
            for frequency in history.frequencies
        ],
    )


def premium_freq_count(
    history: ClaimHistory,
    params: ModelParams,
) -> PremiumQuote:
    """
    Return the Buhlmann premium of the claim counts Z* mean(N) + (1 - Z*) lambda1.

    Args:
        history (ClaimHistory): The claim history.
        params (ModelParams): The model parameters, with beta0 = 0.

    Returns:
        PremiumQuote: The quote, in claim-count units.

    Raises:
        UsageError: If beta0 != 0.
    """

    return _quote(
        components=components_freq_count(params=params, t=history.horizon),
        observations=[float(frequency) for frequency in history.frequencies],
    )


def _normal_equations(
    params: ModelParams,
    variant: str,
    mode: str,
) -> tuple[float, float, float, float, float]:
    """
    Return the second-order structure of one observation process.

    Args:
        params (ModelParams): The model parameters.
        variant (str): The premium variant.
        mode (str): stated or target.

    Returns:
        tuple[float, float, float, float, float]: (variance of one observation,
        covariance of two observations, covariance of an observation with the
        predicted quantity, mean of an observation, mean of the predicted quantity).
    """

    zeta1, _ = zeta(params=params)
    u: float = mean_aggregate(params=params)

    if variant == AGGREGATE_SEVERITY:
        # E[S_k h] = E[h^2], the same in both modes
        return (
            var_aggregate(params=params),
            cov_aggregate_lag(params=params),
            hypothetical_second_moment(params=params) - u * u,
            u,
            u,
        )

    if variant == FREQUENCY:
        components: CredibilityComponents = components_freq(params=params, t=1)
        if mode == BLP_STATED:
            cross: float = components.a
        else:
            # E[S~ h] = lambda1 lambda2^2 e^{beta0} E[N e^{beta0 N} R1 e^{R1 zeta1}]
            tilted: float = joint_aux(
                lambda1=params.lambda1,
                spec=params.frequency_effect,
                z=params.beta0,
            ).tilted_cross
            cross = (
                params.lambda1 * params.lambda2 * params.lambda2 * math.exp(params.beta0) * tilted
                - u * components.u
            )
        return (
            components.a + components.v,
            components.a,
            cross,
            components.u,
            u,
        )

    # Claim counts
    components = components_freq_count(params=params, t=1)
    if mode == BLP_STATED:
        return (
            components.a + components.v,
            components.a,
            components.a,
            components.u,
            components.u,
        )

    # E[N h] = lambda1^2 lambda2 e^{beta0} M''(zeta1)
    moment: float = (
        params.lambda1
        * params.lambda1
        * params.lambda2
        * math.exp(params.beta0)
        * ig_mgf_d2(z=zeta1, spec=params.frequency_effect)
    )
    return (
        components.a + components.v,
        components.a,
        moment - components.u * u,
        components.u,
        u,
    )


def blp_oracle(
    params: ModelParams,
    t: int,
    variant: str,
    mode: str = BLP_STATED,
) -> npt.NDArray[np.float64]:
    """
    Solve the normal equations of the best linear unbiased predictor numerically.

    The observations X_1..X_t (S, S~ or N by variant) are exchangeable, so the
    Gram matrix is a J + v I. In stated mode the predicted quantity is the
    observation process's own hypothetical mean, in target mode it is
    E[S_{t+1} | R]. The intercept follows from unbiasedness.

    Args:
        params (ModelParams): The model parameters.
        t (int): The horizon, at least 1.
        variant (str): AggregateSeverity, Frequency or FrequencyCount.
        mode (str, optional): stated or target. Defaults to stated.

    Returns:
        npt.NDArray[np.float64]: (alpha0, alpha_1, ..., alpha_t).

    Raises:
        SingularSystemError: If the Gram matrix is numerically singular.
        UsageError: If t < 1, the variant or the mode is unknown.
    """

    if t < 1:
        raise UsageError(f"the normal equations need t >= 1, got {t}")
    if variant not in _VARIANTS:
        raise UsageError(f"unknown premium variant '{variant}'")
    if mode not in BLP_MODES:
        raise UsageError(f"unknown oracle mode '{mode}', expected one of {BLP_MODES}")
    if variant == FREQUENCY_COUNT:
        _require_independence(params=params)

    variance, covariance, cross, observation_mean, target_mean = _normal_equations(
        mode=mode,
        params=params,
        variant=variant,
    )

    # Gram matrix of the exchangeable observations
    gram: npt.NDArray[np.float64] = np.full((t, t), covariance) + np.eye(t) * (
        variance - covariance
    )
    rhs: npt.NDArray[np.float64] = np.full(t, cross)

    condition: float = float(np.linalg.cond(gram))
    logger.debug("normal equations %s/%s t=%d condition=%.3e", variant, mode, t, condition)
    if not math.isfinite(condition) or condition > CONDITION_LIMIT:
        raise SingularSystemError(
            f"Gram matrix of the {variant} observations is singular at t={t}",
            condition_number=condition,
        )

    try:
        weights: npt.NDArray[np.float64] = scipy.linalg.solve(
            gram,
            rhs,
            assume_a="pos",
        )
    except (np.linalg.LinAlgError, ValueError) as e:
        raise SingularSystemError(
            f"Gram matrix of the {variant} observations is not positive definite at t={t}",
            condition_number=condition,
        ) from e

    intercept: float = target_mean - math.fsum(weights * observation_mean)

    return np.concatenate(([intercept], weights))
