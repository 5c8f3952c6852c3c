"""
Author: Louis Goodnews
Date: 2025-09-13

Exact special-function layer of the collective risk model.

Inverse Gaussian moment generating function M(z) = E[e^{zR}] with its first
two derivatives, exponentially tilted Poisson moments E[N^k e^{zN}] and the
joint expectations over (R, N) that every closed form downstream consumes.
All functions are pure and work in double precision.
"""

import logging
import math

from typing import Final

from crmcred.core.constants import (
    DEGENERATE_VARIANCE,
    SERIES_MAX_TERMS,
    SERIES_TOLERANCE,
)
from crmcred.core.exceptions import DomainError, ParameterError, RangeError
from crmcred.core.model import CrmModel


__all__: Final[list[str]] = [
    "IgSpec",
    "JointAux",
    "TiltArgument",
    "ig_mean_variance",
    "ig_mgf",
    "ig_mgf_d1",
    "ig_mgf_d2",
    "joint_aux",
    "poisson_tilt_m0",
    "poisson_tilt_m1",
    "poisson_tilt_m2",
    "poisson_tilt_series",
]


logger: Final[logging.Logger] = logging.getLogger(__name__)


class IgSpec(CrmModel):
    """
    Law of an inverse Gaussian random effect with the given mean and variance b.

    b below DEGENERATE_VARIANCE selects the degenerate law R = mean almost
    surely, for which M(z) = e^{mean z}.
    """

    b: float
    mean: float = 1.0

    def _validate(self) -> None:
        # The variance may be zero (degenerate mode) but never negative
        if not math.isfinite(self.b) or self.b < 0.0:
            raise ParameterError(f"IgSpec.b must be a nonnegative finite real, got {self.b}")
        if not math.isfinite(self.mean) or self.mean <= 0.0:
            raise ParameterError(f"IgSpec.mean must be a positive finite real, got {self.mean}")

    @property
    def branch_point(self) -> float:
        """
        Return the largest argument at which M is finite, mean/(2b).

        Returns:
            float: The branch point, infinite in degenerate mode.
        """

        # Return infinity for the degenerate law
        if self.is_degenerate:
            return math.inf

        # Return the root of 1 - 2bz/mean
        return self.mean / (2.0 * self.b)

    @property
    def is_degenerate(self) -> bool:
        """
        Return whether the random effect is treated as a point mass.

        Returns:
            bool: True if b < DEGENERATE_VARIANCE.
        """

        # Return whether the variance is below the degenerate threshold
        return self.b < DEGENERATE_VARIANCE


class TiltArgument(CrmModel):
    """
    Exponential tilt exponent z of a Poisson count with mean rate.
    """

    z: float
    rate: float

    def _validate(self) -> None:
        if not math.isfinite(self.z):
            raise ParameterError(f"TiltArgument.z must be finite, got {self.z}")
        if not math.isfinite(self.rate) or self.rate <= 0.0:
            raise ParameterError(f"TiltArgument.rate must be positive, got {self.rate}")


class JointAux(CrmModel):
    """
    Auxiliary expectations over (R, N) with N | R ~ Poisson(lambda1 R).

    Fields:
        second_moment: E[N^2 e^{zN}]
        tilted_cross: E[N e^{zN} R e^{R lambda1 (e^z - 1)}]
        cross_time: E[N_1 N_2 e^{z(N_1 + N_2)}] for two periods sharing R
        mgf: E[e^{zN}]
        first_moment: E[N e^{zN}]
    """

    second_moment: float
    tilted_cross: float
    cross_time: float
    mgf: float
    first_moment: float


def _exp(value: float) -> float:
    """
    Return e^value, reporting overflow as a RangeError.

    Args:
        value (float): The exponent.

    Returns:
        float: The exponential.

    Raises:
        RangeError: If the result overflows.
    """

    try:
        return math.exp(value)
    except OverflowError as e:
        raise RangeError(f"exp({value}) overflows double precision") from e


def _root(
    z: float,
    spec: IgSpec,
    strict: bool,
) -> float:
    """
    Return sqrt(1 - 2bz/mean) after checking the branch point.

    Args:
        z (float): The MGF argument.
        spec (IgSpec): The random effect law.
        strict (bool): Whether the branch point itself is excluded.

    Returns:
        float: The square root.

    Raises:
        DomainError: If z lies beyond (or, when strict, at) the branch point.
    """

    # Compute the radicand
    radicand: float = 1.0 - 2.0 * spec.b * z / spec.mean

    # Check the branch point
    if radicand < 0.0 or (strict and radicand <= 0.0):
        raise DomainError(
            f"MGF argument z={z} is {'at or ' if strict else ''}beyond the inverse Gaussian "
            f"branch point {spec.branch_point} (b={spec.b})"
        )

    # Return the square root
    return math.sqrt(radicand)


def ig_mgf(
    z: float,
    spec: IgSpec,
) -> float:
    """
    Return M(z) = E[e^{zR}] = exp((mean^2/b)(1 - sqrt(1 - 2bz/mean))).

    The branch point z = mean/(2b) itself is admitted.

    Args:
        z (float): The argument.
        spec (IgSpec): The random effect law.

    Returns:
        float: The moment generating function.

    Raises:
        DomainError: If 1 - 2bz/mean < 0.
        RangeError: On overflow.
    """

    # Degenerate law R = mean
    if spec.is_degenerate:
        return _exp(spec.mean * z)

    # Evaluate the closed form
    root: float = _root(
        spec=spec,
        strict=False,
        z=z,
    )
    # (mean^2/b)(1 - root) rewritten as 2 mean z/(1 + root) to avoid cancellation for small b
    return _exp(2.0 * spec.mean * z / (1.0 + root))


def ig_mgf_d1(
    z: float,
    spec: IgSpec,
) -> float:
    """
    Return M'(z) = E[R e^{zR}] = M(z) mean / sqrt(1 - 2bz/mean).

    Args:
        z (float): The argument, strictly below the branch point.
        spec (IgSpec): The random effect law.

    Returns:
        float: The first derivative.

    Raises:
        DomainError: At or beyond the branch point.
        RangeError: On overflow.
    """

    # Degenerate law R = mean
    if spec.is_degenerate:
        return spec.mean * _exp(spec.mean * z)

    # Evaluate the closed form
    root: float = _root(
        spec=spec,
        strict=True,
        z=z,
    )
    return ig_mgf(z=z, spec=spec) * spec.mean / root


def ig_mgf_d2(
    z: float,
    spec: IgSpec,
) -> float:
    """
    Return M''(z) = E[R^2 e^{zR}] = M'(z) [mean/s + b/(mean s^2)], s = sqrt(1 - 2bz/mean).

    Args:
        z (float): The argument, strictly below the branch point.
        spec (IgSpec): The random effect law.

    Returns:
        float: The second derivative.

    Raises:
        DomainError: At or beyond the branch point.
        RangeError: On overflow.
    """

    # Degenerate law R = mean
    if spec.is_degenerate:
        return spec.mean * spec.mean * _exp(spec.mean * z)

    # Evaluate the closed form
    root: float = _root(
        spec=spec,
        strict=True,
        z=z,
    )
    return ig_mgf_d1(z=z, spec=spec) * (spec.mean / root + spec.b / (spec.mean * root * root))


def ig_mean_variance(spec: IgSpec) -> tuple[float, float]:
    """
    Return the mean and variance of the random effect.

    Args:
        spec (IgSpec): The random effect law.

    Returns:
        tuple[float, float]: (mean, variance), the variance being 0 in degenerate mode.
    """

    return (
        spec.mean,
        0.0 if spec.is_degenerate else spec.b,
    )


def poisson_tilt_m0(arg: TiltArgument) -> float:
    """
    Return E[e^{zN}] = exp(rate (e^z - 1)) for N ~ Poisson(rate).

    Args:
        arg (TiltArgument): The tilt exponent and Poisson mean.

    Returns:
        float: The tilted zeroth moment.

    Raises:
        RangeError: On overflow.
    """

    return _exp(arg.rate * math.expm1(arg.z))


def poisson_tilt_m1(arg: TiltArgument) -> float:
    """
    Return E[N e^{zN}] = rate e^z E[e^{zN}].

    Args:
        arg (TiltArgument): The tilt exponent and Poisson mean.

    Returns:
        float: The tilted first moment.

    Raises:
        RangeError: On overflow.
    """

    return arg.rate * _exp(arg.z) * poisson_tilt_m0(arg=arg)


def poisson_tilt_m2(arg: TiltArgument) -> float:
    """
    Return E[N^2 e^{zN}] = (rate^2 e^{2z} + rate e^z) E[e^{zN}].

    Args:
        arg (TiltArgument): The tilt exponent and Poisson mean.

    Returns:
        float: The tilted second moment.

    Raises:
        RangeError: On overflow.
    """

    # Tilted mean rate e^z
    tilted: float = arg.rate * _exp(arg.z)

    return (tilted * tilted + tilted) * poisson_tilt_m0(arg=arg)


def poisson_tilt_series(
    arg: TiltArgument,
    order: int,
) -> float:
    """
    Sum E[N^order e^{zN}] term by term; the brute-force oracle of the closed forms.

    Terms n^order e^{zn} e^{-rate} rate^n / n! are evaluated in log space.
    Summation stops once past the mode of the tilted weights when a term drops
    below SERIES_TOLERANCE of the running sum, or after SERIES_MAX_TERMS terms.

    Args:
        arg (TiltArgument): The tilt exponent and Poisson mean.
        order (int): The power k of N, 0, 1 or 2.

    Returns:
        float: The series value.

    Raises:
        ParameterError: If the order is not 0, 1 or 2.
    """

    # Check the order
    if order not in (0, 1, 2):
        raise ParameterError(f"order must be 0, 1 or 2, got {order}")

    # Mode of the tilted weights rate^n e^{zn} / n!
    mode: float = arg.rate * math.exp(arg.z)

    # Log of the tilted rate
    log_rate: float = math.log(arg.rate) + arg.z

    # Accumulate the terms with compensated summation
    terms: list[float] = []
    running: float = 0.0
    for n in range(SERIES_MAX_TERMS):
        # Zero is skipped for positive orders as n^k vanishes
        if n == 0 and order > 0:
            continue

        # Evaluate the current term in log space
        term: float = math.exp(
            order * math.log(n if n > 0 else 1) + n * log_rate - arg.rate - math.lgamma(n + 1)
        )
        terms.append(term)
        running += term

        # Stop once past the mode and the terms are negligible
        if n > mode and term < SERIES_TOLERANCE * running:
            break
    else:
        logger.warning(
            "Poisson series truncated at %d terms for z=%s rate=%s",
            SERIES_MAX_TERMS,
            arg.z,
            arg.rate,
        )

    return math.fsum(terms)


def joint_aux(
    z: float,
    lambda1: float,
    spec: IgSpec,
) -> JointAux:
    """
    Return the auxiliary expectations over (R, N) with N | R ~ Poisson(lambda1 R).

    With w = lambda1 (e^z - 1):

    - E[e^{zN}] = M(w)
    - E[N e^{zN}] = lambda1 e^z M'(w)
    - E[N^2 e^{zN}] = lambda1^2 e^{2z} M''(w) + lambda1 e^z M'(w)
    - E[N e^{zN} R e^{R w}] = lambda1 e^z M''(2w)
    - E[N_1 N_2 e^{z(N_1 + N_2)}] = lambda1^2 e^{2z} M''(2w)

    Args:
        z (float): The tilt exponent.
        lambda1 (float): The a priori frequency rate.
        spec (IgSpec): The frequency random effect law.

    Returns:
        JointAux: The five expectations.

    Raises:
        DomainError: If w or 2w lies at or beyond the branch point.
        RangeError: On overflow.
    """

    # Check the frequency rate
    if not math.isfinite(lambda1) or lambda1 <= 0.0:
        raise ParameterError(f"lambda1 must be positive, got {lambda1}")

    # MGF argument of a single period
    w: float = lambda1 * math.expm1(z)

    # Tilted rate lambda1 e^z
    tilted: float = lambda1 * _exp(z)

    # Derivatives at w and 2w
    d1: float = ig_mgf_d1(z=w, spec=spec)
    d2: float = ig_mgf_d2(z=w, spec=spec)
    d2_double: float = ig_mgf_d2(z=2.0 * w, spec=spec)

    logger.debug("joint_aux z=%s lambda1=%s w=%s", z, lambda1, w)

    return JointAux(
        cross_time=tilted * tilted * d2_double,
        first_moment=tilted * d1,
        mgf=ig_mgf(z=w, spec=spec),
        second_moment=tilted * tilted * d2 + tilted * d1,
        tilted_cross=tilted * d2_double,
    )

