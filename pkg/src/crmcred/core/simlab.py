"""
Author: Louis Goodnews
Date: 2025-09-13

Monte Carlo oracle of the dependent collective risk model.

Policyholders are simulated exactly: R1 ~ IG(1, b1) by the transformation with
rejection of Michael, Schucany and Haas, R2 ~ Gamma(shape 1/b2, scale b2),
N | R ~ Poisson(lambda1 R1) and S | N, R ~ Gamma(N/psi2, psi2 lambda2 e^{beta0 N} R2),
the sum of N gamma severities. Work is split into fixed blocks of
policyholders, each drawing from its own generator, so results do not depend
on the number of worker threads.
"""

import logging
import math

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Final, Optional, TypeVar, Union

import numpy as np
import numpy.typing as npt
import scipy.stats

from crmcred.core.constants import (
    AGGREGATE_SEVERITY,
    DEFAULT_CHUNK_SIZE,
    DEFAULT_MAX_PANEL_CELLS,
    DEGENERATE_VARIANCE,
    FREQUENCY,
    FREQUENCY_COUNT,
    KS_ALPHA,
    PANEL_CSV_HEADER,
    Z_THRESHOLD,
)
from crmcred.core.credibility import (
    CredibilityComponents,
    buhlmann_observation,
    components_for,
    hypothetical_mean,
)
from crmcred.core.crm import (
    ClaimHistory,
    ModelParams,
    cov_aggregate_lag,
    cov_freq_severity_cross_period,
    cov_freq_severity_same_period,
    cov_frequency_lag,
    cov_severity_cross_period,
    cov_severity_same_period,
    mean_aggregate,
    var_aggregate,
    var_individual_severity,
)
from crmcred.core.exceptions import ParameterError, SimulationSizeError, UsageError
from crmcred.core.model import CrmModel
from crmcred.core.momentkit import IgSpec, ig_mgf
from crmcred.core.risk_mse import hmse_agg_expanded, hmse_freq_expanded


__all__: Final[list[str]] = [
    "EquivalenceResult",
    "MomentSample",
    "OracleCheck",
    "Panel",
    "PeriodDraw",
    "RngStream",
    "SimEstimate",
    "average_severity_equivalence_test",
    "empirical_premium_mean",
    "empirical_premium_mse",
    "estimate_moments",
    "run_oracle_suite",
    "sample_gamma_effect",
    "sample_ig",
    "sample_period",
    "simulate_moment_sample",
    "simulate_policyholders",
    "z_threshold",
]


logger: Final[logging.Logger] = logging.getLogger(__name__)


# Initialize the largest unsigned 64-bit integer as a module constant
_U64_MAX: Final[int] = 2**64 - 1

# Initialize the smallest sample size of the empirical mean-square error as a module constant
_MIN_MSE_SAMPLES: Final[int] = 10_000

# Initialize the coefficient of the two-sample KS critical value at the 1% level as a module constant
_KS_COEFFICIENT: Final[float] = 1.628

# Initialize the sample size from which the z threshold is not widened as a module constant
_FULL_SIZE: Final[int] = 1_000_000

# Initialize the horizons of the empirical mean-square error checks as a module constant
_CHECK_HORIZONS: Final[tuple[int, ...]] = (
    1,
    5,
    10,
)

# Initialize the horizon of the vanishing frequency error check as a module constant
_VANISHING_HORIZON: Final[int] = 50

T = TypeVar("T")

FloatArray = npt.NDArray[np.float64]
IntArray = npt.NDArray[np.int64]


class RngStream(CrmModel):
    """
    A reproducible family of generators identified by (seed, stream).

    Block k of the stream draws from PCG64 seeded with
    SeedSequence(seed, spawn_key=(stream, k)), so distinct streams and blocks
    never share state.
    """

    seed: int
    stream: int = 0

    def _validate(self) -> None:
        for name in ("seed", "stream"):
            value: int = getattr(self, name)
            if not 0 <= value <= _U64_MAX:
                raise ParameterError(f"RngStream.{name} must be an unsigned 64-bit integer, got {value}")

    def generator(self, block: int = 0) -> np.random.Generator:
        """
        Return the generator of the given block.

        Args:
            block (int, optional): The block index. Defaults to 0.

        Returns:
            np.random.Generator: A fresh generator, identical for identical (seed, stream, block).
        """

        return np.random.default_rng(
            np.random.SeedSequence(
                entropy=self.seed,
                spawn_key=(
                    self.stream,
                    block,
                ),
            )
        )


class SimEstimate(CrmModel):
    """
    A Monte Carlo estimate with its standard error sd / sqrt(n).
    """

    value: float
    std_error: float
    n: int

    def _validate(self) -> None:
        if not self.std_error >= 0.0:
            raise ParameterError(f"std_error must be nonnegative, got {self.std_error}")
        if self.n < 1:
            raise ParameterError(f"n must be positive, got {self.n}")

    @classmethod
    def from_samples(cls, samples: npt.ArrayLike) -> "SimEstimate":
        """
        Estimate the mean of i.i.d. samples.

        Args:
            samples (npt.ArrayLike): The samples.

        Returns:
            SimEstimate: The sample mean and its standard error.
        """

        values: FloatArray = np.asarray(samples, dtype=float).ravel()
        n: int = int(values.size)
        if n == 0:
            raise ParameterError("cannot estimate from an empty sample")

        mean: float = math.fsum(values) / n
        std_error: float = (
            float(np.sqrt(math.fsum((values - mean) ** 2) / (n - 1) / n)) if n > 1 else 0.0
        )

        return cls(
            n=n,
            std_error=std_error,
            value=mean,
        )

    def z_score(self, expected: float) -> float:
        """
        Return (value - expected) / std_error.

        Args:
            expected (float): The closed-form value.

        Returns:
            float: The z-score, 0 for an exact match without sampling noise.
        """

        difference: float = self.value - expected
        if self.std_error == 0.0:
            return 0.0 if math.isclose(self.value, expected, rel_tol=1e-12, abs_tol=1e-12) else math.inf
        return difference / self.std_error


class PeriodDraw(CrmModel):
    """
    One simulated period: count, individual severities, aggregate and average severity.
    """

    count: int
    severities: tuple[float, ...]
    aggregate: float
    average: float


def sample_ig(
    spec: IgSpec,
    rng: np.random.Generator,
    size: Optional[int] = None,
) -> Union[float, FloatArray]:
    """
    Draw inverse Gaussian variates with the given mean and variance.

    With shape lambda = mean^3 / b, one chi-square(1) draw y gives the smaller
    root x1 = mean / (1 + w + sqrt(w (w + 2))), w = mean y / (2 lambda), which
    is kept with probability mean / (mean + x1) and replaced by mean^2 / x1
    otherwise.

    Args:
        spec (IgSpec): The law, degenerate laws returning the mean.
        rng (np.random.Generator): The generator.
        size (Optional[int], optional): The number of draws, None for a scalar. Defaults to None.

    Returns:
        Union[float, FloatArray]: Strictly positive draws.
    """

    mean: float = spec.mean
    if spec.is_degenerate:
        return mean if size is None else np.full(size, mean)

    shape: float = mean**3 / spec.b
    y: FloatArray = rng.standard_normal(size) ** 2
    w: FloatArray = mean * y / (2.0 * shape)
    x1: FloatArray = mean / (1.0 + w + np.sqrt(w * (w + 2.0)))
    u: FloatArray = rng.uniform(size=size)
    draws: FloatArray = np.where(u <= mean / (mean + x1), x1, mean * mean / x1)

    return float(draws) if size is None else draws


def sample_gamma_effect(
    b: float,
    rng: np.random.Generator,
    size: Optional[int] = None,
) -> Union[float, FloatArray]:
    """
    Draw unit-mean gamma variates with variance b, i.e. shape 1/b and scale b.

    Args:
        b (float): The variance, values below DEGENERATE_VARIANCE returning 1.
        rng (np.random.Generator): The generator.
        size (Optional[int], optional): The number of draws, None for a scalar. Defaults to None.

    Returns:
        Union[float, FloatArray]: The draws.
    """

    if b < DEGENERATE_VARIANCE:
        return 1.0 if size is None else np.ones(size)

    draws = rng.gamma(shape=1.0 / b, scale=b, size=size)

    return float(draws) if size is None else draws


def sample_period(
    params: ModelParams,
    r1: float,
    r2: float,
    rng: np.random.Generator,
) -> PeriodDraw:
    """
    Draw one period given the random effects.

    Args:
        params (ModelParams): The model parameters.
        r1 (float): The frequency random effect.
        r2 (float): The severity random effect.
        rng (np.random.Generator): The generator.

    Returns:
        PeriodDraw: N, the severities Y_1..Y_N, S = sum Y and M = S / N (0 when N = 0).
    """

    if r1 <= 0.0 or r2 <= 0.0:
        raise ParameterError(f"random effects must be positive, got r1={r1}, r2={r2}")

    count: int = int(rng.poisson(params.lambda1 * r1))
    mean: float = params.lambda2 * math.exp(params.beta0 * count) * r2
    severities: tuple[float, ...] = tuple(
        float(value)
        for value in rng.gamma(
            shape=1.0 / params.psi2,
            scale=params.psi2 * mean,
            size=count,
        )
    )
    aggregate: float = math.fsum(severities)

    return PeriodDraw(
        aggregate=aggregate,
        average=aggregate / count if count else 0.0,
        count=count,
        severities=severities,
    )


class Panel:
    """
    Simulated claim histories of n policyholders over t periods.

    Only (N, S) and the drawn random effects are kept, never the individual severities.
    """

    def __init__(
        self,
        counts: IntArray,
        aggregates: FloatArray,
        r1: FloatArray,
        r2: FloatArray,
    ) -> None:
        """
        Initialize the panel.

        Args:
            counts (IntArray): The (n, t) claim counts.
            aggregates (FloatArray): The (n, t) aggregate claims.
            r1 (FloatArray): The n frequency random effects.
            r2 (FloatArray): The n severity random effects.

        Returns:
            None
        """

        if counts.shape != aggregates.shape or counts.ndim != 2:
            raise ParameterError("counts and aggregates must be (n, t) arrays of equal shape")
        if r1.shape != (counts.shape[0],) or r2.shape != (counts.shape[0],):
            raise ParameterError("one pair of random effects per policyholder is required")

        self._counts: IntArray = counts
        self._aggregates: FloatArray = aggregates
        self._r1: FloatArray = r1
        self._r2: FloatArray = r2

    @property
    def aggregates(self) -> FloatArray:
        return self._aggregates

    @property
    def counts(self) -> IntArray:
        return self._counts

    @property
    def horizon(self) -> int:
        return int(self._counts.shape[1])

    @property
    def n(self) -> int:
        return int(self._counts.shape[0])

    @property
    def r1(self) -> FloatArray:
        return self._r1

    @property
    def r2(self) -> FloatArray:
        return self._r2

    def csv_rows(self) -> list[list[object]]:
        """
        Return the panel in long format, one row per policyholder and period.

        Returns:
            list[list[object]]: The header followed by (policyholder_id, t, N, S) rows.
        """

        rows: list[list[object]] = [list(PANEL_CSV_HEADER)]
        for index in range(self.n):
            for period in range(self.horizon):
                rows.append(
                    [
                        index,
                        period + 1,
                        int(self._counts[index, period]),
                        float(self._aggregates[index, period]),
                    ]
                )

        return rows

    def history(self, index: int) -> ClaimHistory:
        """
        Return the claim history of one policyholder.

        Args:
            index (int): The policyholder index.

        Returns:
            ClaimHistory: The (N_t, S_t) pairs.
        """

        return ClaimHistory.from_pairs(
            zip(
                (int(value) for value in self._counts[index]),
                (float(value) for value in self._aggregates[index]),
            )
        )

    def observations(
        self,
        params: ModelParams,
        variant: str,
    ) -> FloatArray:
        """
        Return the (n, t) observations the named premium credibility-weights.

        Args:
            params (ModelParams): The model parameters.
            variant (str): AggregateSeverity, Frequency or FrequencyCount.

        Returns:
            FloatArray: S, S~ = lambda2 N e^{beta0 N} or N.
        """

        if variant == AGGREGATE_SEVERITY:
            return self._aggregates
        if variant == FREQUENCY:
            return np.asarray(buhlmann_observation(n=self._counts, params=params), dtype=float)
        if variant == FREQUENCY_COUNT:
            return self._counts.astype(float)

        raise UsageError(f"unknown premium variant '{variant}'")

    def premiums(
        self,
        params: ModelParams,
        variant: str,
    ) -> FloatArray:
        """
        Return each policyholder's premium Z mean(observations) + (1 - Z) u.

        Args:
            params (ModelParams): The model parameters.
            variant (str): The premium variant.

        Returns:
            FloatArray: The n premiums.
        """

        components: CredibilityComponents = components_for(
            params=params,
            t=self.horizon,
            variant=variant,
        )
        means: FloatArray = self.observations(params=params, variant=variant).mean(axis=1)

        return components.z * means + (1.0 - components.z) * components.u

    def targets(
        self,
        params: ModelParams,
        variant: str,
    ) -> FloatArray:
        """
        Return each policyholder's prediction target at the drawn random effects.

        Args:
            params (ModelParams): The model parameters.
            variant (str): The premium variant.

        Returns:
            FloatArray: h(r1, r2), or lambda1 r1 for the claim-count premium.
        """

        if variant == FREQUENCY_COUNT:
            return params.lambda1 * self._r1

        return np.asarray(hypothetical_mean(params=params, r1=self._r1, r2=self._r2), dtype=float)


def _map_blocks(
    function: Callable[[int, int], T],
    n: int,
    chunk_size: int,
    jobs: int,
) -> list[T]:
    """
    Apply a function to every (block index, block size) in block order.

    Args:
        function (Callable[[int, int], T]): The per-block work.
        n (int): The total number of units.
        chunk_size (int): The units per block.
        jobs (int): The number of worker threads.

    Returns:
        list[T]: The block results, ordered by block index.
    """

    if chunk_size < 1 or jobs < 1:
        raise UsageError(f"chunk_size and jobs must be positive, got {chunk_size} and {jobs}")

    sizes: list[int] = [min(chunk_size, n - start) for start in range(0, n, chunk_size)]
    logger.debug("simulating %d units in %d blocks on %d threads", n, len(sizes), jobs)

    if jobs == 1 or len(sizes) == 1:
        return [function(block, size) for block, size in enumerate(sizes)]

    with ThreadPoolExecutor(max_workers=jobs) as executor:
        return list(executor.map(function, range(len(sizes)), sizes))


def _simulate_block(
    params: ModelParams,
    t: int,
    rng: np.random.Generator,
    size: int,
) -> Panel:
    # Random effects once per policyholder, then t conditionally i.i.d. periods
    r1: FloatArray = np.asarray(sample_ig(spec=params.frequency_effect, rng=rng, size=size))
    r2: FloatArray = np.asarray(sample_gamma_effect(b=params.b2, rng=rng, size=size))
    counts: IntArray = rng.poisson(lam=params.lambda1 * r1[:, None], size=(size, t))

    # The sum of N gamma severities with a common scale is Gamma(N / psi2, scale)
    aggregates: FloatArray = np.zeros((size, t))
    claims = counts > 0
    scale: FloatArray = params.psi2 * params.lambda2 * np.exp(params.beta0 * counts) * r2[:, None]
    aggregates[claims] = rng.gamma(shape=counts[claims] / params.psi2, scale=scale[claims])

    return Panel(
        aggregates=aggregates,
        counts=counts,
        r1=r1,
        r2=r2,
    )


def _require_size(
    n: int,
    t: int,
) -> None:
    if n < 1 or t < 1:
        raise UsageError(f"simulation needs n >= 1 and t >= 1, got n={n}, t={t}")


def simulate_policyholders(
    params: ModelParams,
    t: int,
    n: int,
    stream: RngStream,
    jobs: int = 1,
    max_cells: int = DEFAULT_MAX_PANEL_CELLS,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> Panel:
    """
    Simulate a panel of n policyholders over t periods.

    Args:
        params (ModelParams): The model parameters.
        t (int): The horizon.
        n (int): The number of policyholders.
        stream (RngStream): The random stream.
        jobs (int, optional): The number of worker threads. Defaults to 1.
        max_cells (int, optional): The cap on n * t. Defaults to DEFAULT_MAX_PANEL_CELLS.
        chunk_size (int, optional): The policyholders per block. Defaults to DEFAULT_CHUNK_SIZE.

    Returns:
        Panel: The panel, identical for identical (params, t, n, stream, chunk_size).

    Raises:
        SimulationSizeError: If n * t exceeds max_cells.
    """

    _require_size(n=n, t=t)
    if n * t > max_cells:
        raise SimulationSizeError(f"a panel of {n} x {t} cells exceeds the cap of {max_cells}")

    blocks: list[Panel] = _map_blocks(
        chunk_size=chunk_size,
        function=lambda block, size: _simulate_block(
            params=params,
            rng=stream.generator(block=block),
            size=size,
            t=t,
        ),
        jobs=jobs,
        n=n,
    )

    return Panel(
        aggregates=np.concatenate([block.aggregates for block in blocks]),
        counts=np.concatenate([block.counts for block in blocks]),
        r1=np.concatenate([block.r1 for block in blocks]),
        r2=np.concatenate([block.r2 for block in blocks]),
    )


def _premium_samples(
    params: ModelParams,
    t: int,
    n: int,
    variant: str,
    stream: RngStream,
    jobs: int,
    chunk_size: int,
    statistic: Callable[[Panel], FloatArray],
) -> SimEstimate:
    # Evaluate a per-policyholder statistic block by block without keeping the panel
    _require_size(n=n, t=t)
    components_for(params=params, t=t, variant=variant)

    samples: list[FloatArray] = _map_blocks(
        chunk_size=chunk_size,
        function=lambda block, size: statistic(
            _simulate_block(
                params=params,
                rng=stream.generator(block=block),
                size=size,
                t=t,
            )
        ),
        jobs=jobs,
        n=n,
    )

    return SimEstimate.from_samples(np.concatenate(samples))


def empirical_premium_mse(
    params: ModelParams,
    t: int,
    n: int,
    variant: str,
    stream: RngStream,
    jobs: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> SimEstimate:
    """
    Estimate E[(h - Prem)^2] by simulating n policyholders.

    Args:
        params (ModelParams): The model parameters.
        t (int): The horizon.
        n (int): The number of policyholders, at least 10^4.
        variant (str): The premium variant.
        stream (RngStream): The random stream.
        jobs (int, optional): The number of worker threads. Defaults to 1.
        chunk_size (int, optional): The policyholders per block. Defaults to DEFAULT_CHUNK_SIZE.

    Returns:
        SimEstimate: The empirical mean-square error.
    """

    if n < _MIN_MSE_SAMPLES:
        raise UsageError(f"the empirical mean-square error needs n >= {_MIN_MSE_SAMPLES}, got {n}")

    return _premium_samples(
        chunk_size=chunk_size,
        jobs=jobs,
        n=n,
        params=params,
        statistic=lambda panel: (
            panel.targets(params=params, variant=variant)
            - panel.premiums(params=params, variant=variant)
        )
        ** 2,
        stream=stream,
        t=t,
        variant=variant,
    )


def empirical_premium_mean(
    params: ModelParams,
    t: int,
    n: int,
    variant: str,
    stream: RngStream,
    jobs: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> SimEstimate:
    """
    Estimate the mean premium, which equals u for an unbiased premium.

    Args:
        params (ModelParams): The model parameters.
        t (int): The horizon.
        n (int): The number of policyholders.
        variant (str): The premium variant.
        stream (RngStream): The random stream.
        jobs (int, optional): The number of worker threads. Defaults to 1.
        chunk_size (int, optional): The policyholders per block. Defaults to DEFAULT_CHUNK_SIZE.

    Returns:
        SimEstimate: The empirical mean premium.
    """

    return _premium_samples(
        chunk_size=chunk_size,
        jobs=jobs,
        n=n,
        params=params,
        statistic=lambda panel: panel.premiums(params=params, variant=variant),
        stream=stream,
        t=t,
        variant=variant,
    )


class MomentSample:
    """
    Two simulated periods per unit with the first severities of each period.

    Severities Y_{t,1}, Y_{t,2} are drawn for every unit from their law given
    N_t, whether or not the claims occurred; S_t uses them for the first two
    claims. The drawn random effects are kept for the conditional checks.
    """

    def __init__(
        self,
        counts: IntArray,
        aggregates: FloatArray,
        severities: FloatArray,
        r1: FloatArray,
        r2: FloatArray,
    ) -> None:
        """
        Initialize the sample.

        Args:
            counts (IntArray): The (n, 2) claim counts.
            aggregates (FloatArray): The (n, 2) aggregate claims.
            severities (FloatArray): The (n, 2, 2) severities Y_{t,j}.
            r1 (FloatArray): The n frequency random effects.
            r2 (FloatArray): The n severity random effects.

        Returns:
            None
        """

        self.counts: IntArray = counts
        self.aggregates: FloatArray = aggregates
        self.severities: FloatArray = severities
        self.r1: FloatArray = r1
        self.r2: FloatArray = r2

    @property
    def n(self) -> int:
        return int(self.counts.shape[0])


def _moment_block(
    params: ModelParams,
    rng: np.random.Generator,
    size: int,
) -> MomentSample:
    r1: FloatArray = np.asarray(sample_ig(spec=params.frequency_effect, rng=rng, size=size))
    r2: FloatArray = np.asarray(sample_gamma_effect(b=params.b2, rng=rng, size=size))
    counts: IntArray = rng.poisson(lam=params.lambda1 * r1[:, None], size=(size, 2))
    scale: FloatArray = params.psi2 * params.lambda2 * np.exp(params.beta0 * counts) * r2[:, None]

    severities: FloatArray = rng.gamma(
        shape=1.0 / params.psi2,
        scale=scale[:, :, None],
        size=(size, 2, 2),
    )

    # Claims beyond the second enter through one gamma remainder
    remainder_counts: IntArray = np.maximum(counts - 2, 0)
    remainder: FloatArray = np.zeros((size, 2))
    extra = remainder_counts > 0
    remainder[extra] = rng.gamma(shape=remainder_counts[extra] / params.psi2, scale=scale[extra])

    aggregates: FloatArray = (
        severities[:, :, 0] * (counts >= 1) + severities[:, :, 1] * (counts >= 2) + remainder
    )

    return MomentSample(
        aggregates=aggregates,
        counts=counts,
        r1=r1,
        r2=r2,
        severities=severities,
    )


def simulate_moment_sample(
    params: ModelParams,
    n: int,
    stream: RngStream,
    jobs: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> MomentSample:
    """
    Simulate n units over two periods for the moment checks.

    Args:
        params (ModelParams): The model parameters.
        n (int): The number of units.
        stream (RngStream): The random stream.
        jobs (int, optional): The number of worker threads. Defaults to 1.
        chunk_size (int, optional): The units per block. Defaults to DEFAULT_CHUNK_SIZE.

    Returns:
        MomentSample: The sample.
    """

    _require_size(n=n, t=2)

    blocks: list[MomentSample] = _map_blocks(
        chunk_size=chunk_size,
        function=lambda block, size: _moment_block(
            params=params,
            rng=stream.generator(block=block),
            size=size,
        ),
        jobs=jobs,
        n=n,
    )

    return MomentSample(
        aggregates=np.concatenate([block.aggregates for block in blocks]),
        counts=np.concatenate([block.counts for block in blocks]),
        r1=np.concatenate([block.r1 for block in blocks]),
        r2=np.concatenate([block.r2 for block in blocks]),
        severities=np.concatenate([block.severities for block in blocks]),
    )


def _covariance(
    x: FloatArray,
    y: FloatArray,
) -> SimEstimate:
    # Sample covariance as the mean of centred products
    return SimEstimate.from_samples((x - np.mean(x)) * (y - np.mean(y)))


def estimate_moments(
    sample: MomentSample,
    params: ModelParams,
) -> dict[str, SimEstimate]:
    """
    Estimate the nine moments of the model from a two-period sample.

    The cross-period count and severity covariance is taken given the drawn
    random effects, centring N_1 and Y_{2,1} on their conditional means.

    Args:
        sample (MomentSample): The sample.
        params (ModelParams): The parameters the sample was drawn with.

    Returns:
        dict[str, SimEstimate]: Estimates keyed by the name of the closed form they check.
    """

    s1: FloatArray = sample.aggregates[:, 0]
    s2: FloatArray = sample.aggregates[:, 1]
    n1: FloatArray = sample.counts[:, 0].astype(float)
    n2: FloatArray = sample.counts[:, 1].astype(float)
    y11: FloatArray = sample.severities[:, 0, 0]
    y12: FloatArray = sample.severities[:, 0, 1]
    y21: FloatArray = sample.severities[:, 1, 0]
    frequency_mean: FloatArray = params.lambda1 * sample.r1
    severity_mean: FloatArray = (
        params.lambda2 * sample.r2 * np.exp(frequency_mean * math.expm1(params.beta0))
    )

    return {
        "cov_aggregate_lag": _covariance(s1, s2),
        "cov_freq_severity_cross_period": SimEstimate.from_samples(
            (n1 - frequency_mean) * (y21 - severity_mean)
        ),
        "cov_freq_severity_same_period": _covariance(n1, y11),
        "cov_frequency_lag": _covariance(n1, n2),
        "cov_severity_cross_period": _covariance(y11, y21),
        "cov_severity_same_period": _covariance(y11, y12),
        "mean_aggregate": SimEstimate.from_samples(s1),
        "var_aggregate": _covariance(s1, s1),
        "var_individual_severity": _covariance(y11, y11),
    }


class EquivalenceResult(CrmModel):
    """
    Outcome of the two-sample Kolmogorov-Smirnov test of the average severity law.
    """

    statistic: float
    p_value: float
    critical_value: float
    passed: bool
    misspecified: bool = False


def average_severity_equivalence_test(
    params: ModelParams,
    n0: int,
    n: int,
    stream: RngStream,
    r2: float = 1.0,
    misspecified: bool = False,
) -> EquivalenceResult:
    """
    Test that the mean of n0 severities is Gamma(mean mu, dispersion psi2 / n0).

    One sample averages n0 i.i.d. Gamma(mu, psi2) severities with
    mu = lambda2 e^{beta0 n0} r2, the other draws directly from the reduced
    law. The test passes when the KS distance is below the 1% critical value.

    Args:
        params (ModelParams): The model parameters.
        n0 (int): The conditioning claim count, at least 1.
        n (int): The size of each sample.
        stream (RngStream): The random stream.
        r2 (float, optional): The severity random effect. Defaults to 1.0.
        misspecified (bool, optional): Use the wrong dispersion psi2 / n0^2. Defaults to False.

    Returns:
        EquivalenceResult: The statistic, p-value, critical value and verdict.
    """

    if n0 < 1 or n < 1:
        raise UsageError(f"the equivalence test needs n0 >= 1 and n >= 1, got n0={n0}, n={n}")
    if misspecified and n0 == 1:
        raise UsageError("the misspecified control needs n0 > 1")

    rng: np.random.Generator = stream.generator(block=0)
    mean: float = params.lambda2 * math.exp(params.beta0 * n0) * r2

    averaged: FloatArray = rng.gamma(
        shape=1.0 / params.psi2,
        scale=params.psi2 * mean,
        size=(n, n0),
    ).mean(axis=1)

    dispersion: float = params.psi2 / (n0 * n0 if misspecified else n0)
    direct: FloatArray = rng.gamma(
        shape=1.0 / dispersion,
        scale=dispersion * mean,
        size=n,
    )

    result = scipy.stats.ks_2samp(averaged, direct)
    critical: float = _KS_COEFFICIENT * math.sqrt(2.0 / n)
    statistic: float = float(result.statistic)

    logger.debug("average severity KS statistic %r against %r (n0=%d)", statistic, critical, n0)

    return EquivalenceResult(
        critical_value=critical,
        misspecified=misspecified,
        p_value=float(result.pvalue),
        passed=statistic < critical and float(result.pvalue) > KS_ALPHA,
        statistic=statistic,
    )


class OracleCheck(CrmModel):
    """
    One row of the verification matrix: a closed form against its Monte Carlo estimate.
    """

    name: str
    expected: float
    estimate: float
    std_error: float
    z: float
    threshold: float
    passed: bool


def z_threshold(n: int) -> float:
    """
    Return the z-score tolerance at sample size n.

    Args:
        n (int): The sample size.

    Returns:
        float: Z_THRESHOLD from 10^6 samples on, widened by log10(10^6 / n) below.
    """

    if n >= _FULL_SIZE:
        return Z_THRESHOLD

    return Z_THRESHOLD + math.log10(_FULL_SIZE / n)


def _check(
    name: str,
    expected: float,
    estimate: SimEstimate,
    threshold: float,
) -> OracleCheck:
    z: float = estimate.z_score(expected=expected)

    return OracleCheck(
        estimate=estimate.value,
        expected=expected,
        name=name,
        passed=abs(z) < threshold,
        std_error=estimate.std_error,
        threshold=threshold,
        z=z,
    )


# Initialize the closed forms checked against estimate_moments as a module constant
_MOMENTS: Final[dict[str, Callable[[ModelParams], float]]] = {
    "cov_aggregate_lag": cov_aggregate_lag,
    "cov_freq_severity_cross_period": cov_freq_severity_cross_period,
    "cov_freq_severity_same_period": cov_freq_severity_same_period,
    "cov_frequency_lag": cov_frequency_lag,
    "cov_severity_cross_period": cov_severity_cross_period,
    "cov_severity_same_period": cov_severity_same_period,
    "mean_aggregate": mean_aggregate,
    "var_aggregate": var_aggregate,
    "var_individual_severity": var_individual_severity,
}


def run_oracle_suite(
    params: ModelParams,
    n: int,
    stream: RngStream,
    jobs: int = 1,
) -> list[OracleCheck]:
    """
    Check every closed form against the Monte Carlo oracle.

    The matrix covers the inverse Gaussian sampler (mean, variance, MGF), the
    nine moments, the unbiasedness of both premiums, the empirical
    mean-square errors at t = 1, 5, 10 and the average severity equivalence
    test with its negative control. With b2 = 0 the frequency premium's
    error at t = 50, where it has nearly decayed to zero, is checked too.

    Args:
        params (ModelParams): Feasible model parameters.
        n (int): The sample size of each check, at least 10^4.
        stream (RngStream): The random stream; each check uses its own sub-stream.
        jobs (int, optional): The number of worker threads. Defaults to 1.

    Returns:
        list[OracleCheck]: The checks in a fixed order.
    """

    params.check_feasible()
    threshold: float = z_threshold(n=n)
    checks: list[OracleCheck] = []
    substream: int = 0

    def next_stream() -> RngStream:
        nonlocal substream
        substream += 1
        return RngStream(seed=stream.seed, stream=(stream.stream + substream) & _U64_MAX)

    # Inverse Gaussian sampler
    spec: IgSpec = params.frequency_effect
    draws: FloatArray = np.asarray(sample_ig(spec=spec, rng=next_stream().generator(), size=n))
    z: float = 0.2 if spec.is_degenerate else min(0.2, 0.25 * spec.branch_point)
    checks.append(
        _check(
            estimate=SimEstimate.from_samples(draws),
            expected=spec.mean,
            name="ig_mean",
            threshold=threshold,
        )
    )
    checks.append(
        _check(
            estimate=SimEstimate.from_samples((draws - spec.mean) ** 2),
            expected=0.0 if spec.is_degenerate else spec.b,
            name="ig_variance",
            threshold=threshold,
        )
    )
    checks.append(
        _check(
            estimate=SimEstimate.from_samples(np.exp(z * draws)),
            expected=ig_mgf(z=z, spec=spec),
            name="ig_mgf",
            threshold=threshold,
        )
    )

    # Moments
    moments: dict[str, SimEstimate] = estimate_moments(
        params=params,
        sample=simulate_moment_sample(params=params, n=n, stream=next_stream(), jobs=jobs),
    )
    for name, closed_form in _MOMENTS.items():
        checks.append(
            _check(
                estimate=moments[name],
                expected=closed_form(params),
                name=name,
                threshold=threshold,
            )
        )

    # Unbiasedness and mean-square errors
    for variant, hmse in (
        (AGGREGATE_SEVERITY, hmse_agg_expanded),
        (FREQUENCY, hmse_freq_expanded),
    ):
        u: float = components_for(params=params, t=1, variant=variant).u
        checks.append(
            _check(
                estimate=empirical_premium_mean(
                    jobs=jobs,
                    n=n,
                    params=params,
                    stream=next_stream(),
                    t=5,
                    variant=variant,
                ),
                expected=u,
                name=f"unbiased_{variant}",
                threshold=threshold,
            )
        )
        for t in _CHECK_HORIZONS:
            checks.append(
                _check(
                    estimate=empirical_premium_mse(
                        jobs=jobs,
                        n=n,
                        params=params,
                        stream=next_stream(),
                        t=t,
                        variant=variant,
                    ),
                    expected=hmse(params=params, t=t),
                    name=f"hmse_{variant}_t{t}",
                    threshold=threshold,
                )
            )

    # Without a severity random effect the frequency premium's error decays to zero
    if params.b2 == 0.0:
        checks.append(
            _check(
                estimate=empirical_premium_mse(
                    jobs=jobs,
                    n=n,
                    params=params,
                    stream=next_stream(),
                    t=_VANISHING_HORIZON,
                    variant=FREQUENCY,
                ),
                expected=hmse_freq_expanded(params=params, t=_VANISHING_HORIZON),
                name=f"hmse2_vanishing_t{_VANISHING_HORIZON}",
                threshold=threshold,
            )
        )

    # Average severity law and its negative control
    for misspecified in (False, True):
        result: EquivalenceResult = average_severity_equivalence_test(
            misspecified=misspecified,
            n=n,
            n0=5,
            params=params,
            stream=next_stream(),
        )
        checks.append(
            OracleCheck(
                estimate=result.statistic,
                expected=0.0,
                name="severity_equivalence_control" if misspecified else "severity_equivalence",
                passed=result.passed != misspecified,
                std_error=0.0,
                threshold=result.critical_value,
                z=result.statistic / result.critical_value,
            )
        )

    logger.info(
        "oracle suite: %d of %d checks passed at n=%d",
        sum(check.passed for check in checks),
        len(checks),
        n,
    )

    return checks
