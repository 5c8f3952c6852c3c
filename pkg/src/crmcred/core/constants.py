"""
Author: Louis Goodnews
Date: 2025-09-13
"""

import math

from typing import Final, Literal


__all__: Final[list[str]] = [
    "AGGREGATE_SEVERITY",
    "BLP_MODES",
    "BLP_STATED",
    "BLP_TARGET",
    "BLP_TOLERANCE",
    "COMPARISON_CSV_HEADER",
    "CONDITION_LIMIT",
    "DEFAULT_ASYMPTOTIC_T_MAX",
    "DEFAULT_B1_VALUES",
    "DEFAULT_B2_VALUES",
    "DEFAULT_BETA0_VALUES",
    "DEFAULT_CHUNK_SIZE",
    "DEFAULT_LAMBDA1",
    "DEFAULT_LAMBDA2",
    "DEFAULT_MAX_PANEL_CELLS",
    "DEFAULT_SEED",
    "DEFAULT_T_MAX",
    "DEFAULT_T_VALUES",
    "DEGENERATE_VARIANCE",
    "EMPIRICAL_CSV_HEADER",
    "EXIT_CONFIG_ERROR",
    "EXIT_INFEASIBLE_GRID",
    "EXIT_SUCCESS",
    "EXIT_VERIFICATION_FAILURE",
    "FIGURE_CSV_HEADER",
    "FREQUENCY",
    "FREQUENCY_COUNT",
    "HMSE_CSV_HEADER",
    "INFEASIBLE_CSV_HEADER",
    "KS_ALPHA",
    "LOG_LINK",
    "PANEL_CSV_HEADER",
    "SERIES_MAX_TERMS",
    "SERIES_TOLERANCE",
    "TIE",
    "TIE_TOLERANCE",
    "Variant",
    "WEIGHT_TOLERANCE",
    "Z_THRESHOLD",
]


# Initialize the aggregate severity premium variant as a module constant
AGGREGATE_SEVERITY: Final[Literal["AggregateSeverity"]] = "AggregateSeverity"

# Initialize the frequency premium variant as a module constant
FREQUENCY: Final[Literal["Frequency"]] = "Frequency"

# Initialize the frequency count premium variant as a module constant
FREQUENCY_COUNT: Final[Literal["FrequencyCount"]] = "FrequencyCount"

# Initialize the tie recommendation as a module constant
TIE: Final[Literal["Tie"]] = "Tie"

# Initialize the premium variant type alias
Variant = Literal["AggregateSeverity", "Frequency", "FrequencyCount"]

# Initialize the stated normal equations mode as a module constant
BLP_STATED: Final[Literal["stated"]] = "stated"

# Initialize the target normal equations mode as a module constant
BLP_TARGET: Final[Literal["target"]] = "target"

# Initialize the admissible normal equations modes as a module constant
BLP_MODES: Final[tuple[str, ...]] = (
    BLP_STATED,
    BLP_TARGET,
)

# Initialize the only supported link function as a module constant
LOG_LINK: Final[Literal["log"]] = "log"

# Initialize the variance below which a random effect is degenerate as a module constant
DEGENERATE_VARIANCE: Final[float] = 1e-12

# Initialize the relative stopping tolerance of the Poisson series as a module constant
SERIES_TOLERANCE: Final[float] = 1e-16

# Initialize the term cap of the Poisson series as a module constant
SERIES_MAX_TERMS: Final[int] = 10_000

# Initialize the tolerance on portfolio weights summing to one as a module constant
WEIGHT_TOLERANCE: Final[float] = 1e-12

# Initialize the relative tie tolerance of the recommendation as a module constant
TIE_TOLERANCE: Final[float] = 1e-9

# Initialize the relative tolerance of closed form versus oracle identities as a module constant
BLP_TOLERANCE: Final[float] = 1e-9

# Initialize the condition number above which a Gram matrix is singular as a module constant
CONDITION_LIMIT: Final[float] = 1e12

# Initialize the default crossover scan horizon as a module constant
DEFAULT_T_MAX: Final[int] = 100

# Initialize the default horizon of the asymptotic figure series as a module constant
DEFAULT_ASYMPTOTIC_T_MAX: Final[int] = 100

# Initialize the number of policyholders per simulation block as a module constant
DEFAULT_CHUNK_SIZE: Final[int] = 65_536

# Initialize the cap on simulated panel cells (policyholders times periods) as a module constant
DEFAULT_MAX_PANEL_CELLS: Final[int] = 50_000_000

# Initialize the verification z threshold at one million samples as a module constant
Z_THRESHOLD: Final[float] = 4.0

# Initialize the Kolmogorov-Smirnov significance level as a module constant
KS_ALPHA: Final[float] = 0.01

# Initialize the default root seed as a module constant
DEFAULT_SEED: Final[int] = 20_240_101

# Initialize the default a priori frequency rate as a module constant
DEFAULT_LAMBDA1: Final[float] = math.exp(-1.9)

# Initialize the default a priori severity scale as a module constant
DEFAULT_LAMBDA2: Final[float] = math.exp(8.4)

# Initialize the default dependence coefficients as a module constant
DEFAULT_BETA0_VALUES: Final[tuple[float, ...]] = (0.0, -0.05, -0.1)

# Initialize the default frequency random effect variances as a module constant
DEFAULT_B1_VALUES: Final[tuple[float, ...]] = (0.5, 1.5, 3.0)

# Initialize the default severity random effect variances as a module constant
DEFAULT_B2_VALUES: Final[tuple[float, ...]] = (0.01, 0.2, 0.4)

# Initialize the default horizons as a module constant
DEFAULT_T_VALUES: Final[tuple[int, ...]] = tuple(range(1, 11))

# Initialize the successful exit code as a module constant
EXIT_SUCCESS: Final[Literal[0]] = 0

# Initialize the usage or configuration error exit code as a module constant
EXIT_CONFIG_ERROR: Final[Literal[1]] = 1

# Initialize the verification failure exit code as a module constant
EXIT_VERIFICATION_FAILURE: Final[Literal[2]] = 2

# Initialize the infeasible grid exit code as a module constant
EXIT_INFEASIBLE_GRID: Final[Literal[3]] = 3

# Initialize the header of the HMSE report as a module constant
HMSE_CSV_HEADER: Final[tuple[str, ...]] = (
    "beta0",
    "b1",
    "b2",
    "t",
    "hmse1",
    "hmse2",
    "hmse2_limit",
    "recommended",
)

# Initialize the header of the published table comparison as a module constant
COMPARISON_CSV_HEADER: Final[tuple[str, ...]] = (
    "beta0",
    "b1",
    "b2",
    "t",
    "published_hmse1",
    "published_hmse2",
    "computed_hmse1",
    "computed_hmse2",
    "rel_dev_hmse1",
    "rel_dev_hmse2",
    "published_order",
    "computed_order",
    "order_match",
)

# Initialize the header of the figure series as a module constant
FIGURE_CSV_HEADER: Final[tuple[str, ...]] = (
    "b1",
    "b2",
    "t",
    "hmse1",
    "hmse2",
)

# Initialize the header of the infeasible cell report as a module constant
INFEASIBLE_CSV_HEADER: Final[tuple[str, ...]] = (
    "beta0",
    "b1",
    "b2",
    "constraint",
    "message",
)

# Initialize the header of the empirical HMSE report as a module constant
EMPIRICAL_CSV_HEADER: Final[tuple[str, ...]] = (
    "beta0",
    "b1",
    "b2",
    "t",
    "hmse1_mc",
    "hmse1_se",
    "hmse2_mc",
    "hmse2_se",
)

# Initialize the header of the panel export as a module constant
PANEL_CSV_HEADER: Final[tuple[str, ...]] = (
    "policyholder_id",
    "t",
    "N",
    "S",
)
