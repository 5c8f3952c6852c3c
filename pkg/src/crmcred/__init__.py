"""
Author: Louis Goodnews
Date: 2025-09-20
"""

from typing import Final, Literal

from .core.credibility import (
    CredibilityComponents,
    CredibilityComponentsFactory,
    PremiumQuote,
    blp_oracle,
    components_agg,
    components_freq,
    components_freq_count,
    premium_agg,
    premium_freq,
    premium_freq_count,
)
from .core.crm import (
    ClaimHistory,
    CovariateSpec,
    ModelParams,
    Portfolio,
    RiskClass,
    calibrate_psi,
)
from .core.exceptions import (
    CalibrationError,
    ConfigError,
    CrmError,
    DomainError,
    HistoryError,
    ParameterError,
    RangeError,
    ReportError,
    SimulationSizeError,
    SingularSystemError,
    UsageError,
)
from .core.loaders import (
    ClaimHistoryLoader,
    ModelParamsBuilder,
    ModelParamsLoader,
    PortfolioLoader,
    PublishedTableLoader,
    ScenarioGridLoader,
)
from .core.momentkit import IgSpec, JointAux, TiltArgument
from .core.reports import CrmReportService
from .core.risk_mse import (
    MseReport,
    MseRow,
    crossover_horizon,
    hmse_agg_expanded,
    hmse_agg_simplified,
    hmse_freq_expanded,
    hmse_freq_limit,
    hmse_freq_simplified,
    recommend,
    weighted_hmse,
)
from .core.scenario import ScenarioGrid, expand_grid
from .core.simlab import RngStream, SimEstimate

__all__: Final[list[str]] = [
    "CalibrationError",
    "ClaimHistory",
    "ClaimHistoryLoader",
    "ConfigError",
    "CovariateSpec",
    "CredibilityComponents",
    "CredibilityComponentsFactory",
    "CrmError",
    "CrmReportService",
    "DomainError",
    "HistoryError",
    "IgSpec",
    "JointAux",
    "ModelParams",
    "ModelParamsBuilder",
    "ModelParamsLoader",
    "MseReport",
    "MseRow",
    "ParameterError",
    "Portfolio",
    "PortfolioLoader",
    "PremiumQuote",
    "PublishedTableLoader",
    "RangeError",
    "ReportError",
    "RiskClass",
    "RngStream",
    "ScenarioGrid",
    "ScenarioGridLoader",
    "SimEstimate",
    "SimulationSizeError",
    "SingularSystemError",
    "TiltArgument",
    "UsageError",
    "blp_oracle",
    "calibrate_psi",
    "components_agg",
    "components_freq",
    "components_freq_count",
    "crossover_horizon",
    "expand_grid",
    "hmse_agg_expanded",
    "hmse_agg_simplified",
    "hmse_freq_expanded",
    "hmse_freq_limit",
    "hmse_freq_simplified",
    "premium_agg",
    "premium_freq",
    "premium_freq_count",
    "recommend",
    "weighted_hmse",
]

__version__: Final[Literal["0.1.0"]] = "0.1.0"
