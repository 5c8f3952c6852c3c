"""
Author: Louis Goodnews
Date: 2025-09-13
"""

from __future__ import annotations

import csv
import io
import json
import logging

from importlib import resources
from pathlib import Path
from typing import TYPE_CHECKING, Any, Final, Optional, Union

if TYPE_CHECKING:
    from typing_extensions import Self

from crmcred.core.constants import (
    DEFAULT_ASYMPTOTIC_T_MAX,
    DEFAULT_B1_VALUES,
    DEFAULT_B2_VALUES,
    DEFAULT_BETA0_VALUES,
    DEFAULT_LAMBDA1,
    DEFAULT_LAMBDA2,
    DEFAULT_SEED,
    DEFAULT_T_MAX,
    DEFAULT_T_VALUES,
    LOG_LINK,
)
from crmcred.core.crm import (
    ClaimHistory,
    CovariateSpec,
    ModelParams,
    Portfolio,
    RiskClass,
    calibrate_psi,
    resolve_rate,
)
from crmcred.core.exceptions import ConfigError, ParameterError
from crmcred.core.files import read_file
from crmcred.core.scenario import PublishedCell, PublishedTable, ScenarioGrid
from crmcred.utils.utils import merge_dicts, run_async


__all__: Final[list[str]] = [
    "ClaimHistoryLoader",
    "ModelParamsBuilder",
    "ModelParamsLoader",
    "PortfolioLoader",
    "PublishedTableLoader",
    "ScenarioGridLoader",
    "published_table_path",
]


logger: Final[logging.Logger] = logging.getLogger(__name__)


# Initialize the unit of the transcribed published values as a module constant
PUBLISHED_UNIT: Final[float] = 1e6

# Initialize the columns of the published table transcription as a module constant
PUBLISHED_COLUMNS: Final[tuple[str, ...]] = (
    "beta0",
    "b2",
    "b1",
    "t",
    "hmse1",
    "hmse2",
)

# Initialize the scenario grid defaults as a module constant
GRID_DEFAULTS: Final[dict[str, Any]] = {
    "asymptotic_t_max": DEFAULT_ASYMPTOTIC_T_MAX,
    "b1": list(DEFAULT_B1_VALUES),
    "b2": list(DEFAULT_B2_VALUES),
    "beta0": list(DEFAULT_BETA0_VALUES),
    "lambda1": DEFAULT_LAMBDA1,
    "lambda2": DEFAULT_LAMBDA2,
    "seed": DEFAULT_SEED,
    "t": list(DEFAULT_T_VALUES),
    "t_max": DEFAULT_T_MAX,
}

Rate = Union[float, CovariateSpec]


def _strip_comments(value: Any) -> Any:
    """
    Remove every key starting with an underscore, recursively.

    Args:
        value (Any): The parsed JSON value.

    Returns:
        Any: The value without comment keys.
    """

    # Recurse into dictionaries, dropping comment keys
    if isinstance(
        value,
        dict,
    ):
        return {
            key: _strip_comments(item)
            for (
                key,
                item,
            ) in value.items()
            if not key.startswith("_")
        }

    # Recurse into lists
    if isinstance(
        value,
        list,
    ):
        return [_strip_comments(item) for item in value]

    # Return every other value unchanged
    return value


def _read_text(path: Path) -> str:
    """
    Read a UTF-8 input file.

    Args:
        path (Path): The path to the file.

    Returns:
        str: The content.

    Raises:
        ConfigError: If the file does not exist.
    """

    # Check if the path exists
    if not path.exists():
        # Raise a ConfigError if the path does not exist
        raise ConfigError(
            message="file not found",
            path=str(path),
        )

    # Read the file's content
    return run_async(
        function=read_file,
        path=path,
    )


def _read_json(path: Path) -> Any:
    """
    Read and parse a JSON input file, dropping comment keys.

    Args:
        path (Path): The path to the file.

    Returns:
        Any: The parsed document.

    Raises:
        ConfigError: If the file is missing or not valid JSON, anchored at the offending position.
    """

    # Read the file's content
    content: str = _read_text(path=path)

    try:
        # Deserialize the file content
        data: Any = json.loads(content)
    except json.JSONDecodeError as e:
        # Raise a ConfigError anchored at the parse error
        raise ConfigError(
            column=e.colno,
            line=e.lineno,
            message=e.msg,
            path=str(path),
        ) from e

    # Return the document without comment keys
    return _strip_comments(value=data)


def _require(
    data: dict[str, Any],
    key: str,
    path: Optional[Path],
) -> Any:
    # Return the value of a mandatory key
    if key not in data:
        raise ConfigError(
            message=f"missing field '{key}'",
            path=str(path) if path is not None else None,
        )
    return data[key]


def _rate(
    value: Any,
    key: str,
    path: Optional[Path],
) -> Rate:
    """
    Convert a rate given as a number or as a covariate block.

    Args:
        value (Any): The JSON value.
        key (str): The field name.
        path (Optional[Path]): The source file.

    Returns:
        Rate: The number or the CovariateSpec.

    Raises:
        ConfigError: If the value is neither.
    """

    # Return numbers unchanged
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)

    # Convert covariate blocks
    if isinstance(value, dict):
        try:
            return CovariateSpec(
                coefficients=list(_require(value, "coefficients", path)),
                covariates=list(_require(value, "covariates", path)),
                link=value.get("link", LOG_LINK),
            )
        except TypeError as e:
            raise ConfigError(
                message=f"invalid covariate block for '{key}': {e}",
                path=str(path) if path is not None else None,
            ) from e

    raise ConfigError(
        message=f"'{key}' must be a number or a covariate block, got {type(value).__name__}",
        path=str(path) if path is not None else None,
    )


class ModelParamsBuilder:
    """
    A builder class for creating new ModelParams instances.

    The dispersion is set either directly with with_psi2 or through the
    individual severity variance with with_severity_variance, in which case
    build() calibrates it.
    """

    def __init__(self) -> None:
        """
        Initialize the ModelParamsBuilder instance with an empty configuration dictionary instance variable.

        Returns:
            None
        """

        # Initialize the configuration dictionary instance variable
        self._configuration: dict[str, Any] = {}

    def __contains__(
        self,
        key: str,
    ) -> bool:
        """
        Check if the passed key is contained in the configuration dictionary instance variable.

        Args:
            key (str): The key to be checked.

        Returns:
            bool: True if the key is contained in the configuration, False otherwise.
        """

        # Return whether the key is configured
        return key in self._configuration

    def __repr__(self) -> str:
        """
        Return a string representation of the builder.

        Returns:
            str: A string representation of the configuration.
        """

        # Return a string representation of the configuration dictionary instance variable
        return f"<{self.__class__.__name__}({self._configuration})>"

    @property
    def configuration(self) -> dict[str, Any]:
        """
        Return a copy of the configuration dictionary instance variable to the caller.

        Returns:
            dict[str, Any]: A copy of the configuration dictionary instance variable.
        """

        # Return a copy of the configuration dictionary instance variable to the caller
        return self._configuration.copy()

    def build(self) -> ModelParams:
        """
        Attempt to create and return the ModelParams instance.

        Returns:
            ModelParams: The newly created ModelParams instance.

        Raises:
            ParameterError: If a field is missing or the dispersion is set both ways or neither.
            CalibrationError: If the severity variance yields psi2 <= 0.
        """

        # Get a copy of the configuration
        configuration: dict[str, Any] = self.configuration

        # Check for the mandatory fields
        for key in ("lambda1", "lambda2", "beta0", "b1", "b2"):
            if key not in configuration:
                # Raise a ParameterError over the missing field
                raise ParameterError(f"ModelParams: missing required field '{key}'")

        # Resolve the rates given through covariates
        for key in ("lambda1", "lambda2"):
            value: Rate = configuration[key]
            configuration[key] = (
                resolve_rate(spec=value)
                if isinstance(
                    value,
                    CovariateSpec,
                )
                else resolve_rate(value=value)
            )

        # Check the dispersion is set exactly one way
        severity_variance: Optional[float] = configuration.pop("c", None)
        if ("psi2" in configuration) == (severity_variance is not None):
            # Raise a ParameterError over the ambiguous dispersion
            raise ParameterError("give either psi2 or the severity variance c, not both or neither")

        # Calibrate the dispersion
        if severity_variance is not None:
            configuration["psi2"] = calibrate_psi(
                b1=configuration["b1"],
                b2=configuration["b2"],
                beta0=configuration["beta0"],
                c=severity_variance,
                lambda1=configuration["lambda1"],
                lambda2=configuration["lambda2"],
            )

        # Attempt to create and return the ModelParams instance
        return ModelParams(**configuration)

    def with_b1(
        self,
        value: float,
    ) -> Self:
        """
        Update the configuration with the frequency random effect variance.

        Args:
            value (float): The value to be updated.

        Returns:
            Self: The builder.
        """

        # Update the 'b1' key in the configuration with the passed value
        self._configuration["b1"] = value

        # Return the builder
        return self

    def with_b2(
        self,
        value: float,
    ) -> Self:
        """
        Update the configuration with the severity random effect variance.

        Args:
            value (float): The value to be updated.

        Returns:
            Self: The builder.
        """

        # Update the 'b2' key in the configuration with the passed value
        self._configuration["b2"] = value

        # Return the builder
        return self

    def with_beta0(
        self,
        value: float,
    ) -> Self:
        """
        Update the configuration with the dependence coefficient.

        Args:
            value (float): The value to be updated.

        Returns:
            Self: The builder.
        """

        # Update the 'beta0' key in the configuration with the passed value
        self._configuration["beta0"] = value

        # Return the builder
        return self

    def with_lambda1(
        self,
        value: Rate,
    ) -> Self:
        """
        Update the configuration with the a priori frequency rate.

        Args:
            value (Rate): The rate or the covariates producing it.

        Returns:
            Self: The builder.
        """

        # Update the 'lambda1' key in the configuration with the passed value
        self._configuration["lambda1"] = value

        # Return the builder
        return self

    def with_lambda2(
        self,
        value: Rate,
    ) -> Self:
        """
        Update the configuration with the a priori severity scale.

        Args:
            value (Rate): The rate or the covariates producing it.

        Returns:
            Self: The builder.
        """

        # Update the 'lambda2' key in the configuration with the passed value
        self._configuration["lambda2"] = value

        # Return the builder
        return self

    def with_psi2(
        self,
        value: float,
    ) -> Self:
        """
        Update the configuration with the gamma severity dispersion.

        Args:
            value (float): The value to be updated.

        Returns:
            Self: The builder.
        """

        # Update the 'psi2' key in the configuration with the passed value
        self._configuration["psi2"] = value

        # Return the builder
        return self

    def with_severity_variance(
        self,
        value: float,
    ) -> Self:
        """
        Update the configuration with the individual severity variance c psi2 is calibrated to.

        Args:
            value (float): The value to be updated.

        Returns:
            Self: The builder.
        """

        # Update the 'c' key in the configuration with the passed value
        self._configuration["c"] = value

        # Return the builder
        return self


class ModelParamsLoader:
    """
    A class that loads a ModelParams instance from a JSON document.
    """

    @classmethod
    def from_dict(
        cls,
        data: dict[str, Any],
        path: Optional[Path] = None,
    ) -> ModelParams:
        """
        Build a ModelParams instance from a parsed document.

        Args:
            data (dict[str, Any]): The document.
            path (Optional[Path], optional): The source file, used in error messages. Defaults to None.

        Returns:
            ModelParams: The parameters.

        Raises:
            ConfigError: If a field is missing or has the wrong type.
        """

        # Check the document is an object
        if not isinstance(
            data,
            dict,
        ):
            raise ConfigError(
                message="a parameter document must be a JSON object",
                path=str(path) if path is not None else None,
            )

        # Initialize a new builder instance
        builder: ModelParamsBuilder = ModelParamsBuilder()

        # Configure the builder instance
        (
            builder.with_lambda1(value=_rate(_require(data, "lambda1", path), "lambda1", path))
            .with_lambda2(value=_rate(_require(data, "lambda2", path), "lambda2", path))
            .with_beta0(value=_require(data, "beta0", path))
            .with_b1(value=_require(data, "b1", path))
            .with_b2(value=_require(data, "b2", path))
        )

        # Set the dispersion the way the document gives it
        if "psi2" in data:
            builder.with_psi2(value=data["psi2"])
        if "c" in data:
            builder.with_severity_variance(value=data["c"])

        try:
            # Return a new ModelParams instance
            return builder.build()
        except TypeError as e:
            # Raise a ConfigError over the mistyped field
            raise ConfigError(
                message=str(e),
                path=str(path) if path is not None else None,
            ) from e

    @classmethod
    def load(
        cls,
        path: Path,
    ) -> ModelParams:
        """
        Load a ModelParams instance from a file.

        Args:
            path (Path): The path to the file.

        Returns:
            ModelParams: The loaded ModelParams instance.
        """

        # Read and convert the document
        return cls.from_dict(
            data=_read_json(path=path),
            path=path,
        )


class PortfolioLoader:
    """
    A class that loads a Portfolio instance from a JSON document of weighted risk classes.
    """

    @classmethod
    def load(
        cls,
        path: Path,
    ) -> Portfolio:
        """
        Load a Portfolio instance from a file.

        The document is {"classes": [{"weight": w, "params": {...}}, ...]}.

        Args:
            path (Path): The path to the file.

        Returns:
            Portfolio: The loaded Portfolio instance.
        """

        # Read the document
        data: Any = _read_json(path=path)

        # Get the risk classes
        classes: Any = _require(data, "classes", path) if isinstance(data, dict) else None
        if not isinstance(
            classes,
            list,
        ):
            raise ConfigError(
                message="'classes' must be a list of risk classes",
                path=str(path),
            )

        # Return a new Portfolio instance
        return Portfolio(
            classes=tuple(
                RiskClass(
                    params=ModelParamsLoader.from_dict(
                        data=_require(item, "params", path),
                        path=path,
                    ),
                    weight=_require(item, "weight", path),
                )
                for item in classes
            )
        )


class ClaimHistoryLoader:
    """
    A class that loads a ClaimHistory instance from a JSON document.
    """

    @classmethod
    def load(
        cls,
        path: Path,
    ) -> ClaimHistory:
        """
        Load a ClaimHistory instance from a file.

        The document is {"periods": [[N, S], ...]} or {"periods": [{"N": n, "S": s}, ...]}.

        Args:
            path (Path): The path to the file.

        Returns:
            ClaimHistory: The loaded ClaimHistory instance.

        Raises:
            HistoryError: If a period violates the history invariants.
        """

        # Read the document
        data: Any = _read_json(path=path)

        # Get the periods
        periods: Any = _require(data, "periods", path) if isinstance(data, dict) else None
        if not isinstance(
            periods,
            list,
        ):
            raise ConfigError(
                message="'periods' must be a list of (N, S) pairs",
                path=str(path),
            )

        # Convert period objects to pairs
        pairs: list[Any] = [
            (
                (
                    _require(period, "N", path),
                    _require(period, "S", path),
                )
                if isinstance(
                    period,
                    dict,
                )
                else period
            )
            for period in periods
        ]

        # Return a new ClaimHistory instance
        return ClaimHistory(
            periods=tuple(
                tuple(pair)
                if isinstance(
                    pair,
                    list,
                )
                else pair
                for pair in pairs
            )
        )


class ScenarioGridLoader:
    """
    A class that loads a ScenarioGrid instance from a JSON document overlaid on the defaults.
    """

    @classmethod
    def from_dict(
        cls,
        data: dict[str, Any],
        path: Optional[Path] = None,
    ) -> ScenarioGrid:
        """
        Build a ScenarioGrid from a parsed document.

        The severity variance c is mandatory, every other field defaults to
        the study grid.

        Args:
            data (dict[str, Any]): The document.
            path (Optional[Path], optional): The source file, used in error messages. Defaults to None.

        Returns:
            ScenarioGrid: The grid.
        """

        # Check the document is an object
        if not isinstance(
            data,
            dict,
        ):
            raise ConfigError(
                message="a scenario grid document must be a JSON object",
                path=str(path) if path is not None else None,
            )

        # Overlay the document on the defaults
        merged: dict[str, Any] = merge_dicts(
            new=data,
            old=GRID_DEFAULTS,
        )

        # Check for unknown fields
        unknown: set[str] = set(merged) - set(GRID_DEFAULTS) - {"c"}
        if unknown:
            raise ConfigError(
                message=f"unknown fields {sorted(unknown)}",
                path=str(path) if path is not None else None,
            )

        # Resolve the rates
        for key in ("lambda1", "lambda2"):
            value: Rate = _rate(merged[key], key, path)
            merged[key] = (
                resolve_rate(spec=value)
                if isinstance(
                    value,
                    CovariateSpec,
                )
                else value
            )

        try:
            # Return a new ScenarioGrid instance
            return ScenarioGrid(
                asymptotic_t_max=merged["asymptotic_t_max"],
                b1=merged["b1"],
                b2=merged["b2"],
                beta0=merged["beta0"],
                c=_require(merged, "c", path),
                lambda1=merged["lambda1"],
                lambda2=merged["lambda2"],
                seed=merged["seed"],
                t=merged["t"],
                t_max=merged["t_max"],
            )
        except TypeError as e:
            # Raise a ConfigError over the mistyped field
            raise ConfigError(
                message=str(e),
                path=str(path) if path is not None else None,
            ) from e

    @classmethod
    def load(
        cls,
        path: Path,
    ) -> ScenarioGrid:
        """
        Load a ScenarioGrid instance from a file.

        Args:
            path (Path): The path to the file.

        Returns:
            ScenarioGrid: The loaded ScenarioGrid instance.
        """

        # Read and convert the document
        return cls.from_dict(
            data=_read_json(path=path),
            path=path,
        )


def published_table_path() -> Path:
    """
    Return the path of the shipped transcription of the published HMSE table.

    Returns:
        Path: The CSV file inside the package.
    """

    # Return the path of the package data file
    return Path(str(resources.files("crmcred.data").joinpath("published_hmse.csv")))


class PublishedTableLoader:
    """
    A class that loads the transcribed published HMSE table from CSV.

    Lines starting with '#' are comments. Values are in units of 10^6 and
    converted to raw units on load.
    """

    @classmethod
    def load(
        cls,
        path: Optional[Path] = None,
    ) -> PublishedTable:
        """
        Load the published table.

        Args:
            path (Optional[Path], optional): The CSV file. Defaults to the shipped transcription.

        Returns:
            PublishedTable: The table in raw units.

        Raises:
            ConfigError: If the header or a row is malformed, anchored at its line.
        """

        # Fall back to the shipped transcription
        path = path if path is not None else published_table_path()

        # Read the file's content
        content: str = _read_text(path=path)

        # Initialize the list of cells
        cells: list[PublishedCell] = []

        # Initialize the header
        header: Optional[list[str]] = None

        # Iterate over the CSV records with their line numbers
        for (
            line,
            record,
        ) in enumerate(
            csv.reader(io.StringIO(content)),
            start=1,
        ):
            # Skip blank lines and comments
            if not record or record[0].lstrip().startswith("#"):
                continue

            # Check the header
            if header is None:
                header = [column.strip() for column in record]
                if tuple(header) != PUBLISHED_COLUMNS:
                    raise ConfigError(
                        line=line,
                        message=f"expected columns {list(PUBLISHED_COLUMNS)}, got {header}",
                        path=str(path),
                    )
                continue

            try:
                # Convert the record
                values: dict[str, str] = dict(zip(header, (value.strip() for value in record), strict=True))
                cells.append(
                    PublishedCell(
                        b1=float(values["b1"]),
                        b2=float(values["b2"]),
                        beta0=float(values["beta0"]),
                        hmse1=float(values["hmse1"]) * PUBLISHED_UNIT,
                        hmse2=float(values["hmse2"]) * PUBLISHED_UNIT,
                        t=int(values["t"]),
                    )
                )
            except ValueError as e:
                # Raise a ConfigError anchored at the offending line
                raise ConfigError(
                    line=line,
                    message=f"malformed row: {e}",
                    path=str(path),
                ) from e

        logger.debug("loaded %d published cells from '%s'", len(cells), path)

        # Return the table
        return PublishedTable(cells=tuple(cells))
