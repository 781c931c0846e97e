"""Run configuration: flat ``key=value`` file plus command-line overrides."""
import logging
from datetime import date
from pathlib import Path
from typing import Any, Dict, Iterable, Optional

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.constants import (
    DEFAULT_RANDOM_REPLICATES,
    DEFAULT_SPLIT_DATE,
    DEFAULT_TEST_END,
    DEFAULT_TEST_START,
    DEFAULT_TOP_CHAINS,
    DEFAULT_TRAIN_END,
    DEFAULT_TRAIN_START,
    FOOD_CODE_CUTOFF,
)
from src.models.features import DateWindow, FeatureConfig, KdeConfig
from src.models.logistic_model import TrainingConfig
from src.utils.error_handler import configuration_error, data_error

logger = logging.getLogger(__name__)

INPUT_KEYS = ("inspections", "licenses", "weather", "events")
PATH_KEYS = INPUT_KEYS + ("out", "model", "features", "portal_export")

CONFIG_KEYS = PATH_KEYS + (
    "seed",
    "capacity",
    "bandwidth_meters",
    "window_days",
    "train_start",
    "train_end",
    "test_start",
    "test_end",
    "cutoff_date",
    "split_date",
    "allow_missing_license",
    "imputation_years",
    "max_iterations",
    "gradient_tolerance",
    "ridge_epsilon",
    "random_replicates",
    "top_chains",
    "strategy",
    "mode",
)

_TRUE_VALUES = ("1", "true", "yes", "on")
_FALSE_VALUES = ("0", "false", "no", "off", "")


class RunConfig(BaseModel):
    """Everything a subcommand needs to know about one pipeline run."""
    model_config = ConfigDict(frozen=True)

    inspections: Optional[Path] = Field(None, description="Canonical inspections.csv")
    licenses: Optional[Path] = Field(None, description="Canonical licenses.csv")
    weather: Optional[Path] = Field(None, description="Canonical weather.csv")
    events: Optional[Path] = Field(None, description="Canonical events.csv")
    out: Path = Field(..., description="Output directory; nothing is written elsewhere")
    model: Optional[Path] = Field(None, description="Model artifact override for score/audit")
    features: Optional[Path] = Field(None, description="Feature matrix override")
    portal_export: Optional[Path] = Field(None, description="City portal export that ingest converts to inspections.csv")
    seed: int = 7
    capacity: Optional[int] = Field(None, gt=0, description="Inspections per simulated day")
    train_window: DateWindow = Field(default_factory=lambda: DateWindow(start=DEFAULT_TRAIN_START, end=DEFAULT_TRAIN_END))
    test_window: DateWindow = Field(default_factory=lambda: DateWindow(start=DEFAULT_TEST_START, end=DEFAULT_TEST_END))
    cutoff_date: date = FOOD_CODE_CUTOFF
    split_date: date = DEFAULT_SPLIT_DATE
    feature_config: FeatureConfig = Field(default_factory=FeatureConfig)
    training: TrainingConfig = Field(default_factory=TrainingConfig)
    random_replicates: int = Field(DEFAULT_RANDOM_REPLICATES, ge=1)
    top_chains: int = Field(DEFAULT_TOP_CHAINS, ge=1)
    strategy: Optional[str] = None
    mode: Optional[str] = None

    @model_validator(mode='after')
    def validate_windows(self):
        if self.train_window.overlaps(self.test_window) or self.train_window.end >= self.test_window.start:
            raise ValueError("train window must end before the test window starts")
        return self

    @property
    def kde(self) -> KdeConfig:
        return self.feature_config.kde

    def output_path(self, name: str) -> Path:
        return self.out / name

    def require_inputs(self, names: Iterable[str] = INPUT_KEYS) -> None:
        """Check that the named input files are configured and exist.

        Raises:
            PipelineError: Missing setting (configuration) or missing file (data).
        """
        for name in names:
            path = getattr(self, name)
            if path is None:
                raise configuration_error(f"input '{name}' is not configured", key=name)
            if not Path(path).is_file():
                raise data_error(f"input '{name}' not found: {path}", key=name, path=str(path))


class RunConfigLoader:
    """Builds a RunConfig from an optional config file and flag overrides (flags win)."""

    def __init__(self, config_file: Optional[Path] = None):
        self.config_file = Path(config_file) if config_file else None

    def read_file(self) -> Dict[str, str]:
        if self.config_file is None:
            return {}
        if not self.config_file.is_file():
            raise configuration_error(f"config file not found: {self.config_file}", path=str(self.config_file))

        values = dotenv_values(self.config_file, interpolate=False)
        unknown = sorted(key for key in values if key not in CONFIG_KEYS)
        if unknown:
            raise configuration_error(f"unknown config keys: {', '.join(unknown)}", keys=unknown)

        base = self.config_file.resolve().parent
        settings = {}
        for key, value in values.items():
            if value is None:
                continue
            value = value.strip()
            if key in PATH_KEYS and value:
                path = Path(value)
                value = str(path if path.is_absolute() else base / path)
            settings[key] = value
        logger.info(f"Loaded {len(settings)} settings from {self.config_file.name}")
        return settings

    def load(self, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
        """
        Merge file settings with overrides and validate.

        Args:
            overrides: Flag values keyed like the config file; None means unset

        Returns:
            RunConfig: Validated configuration

        Raises:
            PipelineError: Unknown key, unparsable value or inconsistent windows
        """
        settings: Dict[str, Any] = dict(self.read_file())
        for key, value in (overrides or {}).items():
            if key not in CONFIG_KEYS:
                raise configuration_error(f"unknown setting '{key}'", key=key)
            if value is not None:
                settings[key] = value

        if not settings.get("out"):
            raise configuration_error("output directory is required (--out or 'out' in the config file)", key="out")

        try:
            return RunConfig(**self._structure(settings))
        except ValidationError as e:
            first = e.errors()[0]
            location = ".".join(str(part) for part in first["loc"])
            raise configuration_error(f"invalid setting {location}: {first['msg']}", errors=e.error_count())
        except ValueError as e:
            raise configuration_error(f"invalid configuration: {e}")

    @staticmethod
    def _flag(value: Any, key: str) -> bool:
        if isinstance(value, bool):
            return value
        text = str(value).strip().lower()
        if text in _TRUE_VALUES:
            return True
        if text in _FALSE_VALUES:
            return False
        raise configuration_error(f"setting '{key}' must be a boolean, got {value!r}", key=key)

    def _structure(self, settings: Dict[str, Any]) -> Dict[str, Any]:
        """Flat key=value settings -> nested RunConfig fields."""
        flat = {key: value for key, value in settings.items() if value != ""}
        structured: Dict[str, Any] = {}

        for key in PATH_KEYS + ("seed", "capacity", "cutoff_date", "split_date",
                                "random_replicates", "top_chains", "strategy", "mode"):
            if key in flat:
                structured[key] = flat.pop(key)

        train = {"start": flat.pop("train_start", DEFAULT_TRAIN_START), "end": flat.pop("train_end", DEFAULT_TRAIN_END)}
        test = {"start": flat.pop("test_start", DEFAULT_TEST_START), "end": flat.pop("test_end", DEFAULT_TEST_END)}
        structured["train_window"] = train
        structured["test_window"] = test

        kde = {}
        for key in ("bandwidth_meters", "window_days"):
            if key in flat:
                kde[key] = flat.pop(key)
        feature_config: Dict[str, Any] = {"kde": kde}
        if "imputation_years" in flat:
            feature_config["imputation_years"] = flat.pop("imputation_years")
        if "allow_missing_license" in flat:
            feature_config["allow_missing_license"] = self._flag(flat.pop("allow_missing_license"), "allow_missing_license")
        structured["feature_config"] = feature_config

        training = {}
        for key in ("max_iterations", "gradient_tolerance", "ridge_epsilon"):
            if key in flat:
                training[key] = flat.pop(key)
        structured["training"] = training

        return structured
