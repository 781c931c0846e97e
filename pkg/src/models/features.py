"""Feature vectors and labeled instances of the risk model."""
from datetime import date
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.constants import (
    CLUSTER_FEATURE_NAMES,
    DEFAULT_BANDWIDTH_METERS,
    DEFAULT_IMPUTATION_YEARS,
    DEFAULT_WINDOW_DAYS,
    FEATURE_NAMES,
)
from src.models.inspection import ClusterLabel


class DateWindow(BaseModel):
    """Inclusive calendar window."""
    model_config = ConfigDict(frozen=True)

    start: date
    end: date

    @model_validator(mode='after')
    def validate_order(self):
        if self.start > self.end:
            raise ValueError("window start must not be after its end")
        return self

    def contains(self, value: date) -> bool:
        return self.start <= value <= self.end

    def overlaps(self, other: "DateWindow") -> bool:
        return self.start <= other.end and other.start <= self.end


class KernelType(str, Enum):
    GAUSSIAN = "gaussian"


class KdeConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    bandwidth_meters: float = Field(DEFAULT_BANDWIDTH_METERS, gt=0, description="Kernel scale h in meters")
    window_days: int = Field(DEFAULT_WINDOW_DAYS, ge=1, description="Trailing window length")
    kernel: KernelType = Field(KernelType.GAUSSIAN, description="Kernel family")


class FeatureConfig(BaseModel):
    """Options of feature construction beyond the KDE settings."""
    model_config = ConfigDict(frozen=True)

    kde: KdeConfig = Field(default_factory=KdeConfig)
    imputation_years: float = Field(DEFAULT_IMPUTATION_YEARS, ge=0, description="time_since_last without history")
    allow_missing_license: bool = Field(False, description="Default license features to 0 instead of failing")


class FeatureVector(BaseModel):
    """The 16 predictors in raw units; nothing is rescaled."""
    model_config = ConfigDict(frozen=True)

    past_serious: int = Field(..., ge=0, le=1)
    past_critical: int = Field(..., ge=0, le=1)
    time_since_last: float = Field(..., ge=0, description="Years since last canvass inspection")
    age_over_4y: int = Field(..., ge=0, le=1)
    alcohol: int = Field(..., ge=0, le=1)
    tobacco: int = Field(..., ge=0, le=1)
    tmax_f: float = Field(..., description="Daily high on the inspection day")
    burglary_kde: float = Field(..., ge=0)
    sanitation_kde: float = Field(..., ge=0)
    garbage_kde: float = Field(..., ge=0)
    cluster_purple: int = Field(0, ge=0, le=1)
    cluster_blue: int = Field(0, ge=0, le=1)
    cluster_orange: int = Field(0, ge=0, le=1)
    cluster_green: int = Field(0, ge=0, le=1)
    cluster_yellow: int = Field(0, ge=0, le=1)
    cluster_brown: int = Field(0, ge=0, le=1)

    @model_validator(mode='after')
    def validate_onehot(self):
        if sum(self.cluster_onehot) > 1:
            raise ValueError("at most one cluster indicator may be set")
        return self

    @property
    def cluster_onehot(self) -> Tuple[int, ...]:
        return tuple(getattr(self, name) for name in CLUSTER_FEATURE_NAMES)

    @property
    def cluster(self) -> Optional[ClusterLabel]:
        for label, flag in zip(ClusterLabel.ordered(), self.cluster_onehot):
            if flag:
                return label
        return None

    def as_dict(self) -> Dict[str, float]:
        return {name: getattr(self, name) for name in FEATURE_NAMES}

    def values(self, names: Sequence[str] = FEATURE_NAMES) -> List[float]:
        return [float(getattr(self, name)) for name in names]

    def with_cluster(self, cluster: Optional[ClusterLabel]) -> "FeatureVector":
        """Copy with the cluster one-hot replaced (all zero for None)."""
        update = {name: 0 for name in CLUSTER_FEATURE_NAMES}
        if cluster is not None:
            update[cluster.feature_name] = 1
        return self.model_copy(update=update)


class LabeledInstance(BaseModel):
    model_config = ConfigDict(frozen=True)

    inspection_id: str
    establishment_id: str = ""
    date: date
    label: int = Field(..., ge=0, le=1)
    features: FeatureVector
    previous_sanitarian: Optional[str] = Field(None, description="Sanitarian of the previous canvass inspection")


class DatasetSummary(BaseModel):
    """Row counts and positive rates per split; written as dataset_summary.json."""
    model_config = ConfigDict(frozen=True)

    n_train: int
    n_test: int
    positive_rate_train: Optional[float] = None
    positive_rate_test: Optional[float] = None
    missing_license_defaults: int = 0
    train_window: DateWindow
    test_window: DateWindow
