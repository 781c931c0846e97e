"""Logistic model artifact, training configuration and sanitarian clusters."""
import hashlib
import json
import math
from typing import Dict, List, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.constants import (
    CLUSTER_FEATURE_NAMES,
    DEFAULT_GRADIENT_TOLERANCE,
    DEFAULT_MAX_ITERATIONS,
    DEFAULT_RIDGE_EPSILON,
)
from src.models.inspection import ClusterLabel


class TrainingConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    max_iterations: int = Field(DEFAULT_MAX_ITERATIONS, gt=0)
    gradient_tolerance: float = Field(DEFAULT_GRADIENT_TOLERANCE, gt=0)
    ridge_epsilon: float = Field(DEFAULT_RIDGE_EPSILON, gt=0)

    def config_hash(self, feature_names: Sequence[str]) -> str:
        payload = json.dumps(
            {"config": self.model_dump(), "feature_names": list(feature_names)},
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class FitMeta(BaseModel):
    model_config = ConfigDict(frozen=True)

    iterations: int = 0
    loglik: float = 0.0
    grad_norm: float = 0.0
    config_hash: str = ""
    dropped_features: List[str] = Field(default_factory=list)
    objective_trace: List[float] = Field(default_factory=list, description="Penalized log-likelihood per iterate")
    n_instances: int = 0


class LogisticModel(BaseModel):
    """Named coefficients plus intercept; the scoring artifact."""
    model_config = ConfigDict(frozen=True)

    feature_names: List[str]
    coefficients: List[float]
    intercept: float = 0.0
    standard_errors: Optional[List[Optional[float]]] = None
    intercept_standard_error: Optional[float] = None
    meta: FitMeta = Field(default_factory=FitMeta)

    @model_validator(mode='after')
    def validate_shape(self):
        if len(self.coefficients) != len(self.feature_names):
            raise ValueError(
                f"{len(self.coefficients)} coefficients for {len(self.feature_names)} features"
            )
        if len(set(self.feature_names)) != len(self.feature_names):
            raise ValueError("feature names must be unique")
        if not all(math.isfinite(c) for c in self.coefficients) or not math.isfinite(self.intercept):
            raise ValueError("model values must be finite")
        if self.standard_errors is not None and len(self.standard_errors) != len(self.feature_names):
            raise ValueError("standard errors must align with feature names")
        return self

    @classmethod
    def from_mapping(cls, coefficients: Dict[str, float], intercept: float = 0.0) -> "LogisticModel":
        names = list(coefficients)
        return cls(feature_names=names, coefficients=[coefficients[n] for n in names], intercept=intercept)

    def coefficient_map(self) -> Dict[str, float]:
        return dict(zip(self.feature_names, self.coefficients))

    def coefficient(self, feature_name: str) -> Optional[float]:
        return self.coefficient_map().get(feature_name)

    @property
    def has_cluster_features(self) -> bool:
        return all(name in self.feature_names for name in CLUSTER_FEATURE_NAMES)

    def with_coefficients(self, updates: Dict[str, float]) -> "LogisticModel":
        coefficients = [updates.get(name, value) for name, value in zip(self.feature_names, self.coefficients)]
        return self.model_copy(update={"coefficients": coefficients})


class ClusterAssignment(BaseModel):
    """Sanitarian -> cluster map; labels ordered by descending cluster mean."""
    model_config = ConfigDict(frozen=True)

    labels: Dict[str, ClusterLabel]
    cluster_means: Dict[ClusterLabel, float] = Field(..., description="Mean coefficient of each used cluster")
    sse: float = 0.0

    @model_validator(mode='after')
    def validate_order(self):
        means = [self.cluster_means[label] for label in ClusterLabel.ordered() if label in self.cluster_means]
        if any(a <= b for a, b in zip(means, means[1:])):
            raise ValueError("cluster means must be strictly decreasing purple..brown")
        used = [label for label in ClusterLabel.ordered() if label in self.cluster_means]
        if used != list(ClusterLabel.ordered()[:len(used)]):
            raise ValueError("used clusters must be a prefix of the color order")
        return self

    @property
    def used_labels(self) -> List[ClusterLabel]:
        return [label for label in ClusterLabel.ordered() if label in self.cluster_means]

    def members(self, label: ClusterLabel) -> List[str]:
        return sorted(sid for sid, lab in self.labels.items() if lab == label)
