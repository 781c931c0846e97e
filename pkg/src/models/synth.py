"""Configuration of the synthetic mini-city generator."""
from typing import Dict, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.constants import (
    BASE_FEATURE_NAMES,
    CITY_MODEL_COEFFICIENTS,
    CLUSTER_FEATURE_NAMES,
    DEFAULT_TEST_END,
    DEFAULT_TEST_START,
    DEFAULT_TRAIN_END,
    DEFAULT_TRAIN_START,
)
from src.models.features import DateWindow, KdeConfig


def _default_coefficients() -> Dict[str, float]:
    return {name: CITY_MODEL_COEFFICIENTS[name] for name in BASE_FEATURE_NAMES}


def _default_cluster_effects() -> Tuple[float, ...]:
    return tuple(CITY_MODEL_COEFFICIENTS[name] for name in CLUSTER_FEATURE_NAMES)


class SynthConfig(BaseModel):
    """Planted parameters of a synthetic city; every draw is seeded."""
    model_config = ConfigDict(frozen=True)

    seed: int = 7
    n_establishments: int = Field(2000, gt=0)
    n_inspections: int = Field(20000, gt=0)
    n_sanitarians: int = Field(30, ge=1)
    n_chains: int = Field(60, ge=0)
    chain_share: float = Field(0.35, ge=0.0, le=1.0, description="Share of establishments in chains")
    true_coefficients: Dict[str, float] = Field(default_factory=_default_coefficients)
    true_intercept: float = -2.5
    cluster_effects: Tuple[float, float, float, float, float, float] = Field(default_factory=_default_cluster_effects)
    temperature_effect: float = Field(0.05, description="Per-degree log-odds shift of the temperature-sensitive codes")
    date_range: DateWindow = Field(default_factory=lambda: DateWindow(start=DEFAULT_TRAIN_START, end=DEFAULT_TEST_END))
    train_window: DateWindow = Field(default_factory=lambda: DateWindow(start=DEFAULT_TRAIN_START, end=DEFAULT_TRAIN_END))
    test_window: DateWindow = Field(default_factory=lambda: DateWindow(start=DEFAULT_TEST_START, end=DEFAULT_TEST_END))
    event_rates: Dict[str, float] = Field(
        default_factory=lambda: {"burglary": 6.0, "sanitation_complaint": 4.0, "garbage_cart_request": 5.0},
        description="Mean events per day per kind",
    )
    kind_weights: Dict[str, float] = Field(
        default_factory=lambda: {"canvass": 0.8, "complaint": 0.15, "license": 0.03, "reinspection": 0.02}
    )
    serious_rate: float = Field(0.35, ge=0.0, le=1.0)
    minor_rate: float = Field(0.6, ge=0.0, le=1.0)
    alcohol_rate: float = Field(0.25, ge=0.0, le=1.0)
    tobacco_rate: float = Field(0.1, ge=0.0, le=1.0)
    emit_cluster_column: bool = True
    kde: KdeConfig = Field(default_factory=KdeConfig)

    @field_validator('true_coefficients')
    @classmethod
    def validate_coefficients(cls, v):
        missing = [name for name in BASE_FEATURE_NAMES if name not in v]
        unknown = [name for name in v if name not in BASE_FEATURE_NAMES]
        if missing or unknown:
            raise ValueError(f"coefficients must name the base features (missing={missing}, unknown={unknown})")
        return v

    @field_validator('event_rates')
    @classmethod
    def validate_event_rates(cls, v):
        expected = {"burglary", "sanitation_complaint", "garbage_cart_request"}
        if set(v) != expected or any(rate < 0 for rate in v.values()):
            raise ValueError(f"event rates must be non-negative for exactly {sorted(expected)}")
        return v

    @field_validator('kind_weights')
    @classmethod
    def validate_kind_weights(cls, v):
        if "canvass" not in v or any(w < 0 for w in v.values()) or sum(v.values()) <= 0:
            raise ValueError("kind weights must be non-negative and include canvass")
        return v

    @model_validator(mode='after')
    def validate_windows(self):
        if self.train_window.overlaps(self.test_window) or self.train_window.end >= self.test_window.start:
            raise ValueError("train window must end before the test window starts")
        return self
