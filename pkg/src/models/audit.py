"""Audit result tables."""
from datetime import date
from typing import Dict, List, Optional

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.constants import DISPLAY_DECIMALS
from src.models.inspection import InspectionType


class HitRateRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    group: str
    inspections: int = Field(..., ge=0)
    hits: int = Field(..., ge=0)

    @model_validator(mode='after')
    def validate_counts(self):
        if self.hits > self.inspections:
            raise ValueError("hits cannot exceed inspections")
        return self

    @property
    def rate(self) -> float:
        return self.hits / self.inspections if self.inspections else 0.0


class HitRateTable(BaseModel):
    model_config = ConfigDict(frozen=True)

    rows: List[HitRateRow]

    @property
    def total_inspections(self) -> int:
        return sum(row.inspections for row in self.rows)

    @property
    def total_hits(self) -> int:
        return sum(row.hits for row in self.rows)

    def rate_of(self, group: str) -> Optional[float]:
        for row in self.rows:
            if row.group == group:
                return row.rate
        return None

    def display_rates(self) -> Dict[str, float]:
        return {row.group: round(row.rate, DISPLAY_DECIMALS) for row in self.rows}

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "group": [row.group for row in self.rows],
                "inspections": [row.inspections for row in self.rows],
                "hits": [row.hits for row in self.rows],
                "hit_rate": [row.rate for row in self.rows],
                "hit_rate_display": [round(row.rate, DISPLAY_DECIMALS) for row in self.rows],
            }
        )


class MonthlyRate(BaseModel):
    model_config = ConfigDict(frozen=True)

    month: str = Field(..., description="YYYY-MM")
    rate: float = Field(..., ge=0.0, le=1.0)
    n: int = Field(..., gt=0)
    hits: int = Field(..., ge=0)


class PeriodSummary(BaseModel):
    """Monthly hit-rate distribution of one period with boxplot statistics."""
    model_config = ConfigDict(frozen=True)

    period: str
    monthly: List[MonthlyRate]
    median: Optional[float] = None
    lower_hinge: Optional[float] = None
    upper_hinge: Optional[float] = None
    mean: Optional[float] = None
    pooled_rate: Optional[float] = None
    n_inspections: int = 0


class PrePostEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    code: int
    kind: InspectionType
    pre: PeriodSummary
    post: PeriodSummary

    @property
    def median_change(self) -> Optional[float]:
        if self.pre.median is None or self.post.median is None:
            return None
        return self.post.median - self.pre.median


class PrePostSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    split: date
    entries: List[PrePostEntry]

    def entry(self, code: int, kind: InspectionType) -> Optional[PrePostEntry]:
        for entry in self.entries:
            if entry.code == code and entry.kind == kind:
                return entry
        return None


class SeasonalAssociation(BaseModel):
    model_config = ConfigDict(frozen=True)

    code: int
    coefficient: float
    standard_error: Optional[float] = None
    n_inspections: int
    n_chains: int
    dropped_chains: List[str] = Field(default_factory=list)


class CounterfactualRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    inspection_id: str
    cluster: Optional[str]
    label: int
    baseline_probability: float
    counterfactual_probability: float
    baseline_rank: int
    counterfactual_rank: int

    @property
    def rank_shift(self) -> int:
        """Positive when the inspection moves later in the schedule."""
        return self.counterfactual_rank - self.baseline_rank


class CounterfactualReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    mode: str
    rows: List[CounterfactualRow]

    @model_validator(mode='after')
    def validate_ranks(self):
        expected = list(range(1, len(self.rows) + 1))
        if sorted(r.baseline_rank for r in self.rows) != expected:
            raise ValueError("baseline ranks must be a permutation")
        if sorted(r.counterfactual_rank for r in self.rows) != expected:
            raise ValueError("counterfactual ranks must be a permutation")
        return self

    def crossings(self, threshold: int) -> int:
        """Inspections whose rank moves across the given schedule position."""
        return sum(
            1 for r in self.rows
            if (r.baseline_rank <= threshold) != (r.counterfactual_rank <= threshold)
        )

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "inspection_id": [r.inspection_id for r in self.rows],
                "cluster": [r.cluster or "" for r in self.rows],
                "label": [r.label for r in self.rows],
                "baseline_probability": [r.baseline_probability for r in self.rows],
                "counterfactual_probability": [r.counterfactual_probability for r in self.rows],
                "baseline_rank": [r.baseline_rank for r in self.rows],
                "counterfactual_rank": [r.counterfactual_rank for r in self.rows],
                "rank_shift": [r.rank_shift for r in self.rows],
            }
        )


class ClusterPositionRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    group: str
    scheduled: int
    last_position: int
    hits: int

    @property
    def hit_rate(self) -> float:
        return self.hits / self.scheduled if self.scheduled else 0.0
