"""Simulated inspection schedules and their metrics."""
import math
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ScheduleStrategy(str, Enum):
    USUAL = "usual"
    RANDOM = "random"
    BEST = "best"
    WORST = "worst"
    MODEL = "model"


class Schedule(BaseModel):
    """An ordering of the test inspections with simulated day assignments."""
    model_config = ConfigDict(frozen=True)

    ordering: Tuple[str, ...]
    day_of: Dict[str, int]
    capacity: int = Field(..., gt=0, description="Inspections per simulated day")
    strategy: ScheduleStrategy
    seed: Optional[int] = None

    @model_validator(mode='after')
    def validate_days(self):
        if len(set(self.ordering)) != len(self.ordering):
            raise ValueError("ordering must not repeat inspection ids")
        if set(self.day_of) != set(self.ordering):
            raise ValueError("day_of must cover exactly the ordered ids")
        for position, inspection_id in enumerate(self.ordering, start=1):
            if self.day_of[inspection_id] != math.ceil(position / self.capacity):
                raise ValueError(f"day of {inspection_id} inconsistent with position {position}")
        return self

    @classmethod
    def from_ordering(
        cls,
        ordering: List[str],
        capacity: int,
        strategy: ScheduleStrategy,
        seed: Optional[int] = None,
    ) -> "Schedule":
        day_of = {iid: math.ceil(pos / capacity) for pos, iid in enumerate(ordering, start=1)}
        return cls(ordering=tuple(ordering), day_of=day_of, capacity=capacity, strategy=strategy, seed=seed)

    @property
    def size(self) -> int:
        return len(self.ordering)

    @property
    def n_days(self) -> int:
        return math.ceil(self.size / self.capacity) if self.ordering else 0

    def position_of(self) -> Dict[str, int]:
        return {iid: pos for pos, iid in enumerate(self.ordering, start=1)}


class ScheduleMetrics(BaseModel):
    model_config = ConfigDict(frozen=True)

    strategy: ScheduleStrategy
    n_instances: int
    n_hits: int
    mean_day_reduction: float
    std_day_reduction: float
    first_half_fraction: float = Field(..., ge=0.0, le=1.0)
    hit_rate: float = Field(..., ge=0.0, le=1.0, description="Hits over all scheduled inspections")
    first_half_hit_rate: float = Field(..., ge=0.0, le=1.0)
    calendar_mean_day_reduction: Optional[float] = None
    calendar_std_day_reduction: Optional[float] = None
    hit_curve: List[Tuple[int, int]] = Field(default_factory=list)

    @model_validator(mode='after')
    def validate_curve(self):
        hits = [h for _, h in self.hit_curve]
        if any(b < a for a, b in zip(hits, hits[1:])):
            raise ValueError("hit curve must be non-decreasing")
        if hits and hits[-1] != self.n_hits:
            raise ValueError("hit curve must end at the total hit count")
        return self
