"""Ingest bookkeeping."""
from datetime import date
from typing import Dict, List

from pydantic import BaseModel, ConfigDict, Field

from src.models.environment import LicenseInfo, PointEvent
from src.models.inspection import InspectionRecord


class IngestSummary(BaseModel):
    """Counts reported by the ingest step; written as ingest_summary.json."""
    model_config = ConfigDict(frozen=True)

    rows_read: int = 0
    records_kept: int = 0
    dropped_after_cutoff: int = 0
    cutoff_date: date
    unknown_types: Dict[str, int] = Field(default_factory=dict, description="Raw type string -> rows mapped to other")
    kind_counts: Dict[str, int] = Field(default_factory=dict)
    same_date_canvass_ties: int = 0
    missing_license: int = Field(0, description="Kept records whose establishment has no license row")
    missing_weather: int = Field(0, description="Kept records whose date has no weather row")

    @property
    def unknown_type_count(self) -> int:
        return sum(self.unknown_types.values())


class PortalAdaptSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    rows_read: int
    rows_written: int
    dropped_missing_coordinates: int


class InspectionBundle(BaseModel):
    """All four canonical inputs, parsed and indexed for feature construction."""
    model_config = ConfigDict(frozen=True)

    records: List[InspectionRecord]
    licenses: Dict[str, LicenseInfo]
    weather: Dict[date, float]
    events: List[PointEvent]
    summary: IngestSummary
