"""Inspection vocabulary: violation severity, inspection kinds, clusters, records."""
import datetime
from enum import Enum
from typing import FrozenSet, Iterable, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.constants import (
    CLUSTER_COLORS,
    CRITICAL_CODES,
    MAX_VIOLATION_CODE,
    MIN_VIOLATION_CODE,
    SERIOUS_CODES,
)
from src.utils.error_handler import validation_error


class Severity(str, Enum):
    """Severity band of a violation code under the pre-July-2018 food code."""
    CRITICAL = "critical"
    SERIOUS = "serious"
    MINOR = "minor"


class InspectionType(str, Enum):
    CANVASS = "canvass"
    COMPLAINT = "complaint"
    LICENSE = "license"
    REINSPECTION = "reinspection"
    OTHER = "other"


class ClusterLabel(str, Enum):
    """Color names of the six sanitarian clusters, highest coefficient first."""
    PURPLE = "purple"
    BLUE = "blue"
    ORANGE = "orange"
    GREEN = "green"
    YELLOW = "yellow"
    BROWN = "brown"

    @classmethod
    def ordered(cls) -> Tuple["ClusterLabel", ...]:
        return tuple(cls(color) for color in CLUSTER_COLORS)

    @property
    def rank(self) -> int:
        return CLUSTER_COLORS.index(self.value)

    @property
    def feature_name(self) -> str:
        return f"cluster_{self.value}"


def severity_of(code: int) -> Severity:
    """Severity band of a violation code: 1-14 critical, 15-29 serious, 30-45 minor.

    Raises:
        PipelineError: If the code is outside 1..45.
    """
    if isinstance(code, bool) or not isinstance(code, int):
        raise validation_error(f"invalid violation code {code!r}", code=code)
    if not MIN_VIOLATION_CODE <= code <= MAX_VIOLATION_CODE:
        raise validation_error(f"invalid violation code {code}", code=code)
    if code in CRITICAL_CODES:
        return Severity.CRITICAL
    if code in SERIOUS_CODES:
        return Severity.SERIOUS
    return Severity.MINOR


def has_severity(codes: Iterable[int], severity: Severity) -> bool:
    return any(severity_of(code) == severity for code in codes)


def id_sort_key(identifier: str) -> Tuple[int, int, str]:
    """Ascending id order: numeric ids by value, then other ids lexically."""
    if identifier.isdigit():
        return (0, int(identifier), "")
    return (1, 0, identifier)


class GeoPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    lat: float = Field(..., ge=-90.0, le=90.0, description="Latitude in degrees")
    lon: float = Field(..., ge=-180.0, le=180.0, description="Longitude in degrees")


class InspectionRecord(BaseModel):
    """One inspection event of one establishment."""
    model_config = ConfigDict(frozen=True)

    inspection_id: str = Field(..., min_length=1, description="Unique inspection id")
    establishment_id: str = Field(..., min_length=1, description="Establishment (license) id")
    date: datetime.date = Field(..., description="Inspection date")
    kind: InspectionType = Field(..., description="Inspection type")
    violations: FrozenSet[int] = Field(default_factory=frozenset, description="Cited violation codes")
    sanitarian: Optional[str] = Field(None, description="Sanitarian id")
    cluster: Optional[ClusterLabel] = Field(None, description="Cluster of the inspecting sanitarian")
    location: GeoPoint = Field(..., description="Establishment location")
    name: str = Field("", description="Establishment name")
    chain_key: str = Field("", description="Normalized chain name")
    facility_type: str = Field("", description="Facility type")

    @field_validator('violations')
    @classmethod
    def validate_violations(cls, v):
        """Every cited code must belong to the pre-2018 taxonomy."""
        for code in v:
            severity_of(code)
        return v

    @field_validator('sanitarian')
    @classmethod
    def validate_sanitarian(cls, v):
        if v is not None and not v.strip():
            return None
        return v.strip() if v else v

    @property
    def has_critical(self) -> bool:
        return has_severity(self.violations, Severity.CRITICAL)

    @property
    def has_serious(self) -> bool:
        return has_severity(self.violations, Severity.SERIOUS)

    @property
    def sort_key(self) -> Tuple:
        return (self.date, id_sort_key(self.inspection_id))


def target_label(record: InspectionRecord) -> int:
    """1 iff the inspection cited at least one critical violation."""
    return int(record.has_critical)


class LinkedInspection(BaseModel):
    """A canvass inspection paired with the establishment's previous canvass inspection."""
    model_config = ConfigDict(frozen=True)

    current: InspectionRecord
    previous: Optional[InspectionRecord] = None

    @field_validator('previous')
    @classmethod
    def validate_previous(cls, v, info):
        current = info.data.get('current')
        if v is not None and current is not None:
            if v.establishment_id != current.establishment_id:
                raise ValueError("previous inspection belongs to another establishment")
            if v.date >= current.date:
                raise ValueError("previous inspection is not strictly earlier")
        return v
