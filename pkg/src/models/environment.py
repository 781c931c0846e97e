"""Licenses, weather and point events joined onto inspections."""
import datetime
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field

from src.constants import MAX_TMAX_F, MIN_TMAX_F
from src.models.inspection import GeoPoint


class LicenseInfo(BaseModel):
    model_config = ConfigDict(frozen=True)

    establishment_id: str = Field(..., min_length=1, description="Establishment id")
    license_start: datetime.date = Field(..., description="Business license start date")
    has_alcohol: bool = Field(False, description="Licensed for on-premises alcohol consumption")
    has_tobacco: bool = Field(False, description="Licensed to sell tobacco")


class EventKind(str, Enum):
    BURGLARY = "burglary"
    SANITATION_COMPLAINT = "sanitation_complaint"
    GARBAGE_CART_REQUEST = "garbage_cart_request"

    @property
    def feature_name(self) -> str:
        return EVENT_FEATURE_NAMES[self]


EVENT_FEATURE_NAMES = {
    EventKind.BURGLARY: "burglary_kde",
    EventKind.SANITATION_COMPLAINT: "sanitation_kde",
    EventKind.GARBAGE_CART_REQUEST: "garbage_kde",
}


class PointEvent(BaseModel):
    """One environmental event (burglary, sanitation complaint, cart request)."""
    model_config = ConfigDict(frozen=True)

    kind: EventKind
    date: datetime.date
    location: GeoPoint


class WeatherObservation(BaseModel):
    model_config = ConfigDict(frozen=True)

    date: datetime.date = Field(..., description="Observation date")
    tmax_f: float = Field(..., ge=MIN_TMAX_F, le=MAX_TMAX_F, description="Daily high in Fahrenheit")
