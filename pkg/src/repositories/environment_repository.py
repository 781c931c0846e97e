"""Repositories for licenses, weather and point events."""
import logging
from typing import Dict

from src.models.environment import EventKind, LicenseInfo, PointEvent, WeatherObservation
from src.models.inspection import GeoPoint
from src.repositories.base_repository import BaseCsvRepository, format_float, parse_flag
from src.utils.date_utils import format_date, parse_date

logger = logging.getLogger(__name__)


class LicenseRepository(BaseCsvRepository[LicenseInfo]):
    columns = ("establishment_id", "license_start_date", "has_alcohol", "has_tobacco")

    def parse_row(self, row: Dict[str, str]) -> LicenseInfo:
        return LicenseInfo(
            establishment_id=row["establishment_id"].strip(),
            license_start=parse_date(row["license_start_date"]),
            has_alcohol=parse_flag(row["has_alcohol"]),
            has_tobacco=parse_flag(row["has_tobacco"]),
        )

    def to_row(self, entity: LicenseInfo) -> Dict[str, str]:
        return {
            "establishment_id": entity.establishment_id,
            "license_start_date": format_date(entity.license_start),
            "has_alcohol": "1" if entity.has_alcohol else "0",
            "has_tobacco": "1" if entity.has_tobacco else "0",
        }


class WeatherRepository(BaseCsvRepository[WeatherObservation]):
    columns = ("date", "tmax_f")

    def parse_row(self, row: Dict[str, str]) -> WeatherObservation:
        return WeatherObservation(date=parse_date(row["date"]), tmax_f=float(row["tmax_f"]))

    def to_row(self, entity: WeatherObservation) -> Dict[str, str]:
        return {"date": format_date(entity.date), "tmax_f": format_float(entity.tmax_f)}


class EventRepository(BaseCsvRepository[PointEvent]):
    columns = ("kind", "date", "lat", "lon")

    def parse_row(self, row: Dict[str, str]) -> PointEvent:
        return PointEvent(
            kind=EventKind(row["kind"].strip()),
            date=parse_date(row["date"]),
            location=GeoPoint(lat=float(row["lat"]), lon=float(row["lon"])),
        )

    def to_row(self, entity: PointEvent) -> Dict[str, str]:
        return {
            "kind": entity.kind.value,
            "date": format_date(entity.date),
            "lat": format_float(entity.location.lat),
            "lon": format_float(entity.location.lon),
        }
