"""Repository implementation for canonical inspections.csv files."""
import logging
from collections import Counter
from datetime import date
from typing import Dict, Optional

from src.constants import DATE_FORMAT, INSPECTION_TYPE_ALIASES
from src.models.inspection import ClusterLabel, GeoPoint, InspectionRecord, InspectionType
from src.repositories.base_repository import BaseCsvRepository, format_float
from src.utils.date_utils import format_date, parse_date
from src.utils.error_handler import validation_error
from src.utils.violation_parser import ViolationParser

logger = logging.getLogger(__name__)

INSPECTION_COLUMNS = (
    "inspection_id",
    "establishment_id",
    "name",
    "chain_key",
    "facility_type",
    "lat",
    "lon",
    "inspection_date",
    "inspection_type",
    "violations",
    "sanitarian_id",
    "cluster",
)


def normalize_type_text(text: str) -> str:
    return " ".join(text.strip().lower().split())


class InspectionRepository(BaseCsvRepository[InspectionRecord]):
    """
    Reads and writes inspection records.

    Unknown inspection-type strings map to ``other``; the occurrences are
    counted per raw string in ``unknown_types`` and logged once per read.
    """

    columns = INSPECTION_COLUMNS
    optional_columns = ("cluster", "name", "chain_key", "facility_type", "sanitarian_id")

    def __init__(self, cutoff: Optional[date] = None):
        self.cutoff = cutoff
        self.unknown_types: Counter = Counter()
        self.dropped_after_cutoff = 0
        self.rows_read = 0

    def keep_row(self, row: Dict[str, str]) -> bool:
        """Rows dated on or after the cutoff are dropped before their violations are parsed."""
        self.rows_read += 1
        if self.cutoff is None:
            return True
        try:
            inspection_date = parse_date(row["inspection_date"], DATE_FORMAT)
        except ValueError:
            return True  # reported by parse_row
        if inspection_date >= self.cutoff:
            self.dropped_after_cutoff += 1
            return False
        return True

    def parse_type(self, text: str) -> InspectionType:
        key = normalize_type_text(text)
        alias = INSPECTION_TYPE_ALIASES.get(key)
        if alias is None:
            self.unknown_types[key] += 1
            return InspectionType.OTHER
        return InspectionType(alias)

    @staticmethod
    def parse_cluster(text: str) -> Optional[ClusterLabel]:
        value = text.strip().lower()
        if not value:
            return None
        try:
            return ClusterLabel(value)
        except ValueError:
            raise validation_error(f"unknown cluster label {text!r}", cluster=text)

    def parse_row(self, row: Dict[str, str]) -> InspectionRecord:
        try:
            inspection_date = parse_date(row["inspection_date"], DATE_FORMAT)
        except ValueError:
            raise validation_error(f"invalid inspection_date {row['inspection_date']!r}")

        return InspectionRecord(
            inspection_id=row["inspection_id"].strip(),
            establishment_id=row["establishment_id"].strip(),
            name=row["name"],
            chain_key=row["chain_key"].strip(),
            facility_type=row["facility_type"],
            location=GeoPoint(lat=float(row["lat"]), lon=float(row["lon"])),
            date=inspection_date,
            kind=self.parse_type(row["inspection_type"]),
            violations=ViolationParser.parse(row["violations"]),
            sanitarian=row["sanitarian_id"] or None,
            cluster=self.parse_cluster(row["cluster"]),
        )

    def to_row(self, entity: InspectionRecord) -> Dict[str, str]:
        return {
            "inspection_id": entity.inspection_id,
            "establishment_id": entity.establishment_id,
            "name": entity.name,
            "chain_key": entity.chain_key,
            "facility_type": entity.facility_type,
            "lat": format_float(entity.location.lat),
            "lon": format_float(entity.location.lon),
            "inspection_date": format_date(entity.date),
            "inspection_type": entity.kind.value,
            "violations": ViolationParser.format(entity.violations),
            "sanitarian_id": entity.sanitarian or "",
            "cluster": entity.cluster.value if entity.cluster else "",
        }

    def read(self, path):
        self.unknown_types.clear()
        self.dropped_after_cutoff = 0
        self.rows_read = 0
        records = super().read(path)
        if self.unknown_types:
            logger.warning(
                f"{sum(self.unknown_types.values())} rows with unknown inspection type mapped to other: "
                f"{dict(sorted(self.unknown_types.items()))}"
            )
        return records
