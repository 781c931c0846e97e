"""Ingest: canonical inputs -> records, previous-inspection links and window filters."""
import logging
import re
from collections import Counter, defaultdict
from datetime import date
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import pandas as pd

from src.constants import FOOD_CODE_CUTOFF, PORTAL_DATE_FORMAT
from src.models.environment import LicenseInfo, PointEvent, WeatherObservation
from src.models.ingest import IngestSummary, InspectionBundle, PortalAdaptSummary
from src.models.inspection import (
    InspectionRecord,
    InspectionType,
    LinkedInspection,
)
from src.repositories.base_repository import PathLike
from src.repositories.environment_repository import EventRepository, LicenseRepository, WeatherRepository
from src.repositories.inspection_repository import InspectionRepository
from src.utils.date_utils import month_key, parse_date
from src.utils.error_handler import data_error, validation_error
from src.utils.violation_parser import ViolationParser

logger = logging.getLogger(__name__)

PORTAL_COLUMNS = {
    "Inspection ID": "inspection_id",
    "License #": "establishment_id",
    "DBA Name": "dba_name",
    "AKA Name": "aka_name",
    "Facility Type": "facility_type",
    "Latitude": "lat",
    "Longitude": "lon",
    "Inspection Date": "inspection_date",
    "Inspection Type": "inspection_type",
    "Violations": "violations",
}

_NON_WORD = re.compile(r"[^\w\s]")


def parse_violation_field(text: str) -> FrozenSet[int]:
    return ViolationParser.parse(text)


def format_violation_field(codes: Iterable[int]) -> str:
    return ViolationParser.format(codes)


def normalize_chain_name(name: str) -> str:
    """Upper-case, punctuation stripped, whitespace collapsed."""
    return " ".join(_NON_WORD.sub(" ", name or "").upper().split())


def adapt_portal_export(src: PathLike, dst: PathLike) -> PortalAdaptSummary:
    """
    Map the public portal export onto the canonical inspections.csv.

    Rows without coordinates are dropped and counted; sanitarian and
    cluster columns are left empty because the portal does not publish them.
    """
    src = Path(src)
    if not src.is_file():
        raise data_error(f"input file not found: {src}", path=str(src))
    frame = pd.read_csv(src, dtype=str, keep_default_na=False, encoding="utf-8")
    missing = [column for column in PORTAL_COLUMNS if column not in frame.columns]
    if missing:
        raise data_error(f"{src.name}: missing portal columns {missing}", columns=missing)
    frame = frame.rename(columns=PORTAL_COLUMNS)

    has_coordinates = (frame["lat"].str.strip() != "") & (frame["lon"].str.strip() != "")
    dropped = int((~has_coordinates).sum())
    frame = frame[has_coordinates].copy()

    def canonical_date(text: str) -> str:
        try:
            return parse_date(text, PORTAL_DATE_FORMAT).isoformat()
        except ValueError:
            # Some exports carry a time suffix
            return parse_date(text.split()[0], PORTAL_DATE_FORMAT).isoformat()

    name_source = frame["aka_name"].where(frame["aka_name"].str.strip() != "", frame["dba_name"])
    out = pd.DataFrame({
        "inspection_id": frame["inspection_id"].str.strip(),
        "establishment_id": frame["establishment_id"].str.strip(),
        "name": frame["dba_name"],
        "chain_key": name_source.map(normalize_chain_name),
        "facility_type": frame["facility_type"],
        "lat": frame["lat"].str.strip(),
        "lon": frame["lon"].str.strip(),
        "inspection_date": frame["inspection_date"].map(canonical_date),
        "inspection_type": frame["inspection_type"],
        "violations": frame["violations"],
        "sanitarian_id": "",
        "cluster": "",
    })
    dst = Path(dst)
    dst.parent.mkdir(parents=True, exist_ok=True)
    out.to_csv(dst, index=False, lineterminator="\n", encoding="utf-8")
    if dropped:
        logger.warning(f"Dropped {dropped} portal rows without coordinates")
    return PortalAdaptSummary(rows_read=len(frame) + dropped, rows_written=len(out), dropped_missing_coordinates=dropped)


def parse_inspections(
    path: PathLike,
    licenses: Optional[Dict[str, LicenseInfo]] = None,
    weather: Optional[Dict[date, float]] = None,
    cutoff: date = FOOD_CODE_CUTOFF,
) -> Tuple[List[InspectionRecord], IngestSummary]:
    """
    Parse inspections.csv into records.

    Args:
        path: Canonical inspections file
        licenses: Optional license index, used only to count records without one
        weather: Optional weather index, used only to count uncovered dates
        cutoff: Rows dated on or after this date are dropped

    Returns:
        Tuple[List[InspectionRecord], IngestSummary]: Records in file order and counts

    Raises:
        PipelineError: Malformed row (context carries ``row``)
    """
    repository = InspectionRepository(cutoff=cutoff)
    records = repository.read(path)

    seen = set()
    for record in records:
        if record.inspection_id in seen:
            raise data_error(f"duplicate inspection_id {record.inspection_id}", inspection_id=record.inspection_id)
        seen.add(record.inspection_id)

    if repository.dropped_after_cutoff:
        logger.info(f"Dropped {repository.dropped_after_cutoff} rows dated on or after {cutoff.isoformat()}")

    kind_counts = Counter(record.kind.value for record in records)
    summary = IngestSummary(
        rows_read=repository.rows_read,
        records_kept=len(records),
        dropped_after_cutoff=repository.dropped_after_cutoff,
        cutoff_date=cutoff,
        unknown_types=dict(sorted(repository.unknown_types.items())),
        kind_counts={kind.value: kind_counts.get(kind.value, 0) for kind in InspectionType},
        same_date_canvass_ties=count_same_date_ties(records),
        missing_license=(
            sum(1 for r in records if r.establishment_id not in licenses) if licenses is not None else 0
        ),
        missing_weather=sum(1 for r in records if r.date not in weather) if weather is not None else 0,
    )
    return records, summary


def _canvass_by_establishment(records: Iterable[InspectionRecord]) -> Dict[str, List[InspectionRecord]]:
    groups: Dict[str, List[InspectionRecord]] = defaultdict(list)
    for record in records:
        if record.kind == InspectionType.CANVASS:
            groups[record.establishment_id].append(record)
    for group in groups.values():
        group.sort(key=lambda r: r.sort_key)
    return groups


def count_same_date_ties(records: Sequence[InspectionRecord]) -> int:
    """Establishment-dates carrying more than one canvass inspection."""
    counts = Counter(
        (r.establishment_id, r.date) for r in records if r.kind == InspectionType.CANVASS
    )
    return sum(1 for n in counts.values() if n > 1)


def select_previous(current: InspectionRecord, history: Sequence[InspectionRecord]) -> Optional[InspectionRecord]:
    """
    Most recent strictly earlier canvass inspection of ``current``'s establishment.

    ``history`` must be sorted by (date, id). Several candidates on the latest
    earlier date are resolved in ascending id order, the last one winning,
    with a warning.
    """
    candidates = [r for r in history if r.date < current.date and r.kind == InspectionType.CANVASS]
    if not candidates:
        return None
    latest = candidates[-1].date
    tied = [r for r in candidates if r.date == latest]
    if len(tied) > 1:
        logger.warning(
            f"Establishment {current.establishment_id} has {len(tied)} canvass inspections on "
            f"{latest.isoformat()}; linking {current.inspection_id} to {tied[-1].inspection_id}"
        )
    return tied[-1]


def link_previous_inspection(records: Sequence[InspectionRecord]) -> List[LinkedInspection]:
    """
    Pair every canvass record with its establishment's previous canvass record.

    Returns:
        List[LinkedInspection]: One link per canvass record, ordered by (date, id)
    """
    links = []
    for group in _canvass_by_establishment(records).values():
        for index, current in enumerate(group):
            previous = select_previous(current, group[:index])
            links.append(LinkedInspection(current=current, previous=previous))
    links.sort(key=lambda link: link.current.sort_key)
    return links


def filter_window(
    records: Sequence[InspectionRecord],
    start: date,
    end: date,
    kind: Optional[InspectionType] = None,
) -> List[InspectionRecord]:
    """Records with start <= date <= end (inclusive) and, when given, of ``kind``."""
    if start > end:
        raise validation_error(f"window start {start.isoformat()} is after end {end.isoformat()}")
    return [
        r for r in records
        if start <= r.date <= end and (kind is None or r.kind == kind)
    ]


def monthly_counts(records: Sequence[InspectionRecord]) -> pd.DataFrame:
    """Record counts per calendar month (YYYY-MM), months without records omitted."""
    counts = Counter(month_key(r.date) for r in records)
    return pd.DataFrame(
        {"month": sorted(counts), "count": [counts[m] for m in sorted(counts)]},
        columns=["month", "count"],
    )


def index_licenses(licenses: Sequence[LicenseInfo]) -> Dict[str, LicenseInfo]:
    index: Dict[str, LicenseInfo] = {}
    for info in licenses:
        if info.establishment_id in index:
            raise data_error(f"duplicate license row for establishment {info.establishment_id}",
                             establishment_id=info.establishment_id)
        index[info.establishment_id] = info
    return index


def index_weather(observations: Sequence[WeatherObservation]) -> Dict[date, float]:
    """Date -> daily high; exactly one observation per date."""
    index: Dict[date, float] = {}
    for observation in observations:
        if observation.date in index:
            raise data_error(f"duplicate weather observation for {observation.date.isoformat()}",
                             date=observation.date.isoformat())
        index[observation.date] = observation.tmax_f
    return index


def load_bundle(
    inspections: PathLike,
    licenses: PathLike,
    weather: PathLike,
    events: PathLike,
    cutoff: date = FOOD_CODE_CUTOFF,
) -> InspectionBundle:
    """Parse all four canonical inputs."""
    license_index = index_licenses(LicenseRepository().read(licenses))
    weather_index = index_weather(WeatherRepository().read(weather))
    event_list: List[PointEvent] = EventRepository().read(events)
    records, summary = parse_inspections(inspections, license_index, weather_index, cutoff)
    if summary.missing_license or summary.missing_weather:
        logger.warning(
            f"{summary.missing_license} records without license, "
            f"{summary.missing_weather} records without weather"
        )
    return InspectionBundle(
        records=records,
        licenses=license_index,
        weather=weather_index,
        events=event_list,
        summary=summary,
    )
