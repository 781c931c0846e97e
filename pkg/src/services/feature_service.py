"""Feature construction: the 16 predictors and labeled train/test matrices."""
import logging
import math
from datetime import date, timedelta
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from src.constants import EARTH_RADIUS_METERS, LICENSE_AGE_THRESHOLD_YEARS
from src.models.environment import EventKind, LicenseInfo, PointEvent
from src.models.features import (
    DatasetSummary,
    DateWindow,
    FeatureConfig,
    FeatureVector,
    KdeConfig,
    LabeledInstance,
)
from src.models.inspection import GeoPoint, InspectionType, LinkedInspection, target_label
from src.utils.date_utils import fractional_years
from src.utils.error_handler import configuration_error, data_error

logger = logging.getLogger(__name__)

_DEGREES_TO_RADIANS = math.pi / 180.0


def ground_offsets(at: GeoPoint, lats: np.ndarray, lons: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Equirectangular east/north offsets in meters from ``at`` to each point."""
    mean_lat = (lats + at.lat) * (0.5 * _DEGREES_TO_RADIANS)
    dx = (lons - at.lon) * np.cos(mean_lat) * EARTH_RADIUS_METERS * _DEGREES_TO_RADIANS
    dy = (lats - at.lat) * EARTH_RADIUS_METERS * _DEGREES_TO_RADIANS
    return dx, dy


def gaussian_kernel_sum(at: GeoPoint, lats: np.ndarray, lons: np.ndarray, bandwidth: float) -> float:
    """Sum of isotropic bivariate Gaussian densities (per square meter) at ``at``."""
    if lats.size == 0:
        return 0.0
    dx, dy = ground_offsets(at, lats, lons)
    squared = dx * dx + dy * dy
    norm = 1.0 / (2.0 * math.pi * bandwidth * bandwidth)
    return float(np.sum(norm * np.exp(-squared / (2.0 * bandwidth * bandwidth))))


def window_bounds(on: date, cfg: KdeConfig) -> Tuple[date, date]:
    """Half-open trailing window [on - window_days, on)."""
    return on - timedelta(days=cfg.window_days), on


def kde_intensity(events: Sequence[PointEvent], at: GeoPoint, on: date, cfg: KdeConfig) -> float:
    """
    Kernel-smoothed intensity of ``events`` around ``at`` over the trailing window.

    Events dated in [on - window_days, on) contribute; the inspection day
    itself is excluded.

    Args:
        events: Events of a single kind
        at: Query location
        on: Inspection date
        cfg: Kernel settings

    Returns:
        float: Intensity per square meter, >= 0
    """
    start, end = window_bounds(on, cfg)
    selected = sorted((e for e in events if start <= e.date < end), key=lambda e: e.date)
    lats = np.array([e.location.lat for e in selected], dtype=float)
    lons = np.array([e.location.lon for e in selected], dtype=float)
    return gaussian_kernel_sum(at, lats, lons, cfg.bandwidth_meters)


class EventIndex:
    """
    Per-kind event arrays sorted by date.

    The trailing window is located by binary search and the kernel sum runs
    over exactly the events ``kde_intensity`` would select, in the same order.
    """

    def __init__(self, events: Iterable[PointEvent]):
        grouped: Dict[EventKind, List[PointEvent]] = {kind: [] for kind in EventKind}
        for event in events:
            grouped[event.kind].append(event)

        self._days: Dict[EventKind, np.ndarray] = {}
        self._lats: Dict[EventKind, np.ndarray] = {}
        self._lons: Dict[EventKind, np.ndarray] = {}
        for kind, items in grouped.items():
            days = np.array([e.date.toordinal() for e in items], dtype=np.int64)
            order = np.argsort(days, kind="stable")
            self._days[kind] = days[order]
            self._lats[kind] = np.array([e.location.lat for e in items], dtype=float)[order]
            self._lons[kind] = np.array([e.location.lon for e in items], dtype=float)[order]

    def count(self, kind: EventKind) -> int:
        return int(self._days[kind].size)

    def window_slice(self, kind: EventKind, on: date, cfg: KdeConfig) -> slice:
        start, end = window_bounds(on, cfg)
        days = self._days[kind]
        lo = int(np.searchsorted(days, start.toordinal(), side="left"))
        hi = int(np.searchsorted(days, end.toordinal(), side="left"))
        return slice(lo, hi)

    def intensity(self, kind: EventKind, at: GeoPoint, on: date, cfg: KdeConfig) -> float:
        window = self.window_slice(kind, on, cfg)
        return gaussian_kernel_sum(at, self._lats[kind][window], self._lons[kind][window], cfg.bandwidth_meters)


def license_features(
    establishment_id: str,
    on: date,
    licenses: Mapping[str, LicenseInfo],
    cfg: FeatureConfig,
) -> Tuple[int, int, int]:
    """(age_over_4y, alcohol, tobacco) for one inspection."""
    info = licenses.get(establishment_id)
    if info is None:
        if not cfg.allow_missing_license:
            raise data_error(
                f"no license for establishment {establishment_id}",
                establishment_id=establishment_id,
            )
        logger.debug(f"License features defaulted to 0 for establishment {establishment_id}")
        return 0, 0, 0

    if info.license_start > on:
        # A license that starts later is not more than four years old
        age_over_4y = 0
    else:
        age_over_4y = int(fractional_years(info.license_start, on) > LICENSE_AGE_THRESHOLD_YEARS)
    return age_over_4y, int(info.has_alcohol), int(info.has_tobacco)


def build_feature_vector(
    link: LinkedInspection,
    licenses: Mapping[str, LicenseInfo],
    weather: Mapping[date, float],
    events: EventIndex,
    cfg: FeatureConfig,
) -> FeatureVector:
    """
    Assemble the predictors of one canvass inspection.

    Raises:
        PipelineError: Missing weather for the date, or a missing license when
            ``cfg.allow_missing_license`` is off
    """
    current = link.current
    previous = link.previous

    tmax = weather.get(current.date)
    if tmax is None:
        raise data_error(
            f"no weather observation for {current.date.isoformat()}",
            date=current.date.isoformat(),
            inspection_id=current.inspection_id,
        )

    age_over_4y, alcohol, tobacco = license_features(current.establishment_id, current.date, licenses, cfg)

    if previous is not None:
        past_serious = int(previous.has_serious)
        past_critical = int(previous.has_critical)
        time_since_last = fractional_years(previous.date, current.date)
    else:
        past_serious = past_critical = 0
        time_since_last = cfg.imputation_years

    kde = {
        kind.feature_name: events.intensity(kind, current.location, current.date, cfg.kde)
        for kind in EventKind
    }

    vector = FeatureVector(
        past_serious=past_serious,
        past_critical=past_critical,
        time_since_last=time_since_last,
        age_over_4y=age_over_4y,
        alcohol=alcohol,
        tobacco=tobacco,
        tmax_f=tmax,
        **kde,
    )
    return vector.with_cluster(previous.cluster if previous is not None else None)


def label_instance(
    link: LinkedInspection,
    licenses: Mapping[str, LicenseInfo],
    weather: Mapping[date, float],
    events: EventIndex,
    cfg: FeatureConfig,
) -> LabeledInstance:
    current = link.current
    return LabeledInstance(
        inspection_id=current.inspection_id,
        establishment_id=current.establishment_id,
        date=current.date,
        label=target_label(current),
        features=build_feature_vector(link, licenses, weather, events, cfg),
        previous_sanitarian=link.previous.sanitarian if link.previous is not None else None,
    )


def positive_rate(instances: Sequence[LabeledInstance]) -> Optional[float]:
    if not instances:
        return None
    return sum(i.label for i in instances) / len(instances)


def build_dataset(
    links: Sequence[LinkedInspection],
    licenses: Mapping[str, LicenseInfo],
    weather: Mapping[date, float],
    events: EventIndex,
    train_window: DateWindow,
    test_window: DateWindow,
    cfg: Optional[FeatureConfig] = None,
) -> Tuple[List[LabeledInstance], List[LabeledInstance], DatasetSummary]:
    """
    Labeled canvass instances inside the train and test windows.

    Returns:
        Tuple: (train, test, summary), instances in (date, id) order

    Raises:
        PipelineError: Overlapping windows or a test window before the train window
    """
    cfg = cfg or FeatureConfig()
    if train_window.overlaps(test_window) or train_window.end >= test_window.start:
        raise configuration_error(
            f"train window {train_window.start}..{train_window.end} must end before "
            f"test window {test_window.start}..{test_window.end}"
        )

    canvass = sorted(
        (link for link in links if link.current.kind == InspectionType.CANVASS),
        key=lambda link: link.current.sort_key,
    )
    missing_license = sum(
        1 for link in canvass
        if (train_window.contains(link.current.date) or test_window.contains(link.current.date))
        and link.current.establishment_id not in licenses
    )
    if missing_license and cfg.allow_missing_license:
        logger.warning(f"{missing_license} instances without license; age/alcohol/tobacco set to 0")

    train: List[LabeledInstance] = []
    test: List[LabeledInstance] = []
    for link in canvass:
        when = link.current.date
        if train_window.contains(when):
            train.append(label_instance(link, licenses, weather, events, cfg))
        elif test_window.contains(when):
            test.append(label_instance(link, licenses, weather, events, cfg))

    summary = DatasetSummary(
        n_train=len(train),
        n_test=len(test),
        positive_rate_train=positive_rate(train),
        positive_rate_test=positive_rate(test),
        missing_license_defaults=missing_license if cfg.allow_missing_license else 0,
        train_window=train_window,
        test_window=test_window,
    )
    logger.info(
        f"Dataset: {summary.n_train} train rows (positive rate {summary.positive_rate_train}), "
        f"{summary.n_test} test rows (positive rate {summary.positive_rate_test})"
    )
    return train, test, summary
