"""Seeded synthetic mini-city: canonical input files drawn from a planted model."""
import logging
import math
from collections import Counter, defaultdict
from datetime import date, timedelta
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.constants import (
    BASE_FEATURE_NAMES,
    CRITICAL_CODES,
    EVENTS_FILE,
    INSPECTIONS_FILE,
    LICENSES_FILE,
    MAX_TMAX_F,
    MINOR_CODES,
    MIN_TMAX_F,
    SERIOUS_CODES,
    SYNTH_CONFIG_FILE,
    SYNTH_MANIFEST_FILE,
    TEMPERATURE_SENSITIVE_CODES,
    WEATHER_FILE,
)
from src.models.environment import EventKind, LicenseInfo, PointEvent, WeatherObservation
from src.models.features import FeatureConfig
from src.models.inspection import ClusterLabel, GeoPoint, InspectionRecord, InspectionType, LinkedInspection
from src.models.synth import SynthConfig
from src.repositories.base_repository import PathLike
from src.repositories.environment_repository import EventRepository, LicenseRepository, WeatherRepository
from src.repositories.inspection_repository import InspectionRepository
from src.repositories.model_repository import write_json
from src.services.feature_service import EventIndex, build_feature_vector
from src.services.ingest_service import normalize_chain_name, select_previous
from src.services.training_service import sigmoid
from src.utils.date_utils import format_date
from src.utils.error_handler import configuration_error

logger = logging.getLogger(__name__)

# Bounding box of the city, degrees
LAT_RANGE = (41.65, 42.02)
LON_RANGE = (-87.94, -87.52)
HOTSPOTS = ((41.88, -87.63), (41.78, -87.66), (41.95, -87.70), (41.74, -87.58))
HOTSPOT_SHARE = 0.5
HOTSPOT_SPREAD_DEGREES = 0.012

ESTABLISHMENT_ID_BASE = 10_000
INSPECTION_ID_BASE = 1_000_000
SANITARIAN_ID_BASE = 100
MAX_LICENSE_AGE_DAYS = 12 * 365
LICENSE_LEAD_DAYS = 2 * 365

REFERENCE_TMAX_F = 65.0
MEAN_TMAX_F = 59.0
TMAX_AMPLITUDE_F = 24.0
TMAX_NOISE_F = 7.0
HOTTEST_DAY_OF_YEAR = 200

PROBABILITY_FLOOR = 1e-6
EXTRA_CODES_MEAN = 0.4

STREAMS = ("establishments", "licenses", "inspections", "labels", "violations", "events", "weather")


def _streams(seed: int) -> Dict[str, np.random.Generator]:
    """One independent generator per purpose, spawned from the run seed."""
    children = np.random.SeedSequence(seed).spawn(len(STREAMS))
    return {name: np.random.default_rng(child) for name, child in zip(STREAMS, children)}


def _round_point(lat: float, lon: float) -> GeoPoint:
    return GeoPoint(lat=round(float(lat), 6), lon=round(float(lon), 6))


def _days(start: date, end: date) -> List[date]:
    return [start + timedelta(days=k) for k in range((end - start).days + 1)]


def sanitarian_clusters(n_sanitarians: int) -> Dict[str, ClusterLabel]:
    """Sanitarians dealt round-robin over the six clusters."""
    colors = ClusterLabel.ordered()
    return {str(SANITARIAN_ID_BASE + k): colors[k % len(colors)] for k in range(n_sanitarians)}


class _Establishment:
    __slots__ = ("establishment_id", "name", "chain_key", "location")

    def __init__(self, establishment_id: str, name: str, location: GeoPoint):
        self.establishment_id = establishment_id
        self.name = name
        self.chain_key = normalize_chain_name(name)
        self.location = location


def draw_establishments(config: SynthConfig, rng: np.random.Generator) -> List[_Establishment]:
    n_chained = int(round(config.chain_share * config.n_establishments)) if config.n_chains else 0
    lats = rng.uniform(*LAT_RANGE, size=config.n_establishments)
    lons = rng.uniform(*LON_RANGE, size=config.n_establishments)
    establishments = []
    for k in range(config.n_establishments):
        eid = str(ESTABLISHMENT_ID_BASE + k)
        name = f"Chain {k % config.n_chains + 1:03d}" if k < n_chained else f"Kitchen {eid}"
        establishments.append(_Establishment(eid, name, _round_point(lats[k], lons[k])))
    return establishments


def draw_licenses(
    config: SynthConfig,
    establishments: List[_Establishment],
    rng: np.random.Generator,
) -> List[LicenseInfo]:
    start = config.date_range.start
    offsets = rng.integers(-LICENSE_LEAD_DAYS, MAX_LICENSE_AGE_DAYS, size=len(establishments))
    alcohol = rng.random(len(establishments)) < config.alcohol_rate
    tobacco = rng.random(len(establishments)) < config.tobacco_rate
    return [
        LicenseInfo(
            establishment_id=e.establishment_id,
            license_start=start - timedelta(days=int(offsets[k])),
            has_alcohol=bool(alcohol[k]),
            has_tobacco=bool(tobacco[k]),
        )
        for k, e in enumerate(establishments)
    ]


def draw_weather(config: SynthConfig, rng: np.random.Generator) -> List[WeatherObservation]:
    """Seasonal sinusoid plus noise, rounded to 0.1 degree."""
    days = _days(config.date_range.start, config.date_range.end)
    noise = rng.normal(0.0, TMAX_NOISE_F, size=len(days))
    observations = []
    for day, eps in zip(days, noise):
        phase = 2.0 * math.pi * (day.timetuple().tm_yday - HOTTEST_DAY_OF_YEAR) / 365.25
        tmax = MEAN_TMAX_F + TMAX_AMPLITUDE_F * math.cos(phase) + eps
        tmax = min(max(tmax, MIN_TMAX_F), MAX_TMAX_F)
        observations.append(WeatherObservation(date=day, tmax_f=round(tmax, 1)))
    return observations


def draw_events(config: SynthConfig, rng: np.random.Generator) -> List[PointEvent]:
    """
    Poisson daily counts per kind from ``window_days`` before the range on,
    so the first inspections already see a full trailing window.
    """
    days = _days(config.date_range.start - timedelta(days=config.kde.window_days), config.date_range.end)
    events = []
    for kind in EventKind:
        counts = rng.poisson(config.event_rates[kind.value], size=len(days))
        for day, count in zip(days, counts):
            for _ in range(int(count)):
                if rng.random() < HOTSPOT_SHARE:
                    lat0, lon0 = HOTSPOTS[rng.integers(len(HOTSPOTS))]
                    lat = rng.normal(lat0, HOTSPOT_SPREAD_DEGREES)
                    lon = rng.normal(lon0, HOTSPOT_SPREAD_DEGREES)
                else:
                    lat = rng.uniform(*LAT_RANGE)
                    lon = rng.uniform(*LON_RANGE)
                events.append(PointEvent(kind=kind, date=day, location=_round_point(lat, lon)))
    events.sort(key=lambda e: (e.date, e.kind.value, e.location.lat, e.location.lon))
    return events


def _draw_schedule(
    config: SynthConfig,
    n_establishments: int,
    sanitarian_ids: List[str],
    rng: np.random.Generator,
) -> List[Tuple[date, int, InspectionType, str]]:
    """(date, establishment index, kind, sanitarian) per inspection, ordered by date."""
    days = _days(config.date_range.start, config.date_range.end)
    kinds = [InspectionType(name) for name in config.kind_weights]
    weights = np.array([config.kind_weights[k.value] for k in kinds], dtype=float)
    day_index = np.sort(rng.integers(0, len(days), size=config.n_inspections))
    establishment_index = rng.integers(0, n_establishments, size=config.n_inspections)
    kind_index = rng.choice(len(kinds), size=config.n_inspections, p=weights / weights.sum())
    sanitarian_index = rng.integers(0, len(sanitarian_ids), size=config.n_inspections)
    return [
        (days[day_index[k]], int(establishment_index[k]), kinds[kind_index[k]], sanitarian_ids[sanitarian_index[k]])
        for k in range(config.n_inspections)
    ]


def _critical_probabilities(config: SynthConfig, tmax: float) -> np.ndarray:
    logits = np.zeros(len(CRITICAL_CODES))
    for code in TEMPERATURE_SENSITIVE_CODES:
        logits[code - CRITICAL_CODES.start] += config.temperature_effect * (tmax - REFERENCE_TMAX_F)
    weights = np.exp(logits - logits.max())
    return weights / weights.sum()


def _draw_codes(codes: range, rng: np.random.Generator, p: Optional[np.ndarray] = None) -> List[int]:
    size = min(1 + int(rng.poisson(EXTRA_CODES_MEAN)), len(codes))
    return [int(c) for c in rng.choice(np.array(codes), size=size, replace=False, p=p)]


def draw_violations(
    config: SynthConfig,
    label: int,
    tmax: float,
    rng: np.random.Generator,
) -> frozenset:
    """Critical codes iff ``label``; temperature-sensitive codes grow likelier on hot days."""
    codes = []
    if label:
        codes += _draw_codes(CRITICAL_CODES, rng, _critical_probabilities(config, tmax))
    if rng.random() < config.serious_rate:
        codes += _draw_codes(SERIOUS_CODES, rng)
    if rng.random() < config.minor_rate:
        codes += _draw_codes(MINOR_CODES, rng)
    return frozenset(codes)


def planted_probability(
    config: SynthConfig,
    base_values: Dict[str, float],
    previous_cluster: Optional[ClusterLabel],
) -> float:
    eta = config.true_intercept + sum(config.true_coefficients[n] * base_values[n] for n in BASE_FEATURE_NAMES)
    if previous_cluster is not None:
        eta += config.cluster_effects[previous_cluster.rank]
    return float(sigmoid(np.array([eta]))[0])


def generate_records(
    config: SynthConfig,
    establishments: List[_Establishment],
    licenses: Dict[str, LicenseInfo],
    weather: Dict[date, float],
    events: EventIndex,
    clusters: Dict[str, ClusterLabel],
    streams: Dict[str, np.random.Generator],
) -> Tuple[List[InspectionRecord], List[float]]:
    """
    Label inspections in (date, id) order.

    Canvass inspections are scored by the planted model on the same features
    the pipeline rebuilds from the written files; the previous canvass
    sanitarian's cluster adds its planted effect.

    Raises:
        PipelineError: A planted probability within PROBABILITY_FLOOR of 0 or 1
    """
    feature_config = FeatureConfig(kde=config.kde)
    label_rng = streams["labels"]
    violation_rng = streams["violations"]
    schedule = _draw_schedule(config, len(establishments), sorted(clusters), streams["inspections"])

    history: Dict[str, List[InspectionRecord]] = defaultdict(list)
    records: List[InspectionRecord] = []
    canvass_probabilities: List[float] = []
    other_probability = float(sigmoid(np.array([config.true_intercept]))[0])

    for k, (day, e_index, kind, sanitarian) in enumerate(schedule):
        establishment = establishments[e_index]
        draft = InspectionRecord(
            inspection_id=str(INSPECTION_ID_BASE + k),
            establishment_id=establishment.establishment_id,
            date=day,
            kind=kind,
            sanitarian=sanitarian,
            cluster=clusters[sanitarian] if config.emit_cluster_column else None,
            location=establishment.location,
            name=establishment.name,
            chain_key=establishment.chain_key,
        )
        if kind == InspectionType.CANVASS:
            previous = select_previous(draft, history[establishment.establishment_id])
            link = LinkedInspection(current=draft, previous=previous)
            vector = build_feature_vector(link, licenses, weather, events, feature_config)
            previous_cluster = clusters.get(previous.sanitarian) if previous is not None else None
            probability = planted_probability(config, vector.as_dict(), previous_cluster)
            if not PROBABILITY_FLOOR < probability < 1.0 - PROBABILITY_FLOOR:
                raise configuration_error(
                    f"planted parameters give probability {probability:.3g} for inspection "
                    f"{draft.inspection_id}; lower the coefficient magnitudes",
                    inspection_id=draft.inspection_id,
                )
            canvass_probabilities.append(probability)
        else:
            probability = other_probability

        label = int(label_rng.random() < probability)
        record = draft.model_copy(update={
            "violations": draw_violations(config, label, weather[day], violation_rng),
        })
        records.append(record)
        if kind == InspectionType.CANVASS:
            history[establishment.establishment_id].append(record)
    return records, canvass_probabilities


def _window_counts(records: List[InspectionRecord], config: SynthConfig) -> Dict[str, Dict[str, int]]:
    counts = {}
    for name, window in (("train", config.train_window), ("test", config.test_window)):
        canvass = [r for r in records if r.kind == InspectionType.CANVASS and window.contains(r.date)]
        counts[name] = {"canvass": len(canvass), "positive": sum(int(r.has_critical) for r in canvass)}
    return counts


def check_degeneracy(window_counts: Dict[str, Dict[str, int]]) -> None:
    """Both classes must occur among the training canvass inspections."""
    train = window_counts["train"]
    if train["canvass"] == 0:
        raise configuration_error("synthetic city has no canvass inspections in the train window")
    if train["positive"] in (0, train["canvass"]):
        raise configuration_error(
            f"synthetic train window is degenerate: {train['positive']} of "
            f"{train['canvass']} canvass inspections are positive"
        )


def build_manifest(
    config: SynthConfig,
    records: List[InspectionRecord],
    licenses: List[LicenseInfo],
    weather: List[WeatherObservation],
    events: List[PointEvent],
    clusters: Dict[str, ClusterLabel],
    canvass_probabilities: List[float],
    window_counts: Dict[str, Dict[str, int]],
) -> Dict:
    kind_counts = Counter(r.kind.value for r in records)
    return {
        "seed": config.seed,
        "config": config.model_dump(mode="json"),
        "planted": {
            "coefficients": dict(config.true_coefficients),
            "intercept": config.true_intercept,
            "cluster_effects": {label.feature_name: config.cluster_effects[label.rank] for label in ClusterLabel.ordered()},
            "temperature_effect": config.temperature_effect,
            "temperature_sensitive_codes": list(TEMPERATURE_SENSITIVE_CODES),
        },
        "sanitarian_clusters": {sid: label.value for sid, label in sorted(clusters.items())},
        "counts": {
            "inspections": len(records),
            "by_kind": dict(sorted(kind_counts.items())),
            "licenses": len(licenses),
            "weather_days": len(weather),
            "events": dict(sorted(Counter(e.kind.value for e in events).items())),
        },
        "windows": window_counts,
        "expected_canvass_positive_rate": float(np.mean(canvass_probabilities)) if canvass_probabilities else None,
        "observed_canvass_positive_rate": (
            sum(int(r.has_critical) for r in records if r.kind == InspectionType.CANVASS) / len(canvass_probabilities)
            if canvass_probabilities else None
        ),
    }


def render_run_config(config: SynthConfig) -> str:
    """Flat key=value config pointing at the generated files."""
    lines = [
        f"inspections={INSPECTIONS_FILE}",
        f"licenses={LICENSES_FILE}",
        f"weather={WEATHER_FILE}",
        f"events={EVENTS_FILE}",
        f"seed={config.seed}",
        f"train_start={format_date(config.train_window.start)}",
        f"train_end={format_date(config.train_window.end)}",
        f"test_start={format_date(config.test_window.start)}",
        f"test_end={format_date(config.test_window.end)}",
        f"bandwidth_meters={config.kde.bandwidth_meters!r}",
        f"window_days={config.kde.window_days}",
    ]
    return "\n".join(lines) + "\n"


def generate(config: SynthConfig, out_dir: PathLike) -> Dict:
    """
    Write inspections.csv, licenses.csv, weather.csv, events.csv,
    manifest.json and run.conf under ``out_dir``.

    The same config always produces byte-identical files.

    Returns:
        Dict: The manifest
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    streams = _streams(config.seed)
    clusters = sanitarian_clusters(config.n_sanitarians)

    establishments = draw_establishments(config, streams["establishments"])
    licenses = draw_licenses(config, establishments, streams["licenses"])
    weather = draw_weather(config, streams["weather"])
    events = draw_events(config, streams["events"])
    logger.info(
        f"Synthetic city: {len(establishments)} establishments, {len(clusters)} sanitarians, "
        f"{len(weather)} weather days, {len(events)} events"
    )

    records, canvass_probabilities = generate_records(
        config,
        establishments,
        {lic.establishment_id: lic for lic in licenses},
        {w.date: w.tmax_f for w in weather},
        EventIndex(events),
        clusters,
        streams,
    )
    window_counts = _window_counts(records, config)
    check_degeneracy(window_counts)

    InspectionRepository().write(out_dir / INSPECTIONS_FILE, records)
    LicenseRepository().write(out_dir / LICENSES_FILE, licenses)
    WeatherRepository().write(out_dir / WEATHER_FILE, weather)
    EventRepository().write(out_dir / EVENTS_FILE, events)

    manifest = build_manifest(
        config, records, licenses, weather, events, clusters, canvass_probabilities, window_counts
    )
    write_json(out_dir / SYNTH_MANIFEST_FILE, manifest)
    (out_dir / SYNTH_CONFIG_FILE).write_text(render_run_config(config), encoding="utf-8")
    logger.info(
        f"Wrote {len(records)} inspections to {out_dir} "
        f"(train canvass {window_counts['train']['canvass']}, test canvass {window_counts['test']['canvass']})"
    )
    return manifest
