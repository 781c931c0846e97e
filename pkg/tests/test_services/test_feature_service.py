"""Tests for predictor construction."""
import math
from datetime import date, timedelta

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.constants import EARTH_RADIUS_METERS
from src.models.environment import EventKind, PointEvent
from src.models.features import DateWindow, FeatureConfig, KdeConfig
from src.models.inspection import ClusterLabel, GeoPoint, LinkedInspection
from src.repositories.feature_repository import FeatureRepository
from src.services.feature_service import (
    EventIndex,
    build_dataset,
    build_feature_vector,
    kde_intensity,
    license_features,
)
from src.services.ingest_service import link_previous_inspection, load_bundle
from src.utils.error_handler import ErrorType, PipelineError
from tests.factories import CHICAGO_LOOP, InspectionRecordFactory, LicenseInfoFactory, PointEventFactory

LOOP = GeoPoint(lat=CHICAGO_LOOP[0], lon=CHICAGO_LOOP[1])
INSPECTION_DAY = date(2014, 4, 1)


def north_of(point: GeoPoint, meters: float) -> GeoPoint:
    return GeoPoint(lat=point.lat + meters / (EARTH_RADIUS_METERS * math.pi / 180.0), lon=point.lon)


def gaussian(distance: float, bandwidth: float) -> float:
    return math.exp(-distance ** 2 / (2 * bandwidth ** 2)) / (2 * math.pi * bandwidth ** 2)


class TestKdeIntensity:

    def test_no_events(self):
        assert kde_intensity([], LOOP, INSPECTION_DAY, KdeConfig()) == 0.0

    def test_single_event_at_the_query_point(self):
        event = PointEventFactory(date=INSPECTION_DAY - timedelta(days=1))
        value = kde_intensity([event], LOOP, INSPECTION_DAY, KdeConfig(bandwidth_meters=100.0))
        assert value == pytest.approx(1.59155e-5, rel=1e-4)

    def test_two_events_at_known_distances(self):
        cfg = KdeConfig(bandwidth_meters=100.0)
        events = [
            PointEventFactory(date=date(2014, 3, 1), location=north_of(LOOP, 50.0)),
            PointEventFactory(date=date(2014, 3, 2), location=north_of(LOOP, 150.0)),
        ]
        expected = gaussian(50.0, 100.0) + gaussian(150.0, 100.0)
        assert kde_intensity(events, LOOP, INSPECTION_DAY, cfg) == pytest.approx(expected, rel=1e-9)

    def test_window_is_half_open(self):
        cfg = KdeConfig(bandwidth_meters=100.0, window_days=90)
        first_day = PointEventFactory(date=INSPECTION_DAY - timedelta(days=90))
        too_old = PointEventFactory(date=INSPECTION_DAY - timedelta(days=91))
        same_day = PointEventFactory(date=INSPECTION_DAY)
        single = kde_intensity([first_day], LOOP, INSPECTION_DAY, cfg)
        assert single > 0
        assert kde_intensity([first_day, too_old, same_day], LOOP, INSPECTION_DAY, cfg) == single

    def test_distant_event_contributes_nothing_measurable(self):
        far = PointEventFactory(date=date(2014, 3, 1), location=north_of(LOOP, 20000.0))
        assert kde_intensity([far], LOOP, INSPECTION_DAY, KdeConfig(bandwidth_meters=100.0)) == 0.0


event_strategy = st.builds(
    PointEvent,
    kind=st.sampled_from(list(EventKind)),
    date=st.dates(min_value=date(2013, 10, 1), max_value=date(2014, 4, 10)),
    location=st.builds(
        GeoPoint,
        lat=st.floats(min_value=41.85, max_value=41.90),
        lon=st.floats(min_value=-87.66, max_value=-87.60),
    ),
)


class TestEventIndex:

    @settings(max_examples=50, deadline=None)
    @given(
        events=st.lists(event_strategy, max_size=40),
        on=st.dates(min_value=date(2014, 1, 1), max_value=date(2014, 4, 10)),
        window_days=st.integers(min_value=1, max_value=120),
    )
    def test_matches_direct_sum(self, events, on, window_days):
        cfg = KdeConfig(bandwidth_meters=500.0, window_days=window_days)
        index = EventIndex(events)
        for kind in EventKind:
            direct = kde_intensity([e for e in events if e.kind == kind], LOOP, on, cfg)
            assert index.intensity(kind, LOOP, on, cfg) == direct

    def test_counts_per_kind(self):
        events = [PointEventFactory(), PointEventFactory(kind=EventKind.GARBAGE_CART_REQUEST)]
        index = EventIndex(events)
        assert index.count(EventKind.BURGLARY) == 1
        assert index.count(EventKind.SANITATION_COMPLAINT) == 0


class TestLicenseFeatures:

    def test_old_license(self):
        licenses = {"1": LicenseInfoFactory(establishment_id="1", license_start=date(2009, 1, 1), has_alcohol=True)}
        assert license_features("1", date(2014, 1, 1), licenses, FeatureConfig()) == (1, 1, 0)

    def test_exactly_four_years_is_not_over(self):
        licenses = {"1": LicenseInfoFactory(establishment_id="1", license_start=date(2010, 1, 1))}
        assert license_features("1", date(2014, 1, 1), licenses, FeatureConfig())[0] == 0

    def test_license_starting_later(self):
        licenses = {"1": LicenseInfoFactory(establishment_id="1", license_start=date(2015, 1, 1), has_tobacco=True)}
        assert license_features("1", date(2014, 1, 1), licenses, FeatureConfig()) == (0, 0, 1)

    def test_missing_license_fails_by_default(self):
        with pytest.raises(PipelineError) as exc:
            license_features("1", date(2014, 1, 1), {}, FeatureConfig())
        assert exc.value.context["establishment_id"] == "1"

    def test_missing_license_allowed(self):
        cfg = FeatureConfig(allow_missing_license=True)
        assert license_features("1", date(2014, 1, 1), {}, cfg) == (0, 0, 0)


class TestBuildFeatureVector:

    @pytest.fixture
    def inputs(self):
        licenses = {"9": LicenseInfoFactory(establishment_id="9")}
        weather = {date(2013, 6, 1): 75.0, date(2014, 1, 2): 21.5}
        return licenses, weather, EventIndex([])

    def test_previous_inspection_drives_history_features(self, inputs):
        licenses, weather, events = inputs
        previous = InspectionRecordFactory(
            establishment_id="9", date=date(2013, 6, 1), violations=frozenset({16}),
            sanitarian="201", cluster=ClusterLabel.ORANGE,
        )
        current = InspectionRecordFactory(establishment_id="9", date=date(2014, 1, 2))
        vector = build_feature_vector(LinkedInspection(current=current, previous=previous),
                                      licenses, weather, events, FeatureConfig())
        assert vector.past_serious == 1
        assert vector.past_critical == 0
        assert vector.time_since_last == pytest.approx(215 / 365.25)
        assert vector.tmax_f == 21.5
        assert vector.cluster == ClusterLabel.ORANGE
        assert vector.burglary_kde == 0.0

    def test_first_inspection_uses_defaults(self, inputs):
        licenses, weather, events = inputs
        current = InspectionRecordFactory(establishment_id="9", date=date(2013, 6, 1))
        vector = build_feature_vector(LinkedInspection(current=current), licenses, weather, events, FeatureConfig())
        assert (vector.past_serious, vector.past_critical) == (0, 0)
        assert vector.time_since_last == 2.0
        assert vector.cluster is None

    def test_missing_weather(self, inputs):
        licenses, _, events = inputs
        current = InspectionRecordFactory(establishment_id="9", date=date(2013, 6, 1))
        with pytest.raises(PipelineError) as exc:
            build_feature_vector(LinkedInspection(current=current), licenses, {}, events, FeatureConfig())
        assert exc.value.error_type == ErrorType.DATA
        assert exc.value.context["date"] == "2013-06-01"


class TestBuildDataset:

    def test_counts_match_generated_windows(self, synthetic_city):
        directory, manifest = synthetic_city
        bundle = load_bundle(
            directory / "inspections.csv",
            directory / "licenses.csv",
            directory / "weather.csv",
            directory / "events.csv",
        )
        train_window = DateWindow(start=date(2013, 1, 1), end=date(2014, 4, 30))
        test_window = DateWindow(start=date(2014, 9, 1), end=date(2014, 10, 31))
        train, test, summary = build_dataset(
            link_previous_inspection(bundle.records),
            bundle.licenses,
            bundle.weather,
            EventIndex(bundle.events),
            train_window,
            test_window,
        )
        assert summary.n_train == manifest["windows"]["train"]["canvass"]
        assert summary.n_test == manifest["windows"]["test"]["canvass"]
        assert sum(i.label for i in train) == manifest["windows"]["train"]["positive"]
        assert [i.date for i in test] == sorted(i.date for i in test)

    def test_overlapping_windows(self):
        with pytest.raises(PipelineError) as exc:
            build_dataset(
                [], {}, {}, EventIndex([]),
                DateWindow(start=date(2014, 1, 1), end=date(2014, 9, 30)),
                DateWindow(start=date(2014, 9, 1), end=date(2014, 10, 31)),
            )
        assert exc.value.error_type == ErrorType.CONFIGURATION

    def test_empty_windows_write_header_only(self, tmp_path):
        train, test, summary = build_dataset(
            [], {}, {}, EventIndex([]),
            DateWindow(start=date(2013, 1, 1), end=date(2013, 12, 31)),
            DateWindow(start=date(2014, 9, 1), end=date(2014, 10, 31)),
        )
        assert summary.positive_rate_train is None
        path = FeatureRepository().write_splits(tmp_path / "features.csv", train, test)
        assert FeatureRepository().read_splits(path) == ([], [])
