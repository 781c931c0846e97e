"""
Test factories for creating test data using factory-boy.
"""
from datetime import date, timedelta

import factory
from factory import fuzzy

from src.models.environment import EventKind, LicenseInfo, PointEvent
from src.models.features import DateWindow, FeatureVector, LabeledInstance
from src.models.inspection import GeoPoint, InspectionRecord, InspectionType
from src.models.synth import SynthConfig

CHICAGO_LOOP = (41.8781, -87.6298)


class GeoPointFactory(factory.Factory):
    """Factory for points near the Loop."""

    class Meta:
        model = GeoPoint

    lat = fuzzy.FuzzyFloat(41.80, 41.95)
    lon = fuzzy.FuzzyFloat(-87.75, -87.60)


class InspectionRecordFactory(factory.Factory):
    """Factory for canvass inspection records without violations."""

    class Meta:
        model = InspectionRecord

    inspection_id = factory.Sequence(lambda n: str(100000 + n))
    establishment_id = factory.Sequence(lambda n: str(5000 + n))
    date = factory.Sequence(lambda n: date(2013, 1, 1) + timedelta(days=n))
    kind = InspectionType.CANVASS
    violations = frozenset()
    sanitarian = None
    cluster = None
    location = factory.LazyFunction(lambda: GeoPoint(lat=CHICAGO_LOOP[0], lon=CHICAGO_LOOP[1]))
    name = factory.LazyAttribute(lambda o: f"Kitchen {o.establishment_id}")
    chain_key = ""
    facility_type = "Restaurant"


class LicenseInfoFactory(factory.Factory):

    class Meta:
        model = LicenseInfo

    establishment_id = factory.Sequence(lambda n: str(5000 + n))
    license_start = date(2009, 1, 1)
    has_alcohol = False
    has_tobacco = False


class PointEventFactory(factory.Factory):

    class Meta:
        model = PointEvent

    kind = EventKind.BURGLARY
    date = date(2014, 1, 1)
    location = factory.LazyFunction(lambda: GeoPoint(lat=CHICAGO_LOOP[0], lon=CHICAGO_LOOP[1]))


class FeatureVectorFactory(factory.Factory):
    """All-zero predictors with a mild day."""

    class Meta:
        model = FeatureVector

    past_serious = 0
    past_critical = 0
    time_since_last = 2.0
    age_over_4y = 0
    alcohol = 0
    tobacco = 0
    tmax_f = 60.0
    burglary_kde = 0.0
    sanitation_kde = 0.0
    garbage_kde = 0.0


class LabeledInstanceFactory(factory.Factory):

    class Meta:
        model = LabeledInstance

    inspection_id = factory.Sequence(lambda n: str(n + 1))
    establishment_id = factory.Sequence(lambda n: str(5000 + n))
    date = date(2014, 9, 2)
    label = 0
    features = factory.SubFactory(FeatureVectorFactory)
    previous_sanitarian = None


def small_city_config(**overrides) -> SynthConfig:
    """A synthetic city small enough for unit-level pipeline tests."""
    settings = dict(
        seed=7,
        n_establishments=150,
        n_inspections=1500,
        n_sanitarians=12,
        n_chains=8,
        date_range=DateWindow(start=date(2013, 1, 1), end=date(2014, 10, 31)),
        train_window=DateWindow(start=date(2013, 1, 1), end=date(2014, 4, 30)),
        test_window=DateWindow(start=date(2014, 9, 1), end=date(2014, 10, 31)),
        event_rates={"burglary": 2.0, "sanitation_complaint": 1.0, "garbage_cart_request": 1.0},
    )
    settings.update(overrides)
    return SynthConfig(**settings)
