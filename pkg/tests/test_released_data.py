"""
Checks against the released City data.

Skipped unless INSPECTION_DATA_DIR holds inspections.csv, licenses.csv,
weather.csv and events.csv in the canonical layout.
"""
from pathlib import Path

import pytest

from config.settings import Settings
from src.constants import DEFAULT_TEST_END, DEFAULT_TEST_START, DEFAULT_TRAIN_END, DEFAULT_TRAIN_START
from src.models.features import DateWindow, FeatureConfig
from src.models.inspection import InspectionType
from src.models.schedule import ScheduleStrategy
from src.services.audit_service import cluster_schedule_positions, code_frequency_table
from src.services.feature_service import EventIndex, build_dataset
from src.services.ingest_service import link_previous_inspection, load_bundle
from src.services.scheduler_service import default_capacity, evaluate_schedule, make_schedule
from src.services.training_service import fit_logistic, score_instances

pytestmark = [pytest.mark.requires_data, pytest.mark.slow]


@pytest.fixture(scope="module")
def released():
    data_dir = Settings().inspection_data_dir
    if not data_dir or not Path(data_dir).is_dir():
        pytest.skip("INSPECTION_DATA_DIR is not set")
    data_dir = Path(data_dir)
    bundle = load_bundle(
        data_dir / "inspections.csv",
        data_dir / "licenses.csv",
        data_dir / "weather.csv",
        data_dir / "events.csv",
    )
    train, test, summary = build_dataset(
        link_previous_inspection(bundle.records),
        bundle.licenses,
        bundle.weather,
        EventIndex(bundle.events),
        DateWindow(start=DEFAULT_TRAIN_START, end=DEFAULT_TRAIN_END),
        DateWindow(start=DEFAULT_TEST_START, end=DEFAULT_TEST_END),
        FeatureConfig(allow_missing_license=True),
    )
    return bundle, train, test, summary


@pytest.fixture(scope="module")
def model_schedule(released):
    _, train, test, _ = released
    model = fit_logistic(train)
    scores = dict(zip((i.inspection_id for i in test), score_instances(model, test)))
    return make_schedule(test, ScheduleStrategy.MODEL, default_capacity(test), scores=scores)


def test_released_dataset_sizes(released):
    _, train, test, summary = released
    assert len(train) == 17075
    assert len(test) == 1637
    assert summary.positive_rate_train == pytest.approx(0.141, abs=0.001)


def test_temperature_code_frequency(released):
    bundle = released[0]
    table = code_frequency_table(bundle.records, kind=InspectionType.CANVASS).set_index("code")
    assert table.loc[3, "rate"] == pytest.approx(0.093, abs=0.001)


def test_model_schedule_metrics(released, model_schedule):
    test = released[2]
    metrics = evaluate_schedule(model_schedule, test)
    assert metrics.mean_day_reduction == pytest.approx(7.438, abs=0.5)
    assert metrics.std_day_reduction == pytest.approx(25.156, abs=1.0)
    assert metrics.first_half_fraction == pytest.approx(0.69, abs=0.01)


def test_purple_establishments_are_scheduled_early(released, model_schedule):
    rows = {row.group: row for row in cluster_schedule_positions(model_schedule, released[2])}
    purple = rows["purple"]
    assert purple.scheduled == 99
    assert purple.last_position <= 234
