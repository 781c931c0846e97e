"""Tests for the inspection vocabulary and calendar helpers."""
from datetime import date

import pytest
from pydantic import ValidationError

from src.models.inspection import (
    ClusterLabel,
    LinkedInspection,
    Severity,
    id_sort_key,
    severity_of,
    target_label,
)
from src.utils.date_utils import fractional_years
from src.utils.error_handler import ErrorType, PipelineError
from tests.factories import InspectionRecordFactory


class TestSeverity:

    @pytest.mark.parametrize("code,expected", [
        (1, Severity.CRITICAL),
        (3, Severity.CRITICAL),
        (14, Severity.CRITICAL),
        (15, Severity.SERIOUS),
        (29, Severity.SERIOUS),
        (30, Severity.MINOR),
        (45, Severity.MINOR),
    ])
    def test_bands(self, code, expected):
        assert severity_of(code) == expected

    @pytest.mark.parametrize("code", [0, 46, -3])
    def test_out_of_range_code_is_rejected(self, code):
        with pytest.raises(PipelineError) as exc:
            severity_of(code)
        assert exc.value.error_type == ErrorType.VALIDATION

    def test_record_rejects_invalid_code(self):
        with pytest.raises(PipelineError):
            InspectionRecordFactory(violations=frozenset({46}))


class TestTargetLabel:

    @pytest.mark.parametrize("violations,label", [
        ({3, 32}, 1),
        ({15}, 0),
        (set(), 0),
        ({14}, 1),
    ])
    def test_critical_citation_sets_label(self, violations, label):
        assert target_label(InspectionRecordFactory(violations=frozenset(violations))) == label


class TestFractionalYears:

    def test_half_year(self):
        assert fractional_years(date(2013, 7, 1), date(2014, 1, 1)) == pytest.approx(184 / 365.25)

    def test_same_day(self):
        assert fractional_years(date(2014, 5, 5), date(2014, 5, 5)) == 0.0

    def test_four_years_with_leap_day(self):
        assert fractional_years(date(2010, 1, 1), date(2014, 1, 1)) == 4.0

    def test_reversed_dates_are_an_error(self):
        with pytest.raises(PipelineError):
            fractional_years(date(2014, 1, 2), date(2014, 1, 1))


class TestIdentifiersAndClusters:

    def test_numeric_ids_sort_by_value(self):
        assert sorted(["10", "9", "100"], key=id_sort_key) == ["9", "10", "100"]

    def test_numeric_ids_precede_other_ids(self):
        assert sorted(["b", "2", "a"], key=id_sort_key) == ["2", "a", "b"]

    def test_cluster_order_and_feature_names(self):
        ordered = ClusterLabel.ordered()
        assert [label.value for label in ordered] == ["purple", "blue", "orange", "green", "yellow", "brown"]
        assert ClusterLabel.BROWN.rank == 5
        assert ClusterLabel.PURPLE.feature_name == "cluster_purple"


class TestLinkedInspection:

    def test_previous_must_be_earlier(self):
        current = InspectionRecordFactory(establishment_id="1", date=date(2014, 1, 1))
        later = InspectionRecordFactory(establishment_id="1", date=date(2014, 2, 1))
        with pytest.raises(ValidationError):
            LinkedInspection(current=current, previous=later)

    def test_previous_must_share_establishment(self):
        current = InspectionRecordFactory(establishment_id="1", date=date(2014, 3, 1))
        other = InspectionRecordFactory(establishment_id="2", date=date(2014, 2, 1))
        with pytest.raises(ValidationError):
            LinkedInspection(current=current, previous=other)
