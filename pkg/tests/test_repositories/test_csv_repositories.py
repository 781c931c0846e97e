"""Unit tests for the CSV and JSON repositories."""
from datetime import date

import pytest

from src.models.features import FeatureVector, LabeledInstance
from src.models.inspection import ClusterLabel, InspectionType
from src.models.logistic_model import ClusterAssignment, LogisticModel
from src.repositories.environment_repository import LicenseRepository, WeatherRepository
from src.repositories.feature_repository import FeatureRepository
from src.repositories.inspection_repository import INSPECTION_COLUMNS, InspectionRepository
from src.repositories.model_repository import ModelRepository
from src.utils.error_handler import ErrorType, PipelineError
from tests.factories import FeatureVectorFactory, InspectionRecordFactory, LabeledInstanceFactory

HEADER = ",".join(INSPECTION_COLUMNS)


def inspection_row(inspection_id, when, kind="Canvass", violations="", cluster=""):
    return f"{inspection_id},77,Cafe,CAFE,Restaurant,41.88,-87.63,{when},{kind},{violations},S1,{cluster}"


@pytest.fixture
def inspections_csv(tmp_path):
    def write(*rows):
        path = tmp_path / "inspections.csv"
        path.write_text("\n".join((HEADER,) + rows) + "\n", encoding="utf-8")
        return path
    return write


class TestInspectionRepository:

    def test_cutoff_drops_late_rows(self, inspections_csv):
        path = inspections_csv(
            inspection_row("1", "2014-01-02"),
            inspection_row("2", "2016-05-01"),
            inspection_row("3", "2018-08-01", violations="51. NEW CODE"),
        )
        repository = InspectionRepository(cutoff=date(2018, 7, 1))
        records = repository.read(path)
        assert [r.inspection_id for r in records] == ["1", "2"]
        assert repository.dropped_after_cutoff == 1
        assert repository.rows_read == 3

    def test_type_aliases_are_case_insensitive(self, inspections_csv):
        path = inspections_csv(
            inspection_row("1", "2014-01-02", kind="CANVASS"),
            inspection_row("2", "2014-01-03", kind="Canvass Re-Inspection"),
            inspection_row("3", "2014-01-04", kind="Tag Removal"),
        )
        repository = InspectionRepository()
        kinds = [r.kind for r in repository.read(path)]
        assert kinds == [InspectionType.CANVASS, InspectionType.REINSPECTION, InspectionType.OTHER]
        assert repository.unknown_types == {"tag removal": 1}

    def test_cluster_column_is_parsed(self, inspections_csv):
        path = inspections_csv(inspection_row("1", "2014-01-02", cluster="Purple"))
        assert InspectionRepository().read(path)[0].cluster == ClusterLabel.PURPLE

    def test_malformed_row_reports_line(self, inspections_csv):
        path = inspections_csv(
            inspection_row("1", "2014-01-02"),
            inspection_row("2", "not-a-date"),
        )
        with pytest.raises(PipelineError) as exc:
            InspectionRepository().read(path)
        assert exc.value.context["row"] == 3
        assert "row 3" in str(exc.value)

    def test_missing_required_column(self, tmp_path):
        path = tmp_path / "inspections.csv"
        path.write_text("inspection_id,establishment_id\n1,2\n", encoding="utf-8")
        with pytest.raises(PipelineError) as exc:
            InspectionRepository().read(path)
        assert exc.value.error_type == ErrorType.DATA

    def test_missing_file(self, tmp_path):
        with pytest.raises(PipelineError) as exc:
            InspectionRepository().read(tmp_path / "absent.csv")
        assert exc.value.error_type == ErrorType.DATA

    def test_written_records_read_back_equal(self, tmp_path):
        records = [
            InspectionRecordFactory(violations=frozenset({3, 32}), sanitarian="101", cluster=ClusterLabel.BLUE),
            InspectionRecordFactory(kind=InspectionType.COMPLAINT),
        ]
        path = InspectionRepository().write(tmp_path / "inspections.csv", records)
        assert InspectionRepository().read(path) == records


class TestEnvironmentRepositories:

    def test_license_flags(self, tmp_path):
        path = tmp_path / "licenses.csv"
        path.write_text(
            "establishment_id,license_start_date,has_alcohol,has_tobacco\n77,2009-01-01,1,0\n",
            encoding="utf-8",
        )
        info = LicenseRepository().read(path)[0]
        assert info.license_start == date(2009, 1, 1)
        assert info.has_alcohol and not info.has_tobacco

    def test_weather_out_of_range_is_rejected(self, tmp_path):
        path = tmp_path / "weather.csv"
        path.write_text("date,tmax_f\n2014-01-01,200.0\n", encoding="utf-8")
        with pytest.raises(PipelineError) as exc:
            WeatherRepository().read(path)
        assert exc.value.context["row"] == 2


class TestFeatureRepository:

    def test_splits_keep_raw_floats(self, tmp_path):
        features = FeatureVectorFactory(burglary_kde=1.2345678901234567e-07, tmax_f=71.3).with_cluster(ClusterLabel.GREEN)
        train = [LabeledInstanceFactory(features=features, label=1, previous_sanitarian="101")]
        test = [LabeledInstanceFactory(date=date(2014, 9, 3))]
        path = FeatureRepository().write_splits(tmp_path / "features.csv", train, test)
        read_train, read_test = FeatureRepository().read_splits(path)
        assert read_train == train
        assert read_test == test

    def test_empty_file_reads_as_no_instances(self, tmp_path):
        path = tmp_path / "features.csv"
        path.write_text("", encoding="utf-8")
        assert FeatureRepository().read_splits(path) == ([], [])

    def test_unknown_split(self, tmp_path):
        instance = LabeledInstanceFactory()
        path = FeatureRepository().write(tmp_path / "features.csv", [("holdout", instance)])
        with pytest.raises(PipelineError):
            FeatureRepository().read(path)


class TestModelRepository:

    def test_model_round_trips_exactly(self, tmp_path):
        model = LogisticModel(
            feature_names=["a", "b"],
            coefficients=[0.1 + 0.2, -1.0 / 3.0],
            intercept=-2.5000000000000004,
            standard_errors=[0.5, None],
        )
        repository = ModelRepository()
        loaded = repository.load(repository.save(model, tmp_path / "model.json"))
        assert loaded.coefficients == model.coefficients
        assert loaded.intercept == model.intercept
        assert loaded.standard_errors == [0.5, None]

    def test_model_without_intercept_is_rejected(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text('{"feature_names": ["a"], "coefficients": [1.0]}', encoding="utf-8")
        with pytest.raises(PipelineError) as exc:
            ModelRepository().load(path)
        assert exc.value.context["key"] == "intercept"

    def test_assignment_round_trip(self, tmp_path):
        assignment = ClusterAssignment(
            labels={"101": ClusterLabel.PURPLE, "102": ClusterLabel.BLUE, "103": ClusterLabel.BLUE},
            cluster_means={ClusterLabel.PURPLE: 1.0, ClusterLabel.BLUE: -0.25},
        )
        repository = ModelRepository()
        path = repository.save_assignment(assignment, {"101": 1.0, "102": -0.2, "103": -0.3}, tmp_path / "clusters.csv")
        loaded = repository.load_assignment(path)
        assert loaded.labels == assignment.labels
        assert loaded.cluster_means == assignment.cluster_means
