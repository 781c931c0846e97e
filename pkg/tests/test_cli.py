"""Command-line tests: exit statuses, the error line and a small end-to-end run."""
import json
import logging

import pandas as pd
import pytest

from src.cli import build_parser, main
from src.models.logistic_model import LogisticModel
from src.repositories.feature_repository import FeatureRepository
from src.repositories.inspection_repository import InspectionRepository
from src.repositories.model_repository import ModelRepository
from tests.factories import FeatureVectorFactory, LabeledInstanceFactory

WINDOWS = [
    "--train-start", "2013-01-01", "--train-end", "2014-04-30",
    "--test-start", "2014-09-01", "--test-end", "2014-10-31",
]


@pytest.fixture(autouse=True)
def restore_root_logging():
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


def error_lines(capsys):
    return [line for line in capsys.readouterr().err.splitlines() if line.startswith("error[")]


class TestUsage:

    def test_missing_subcommand(self, capsys):
        assert main([]) == 1
        assert error_lines(capsys)[0].startswith("error[usage]:")

    def test_unknown_strategy(self, capsys, tmp_path):
        assert main(["simulate", "--out", str(tmp_path), "--strategy", "fastest"]) == 1
        assert len(error_lines(capsys)) == 1

    def test_help_exits_cleanly(self):
        assert main(["--help"]) == 0

    def test_every_audit_is_a_subcommand(self):
        args = build_parser().parse_args(["audit", "counterfactual", "--out", "x", "--mode", "reference_mean"])
        assert (args.command, args.audit, args.mode) == ("audit", "counterfactual", "reference_mean")


class TestPortalExport:

    def test_ingest_converts_portal_export(self, tmp_path, synthetic_city):
        city, _ = synthetic_city
        portal = tmp_path / "portal.csv"
        portal.write_text(
            "Inspection ID,DBA Name,AKA Name,License #,Facility Type,Inspection Date,Inspection Type,"
            "Violations,Latitude,Longitude\n"
            "11,SUBWAY 123,SUBWAY,77,Restaurant,03/04/2014,Canvass,3. FOOD,41.9,-87.6\n"
            "12,CAFE,,78,Restaurant,03/05/2014,Complaint,,,\n",
            encoding="utf-8",
        )
        out = tmp_path / "run"
        code = main([
            "ingest", "--out", str(out), "--portal-export", str(portal),
            "--licenses", str(city / "licenses.csv"),
            "--weather", str(city / "weather.csv"),
            "--events", str(city / "events.csv"),
        ])
        assert code == 0
        [record] = InspectionRepository().read(out / "inspections.csv")
        assert (record.inspection_id, record.chain_key) == ("11", "SUBWAY")
        portal_summary = json.loads((out / "portal_summary.json").read_text(encoding="utf-8"))
        assert portal_summary["dropped_missing_coordinates"] == 1
        ingest_summary = json.loads((out / "ingest_summary.json").read_text(encoding="utf-8"))
        assert ingest_summary["records_kept"] == 1

    def test_missing_portal_export(self, tmp_path, capsys):
        code = main(["ingest", "--out", str(tmp_path), "--portal-export", str(tmp_path / "none.csv")])
        assert code == 2
        assert error_lines(capsys)[0].startswith("error[data]:")


class TestFailures:

    def test_train_on_empty_features(self, tmp_path, capsys):
        (tmp_path / "features.csv").write_text("", encoding="utf-8")
        assert main(["train", "--out", str(tmp_path)]) == 2
        lines = error_lines(capsys)
        assert len(lines) == 1
        assert "no instances" in lines[0]

    def test_score_with_model_missing_a_feature(self, tmp_path, capsys):
        test = [LabeledInstanceFactory(), LabeledInstanceFactory(label=1)]
        FeatureRepository().write_splits(tmp_path / "features.csv", [], test)
        names = [n for n in FeatureVectorFactory().as_dict() if n != "tobacco"]
        ModelRepository().save(
            LogisticModel(feature_names=names, coefficients=[0.1] * len(names), intercept=-1.0),
            tmp_path / "model.json",
        )
        assert main(["score", "--out", str(tmp_path)]) == 2
        assert "tobacco" in error_lines(capsys)[0]

    def test_missing_input_file(self, tmp_path, capsys):
        code = main(["ingest", "--out", str(tmp_path), "--inspections", str(tmp_path / "none.csv"),
                     "--licenses", "x", "--weather", "x", "--events", "x"])
        assert code == 2
        assert error_lines(capsys)[0].startswith("error[data]:")

    def test_unconfigured_input(self, tmp_path, capsys):
        assert main(["ingest", "--out", str(tmp_path)]) == 2
        assert error_lines(capsys)[0].startswith("error[configuration]:")

    def test_invalid_log_level_setting(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("ENVIRONMENT", "production")
        monkeypatch.setenv("LOG_LEVEL", "LOUD")
        assert main(["report", "--out", str(tmp_path)]) == 2
        assert error_lines(capsys)[0].startswith("error[configuration]:")

    @pytest.mark.parametrize("error,status,error_type", [
        (ZeroDivisionError("division by zero"), 3, "numerical"),
        (RuntimeError("worker died\nmid-run"), 2, "system"),
    ])
    def test_unexpected_errors_are_converted(self, tmp_path, capsys, mocker, error, status, error_type):
        dispatch = mocker.patch("src.cli.dispatch", side_effect=error)
        assert main(["report", "--out", str(tmp_path)]) == status
        lines = error_lines(capsys)
        assert lines == [f"error[{error_type}]: {type(error).__name__}: {' '.join(str(error).split())}"]
        dispatch.assert_called_once()

    def test_invalid_audit_code(self, tmp_path, capsys):
        assert main(["audit", "monthly", "--out", str(tmp_path), "--code", "15"]) == 2
        assert error_lines(capsys)[0].startswith("error[validation]:")


@pytest.mark.integration
class TestPipelineRun:

    @pytest.fixture(scope="class")
    def run_dir(self, tmp_path_factory):
        root = logging.getLogger()
        handlers, level = root.handlers[:], root.level
        out = tmp_path_factory.mktemp("cli_run")
        assert main(["synth", "--out", str(out), "--seed", "7", "--n-inspections", "3000"] + WINDOWS) == 0
        config = ["--config", str(out / "run.conf"), "--out", str(out)]
        for step in ("ingest", "featurize", "train", "cluster-sanitarians", "score", "simulate"):
            assert main([step] + config + ["--random-replicates", "10"]) == 0, step
        yield out
        root.handlers[:] = handlers
        root.setLevel(level)

    def test_outputs_are_written(self, run_dir):
        for name in ("ingest_summary.json", "features.csv", "model.json", "odds_ratios.csv",
                     "sanitarian_clusters.csv", "clustered_model.json", "scores.csv",
                     "metrics.json", "hitcurve.csv", "schedule_model.csv"):
            assert (run_dir / name).is_file(), name

    def test_dataset_matches_manifest(self, run_dir):
        manifest = json.loads((run_dir / "manifest.json").read_text(encoding="utf-8"))
        summary = json.loads((run_dir / "dataset_summary.json").read_text(encoding="utf-8"))
        assert summary["n_train"] == manifest["windows"]["train"]["canvass"]
        assert summary["n_test"] == manifest["windows"]["test"]["canvass"]

    def test_strategies_are_bracketed_by_best_and_worst(self, run_dir):
        metrics = json.loads((run_dir / "metrics.json").read_text(encoding="utf-8"))
        strategies = metrics["strategies"]
        assert set(strategies) == {"usual", "random", "best", "worst", "model"}
        assert strategies["usual"]["mean_day_reduction"] == 0.0
        for name in ("usual", "random", "model"):
            assert strategies["worst"]["first_half_fraction"] <= strategies[name]["first_half_fraction"]
            assert strategies[name]["first_half_fraction"] <= strategies["best"]["first_half_fraction"]
        assert metrics["random_baseline"]["replicates"] == 10

    def test_scores_follow_the_model_schedule(self, run_dir):
        scores = pd.read_csv(run_dir / "scores.csv", dtype={"inspection_id": str})
        schedule = pd.read_csv(run_dir / "schedule_model.csv", dtype={"inspection_id": str})
        assert list(schedule["score"]) == sorted(scores["score"], reverse=True)

    def test_audits_and_report(self, run_dir):
        config = ["--config", str(run_dir / "run.conf"), "--out", str(run_dir)]
        for audit in ("hit-rates", "codes-by-cluster", "monthly", "counterfactual"):
            assert main(["audit", audit] + config) == 0, audit
        assert main(["report", "--out", str(run_dir)]) == 0
        index = json.loads((run_dir / "report" / "index.json").read_text(encoding="utf-8"))
        names = [entry["name"] for entry in index["files"]]
        assert "metrics.json" in names
        assert "counterfactual.csv" in names

    def test_rerun_is_byte_identical(self, run_dir, tmp_path):
        config = ["--config", str(run_dir / "run.conf"), "--out", str(tmp_path)]
        assert main(["featurize"] + config) == 0
        assert (tmp_path / "features.csv").read_bytes() == (run_dir / "features.csv").read_bytes()
