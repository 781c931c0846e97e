"""Tests for the run configuration loader."""
from datetime import date
from pathlib import Path

import pytest

from config.run_config import RunConfigLoader
from src.utils.error_handler import ErrorType, PipelineError


@pytest.fixture
def config_file(tmp_path):
    def write(text):
        path = tmp_path / "run.conf"
        path.write_text(text, encoding="utf-8")
        return path
    return write


class TestRunConfigLoader:

    def test_file_values_are_structured(self, config_file):
        path = config_file(
            "inspections=data/inspections.csv\n"
            "out=out\n"
            "seed=11\n"
            "bandwidth_meters=500\n"
            "window_days=30\n"
            "train_start=2012-01-01\n"
            "train_end=2013-12-31\n"
            "allow_missing_license=yes\n"
            "max_iterations=25\n"
        )
        config = RunConfigLoader(path).load()
        assert config.seed == 11
        assert config.kde.bandwidth_meters == 500.0
        assert config.kde.window_days == 30
        assert config.train_window.start == date(2012, 1, 1)
        assert config.feature_config.allow_missing_license is True
        assert config.training.max_iterations == 25

    def test_relative_paths_resolve_against_the_file(self, config_file, tmp_path):
        config = RunConfigLoader(config_file("inspections=data/inspections.csv\nout=out\n")).load()
        assert config.inspections == tmp_path.resolve() / "data" / "inspections.csv"
        assert config.out == tmp_path.resolve() / "out"

    def test_flags_win_over_file(self, config_file):
        path = config_file("out=out\nseed=11\ncapacity=4\n")
        config = RunConfigLoader(path).load({"seed": 3, "capacity": None, "out": "/tmp/elsewhere"})
        assert config.seed == 3
        assert config.capacity == 4
        assert config.out == Path("/tmp/elsewhere")

    def test_unknown_key(self, config_file):
        with pytest.raises(PipelineError) as exc:
            RunConfigLoader(config_file("out=out\nbandwith=100\n")).load()
        assert exc.value.error_type == ErrorType.CONFIGURATION
        assert exc.value.context["keys"] == ["bandwith"]

    def test_missing_output_directory(self):
        with pytest.raises(PipelineError) as exc:
            RunConfigLoader().load({"seed": 1})
        assert exc.value.context["key"] == "out"

    def test_missing_config_file(self, tmp_path):
        with pytest.raises(PipelineError) as exc:
            RunConfigLoader(tmp_path / "absent.conf").load()
        assert exc.value.error_type == ErrorType.CONFIGURATION

    def test_overlapping_windows(self):
        with pytest.raises(PipelineError) as exc:
            RunConfigLoader().load({"out": "out", "train_end": "2014-09-15"})
        assert exc.value.error_type == ErrorType.CONFIGURATION

    def test_unparsable_value(self):
        with pytest.raises(PipelineError) as exc:
            RunConfigLoader().load({"out": "out", "split_date": "soon"})
        assert "split_date" in exc.value.reason

    def test_bad_boolean(self, config_file):
        with pytest.raises(PipelineError) as exc:
            RunConfigLoader(config_file("out=out\nallow_missing_license=maybe\n")).load()
        assert exc.value.context["key"] == "allow_missing_license"

    def test_require_inputs(self, tmp_path):
        config = RunConfigLoader().load({"out": str(tmp_path), "inspections": str(tmp_path / "none.csv")})
        with pytest.raises(PipelineError) as exc:
            config.require_inputs(("inspections",))
        assert exc.value.error_type == ErrorType.DATA
        with pytest.raises(PipelineError) as exc:
            config.require_inputs(("licenses",))
        assert exc.value.error_type == ErrorType.CONFIGURATION
