"""Tests for report bundling."""
import hashlib
import json

from src.services.report_service import REPORT_FILES, build_report


def test_report_copies_and_indexes_outputs(tmp_path):
    (tmp_path / "metrics.json").write_text('{"capacity": 3}\n', encoding="utf-8")
    (tmp_path / "model.json").write_text('{"intercept": -2.0}\n', encoding="utf-8")

    index = build_report(tmp_path, names=("model.json", "metrics.json", "hitcurve.csv"))

    assert [entry["name"] for entry in index["files"]] == ["metrics.json", "model.json"]
    assert index["missing"] == ["hitcurve.csv"]
    expected = hashlib.sha256(b'{"capacity": 3}\n').hexdigest()
    assert index["files"][0]["sha256"] == expected
    assert (tmp_path / "report" / "model.json").read_text(encoding="utf-8") == '{"intercept": -2.0}\n'
    assert json.loads((tmp_path / "report" / "index.json").read_text(encoding="utf-8")) == index


def test_default_names_include_audit_summaries():
    assert "audit_hit_rates_summary.json" in REPORT_FILES
    assert "audit_codes_by_cluster_summary.json" in REPORT_FILES


def test_empty_output_directory(tmp_path):
    index = build_report(tmp_path)
    assert index["files"] == []
    assert len(index["missing"]) == len(set(REPORT_FILES))
