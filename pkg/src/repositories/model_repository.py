"""Persistence of model artifacts and sanitarian cluster assignments."""
import json
import logging
from pathlib import Path
from typing import Dict

import pandas as pd
from pydantic import ValidationError

from src.models.inspection import ClusterLabel
from src.models.logistic_model import ClusterAssignment, LogisticModel
from src.repositories.base_repository import PathLike, format_float
from src.utils.error_handler import data_error

logger = logging.getLogger(__name__)


def write_json(path: PathLike, payload) -> Path:
    """Deterministic JSON: sorted keys, shortest round-tripping floats, trailing newline."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n", encoding="utf-8")
    return path


def read_json(path: PathLike):
    path = Path(path)
    if not path.is_file():
        raise data_error(f"file not found: {path}", path=str(path))
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise data_error(f"{path.name}: invalid JSON ({e.msg} at line {e.lineno})", path=str(path))


class ModelRepository:
    """
    Stores LogisticModel artifacts as model.json.

    Floats are written with their shortest exact representation, so a
    saved model loads back bit-for-bit.
    """

    def save(self, model: LogisticModel, path: PathLike) -> Path:
        payload = {
            "feature_names": list(model.feature_names),
            "coefficients": list(model.coefficients),
            "intercept": model.intercept,
            "standard_errors": model.standard_errors,
            "intercept_standard_error": model.intercept_standard_error,
            "meta": model.meta.model_dump(),
        }
        path = write_json(path, payload)
        logger.info(f"Saved model with {len(model.feature_names)} features to {path.name}")
        return path

    def load(self, path: PathLike) -> LogisticModel:
        payload = read_json(path)
        if not isinstance(payload, dict):
            raise data_error(f"{Path(path).name}: model must be a JSON object")
        for key in ("feature_names", "coefficients", "intercept"):
            if key not in payload:
                raise data_error(f"{Path(path).name}: missing key '{key}'", key=key)
        try:
            return LogisticModel(**payload)
        except ValidationError as e:
            raise data_error(f"{Path(path).name}: invalid model ({e.errors()[0]['msg']})")

    def save_assignment(
        self,
        assignment: ClusterAssignment,
        coefficients: Dict[str, float],
        path: PathLike,
    ) -> Path:
        """Write sanitarian_clusters.csv ordered by cluster then sanitarian id."""
        rows = []
        for label in assignment.used_labels:
            for sanitarian_id in assignment.members(label):
                rows.append({
                    "sanitarian_id": sanitarian_id,
                    "cluster": label.value,
                    "coefficient": format_float(coefficients[sanitarian_id]),
                    "cluster_mean": format_float(assignment.cluster_means[label]),
                })
        frame = pd.DataFrame(rows, columns=["sanitarian_id", "cluster", "coefficient", "cluster_mean"])
        path = Path(path)
        frame.to_csv(path, index=False, lineterminator="\n")
        return path

    def load_assignment(self, path: PathLike) -> ClusterAssignment:
        path = Path(path)
        if not path.is_file():
            raise data_error(f"file not found: {path}", path=str(path))
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
        missing = [c for c in ("sanitarian_id", "cluster", "cluster_mean") if c not in frame.columns]
        if missing:
            raise data_error(f"{path.name}: missing columns {missing}", columns=missing)
        labels: Dict[str, ClusterLabel] = {}
        means: Dict[ClusterLabel, float] = {}
        try:
            for row in frame.to_dict("records"):
                label = ClusterLabel(row["cluster"])
                labels[row["sanitarian_id"]] = label
                means[label] = float(row["cluster_mean"])
            return ClusterAssignment(labels=labels, cluster_means=means)
        except (ValueError, ValidationError) as e:
            raise data_error(f"{path.name}: invalid cluster assignment ({e})")
