"""Base handler class with common functionality for all subcommand handlers."""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd

from config.run_config import RunConfig
from src.constants import (
    CLUSTERED_FEATURES_FILE,
    CLUSTERED_MODEL_FILE,
    FEATURES_FILE,
    MODEL_FILE,
    SANITARIAN_CLUSTERS_FILE,
)
from src.models.features import LabeledInstance
from src.models.inspection import InspectionRecord
from src.models.ingest import InspectionBundle
from src.models.logistic_model import ClusterAssignment, LogisticModel
from src.repositories.feature_repository import FeatureRepository
from src.repositories.model_repository import ModelRepository, write_json
from src.services.ingest_service import load_bundle, parse_inspections
from src.services.scheduler_service import default_capacity

logger = logging.getLogger(__name__)


class BaseHandler:
    """
    Base class for subcommand handlers.

    Loads inputs named by the run configuration and writes every output
    under ``config.out``.
    """

    def __init__(self, config: RunConfig):
        self.config = config
        self.features = FeatureRepository()
        self.models = ModelRepository()
        self.written: List[Path] = []

    def output(self, name: str) -> Path:
        self.config.out.mkdir(parents=True, exist_ok=True)
        return self.config.output_path(name)

    def write_frame(self, name: str, frame: pd.DataFrame) -> Path:
        """Tidy CSV output, LF line endings, no index."""
        path = self.output(name)
        frame.to_csv(path, index=False, lineterminator="\n")
        return self._record(path)

    def write_summary(self, name: str, payload: Dict[str, Any]) -> Path:
        return self._record(write_json(self.output(name), payload))

    def _record(self, path: Path) -> Path:
        self.written.append(path)
        logger.info(f"Wrote {path}")
        return path

    # Inputs

    def load_bundle(self) -> InspectionBundle:
        self.config.require_inputs()
        return load_bundle(
            self.config.inspections,
            self.config.licenses,
            self.config.weather,
            self.config.events,
            self.config.cutoff_date,
        )

    def load_records(self) -> List[InspectionRecord]:
        self.config.require_inputs(("inspections",))
        records, _ = parse_inspections(self.config.inspections, cutoff=self.config.cutoff_date)
        return records

    def features_path(self, clustered: bool = False) -> Path:
        """--features wins; otherwise the (clustered) matrix of a previous step in --out."""
        if self.config.features is not None:
            return self.config.features
        if clustered and self.config.output_path(CLUSTERED_FEATURES_FILE).is_file():
            return self.config.output_path(CLUSTERED_FEATURES_FILE)
        return self.config.output_path(FEATURES_FILE)

    def load_splits(self, clustered: bool = False) -> Tuple[List[LabeledInstance], List[LabeledInstance]]:
        return self.features.read_splits(self.features_path(clustered))

    def model_path(self, clustered: bool = False) -> Path:
        if self.config.model is not None:
            return self.config.model
        if clustered and self.config.output_path(CLUSTERED_MODEL_FILE).is_file():
            return self.config.output_path(CLUSTERED_MODEL_FILE)
        return self.config.output_path(MODEL_FILE)

    def load_model(self, clustered: bool = False) -> LogisticModel:
        return self.models.load(self.model_path(clustered))

    def load_assignment(self) -> Optional[ClusterAssignment]:
        path = self.config.output_path(SANITARIAN_CLUSTERS_FILE)
        if not path.is_file():
            return None
        return self.models.load_assignment(path)

    def capacity_for(self, test: List[LabeledInstance]) -> int:
        if self.config.capacity is not None:
            return self.config.capacity
        capacity = default_capacity(test)
        logger.info(f"Capacity defaulted to {capacity} inspections per day")
        return capacity
