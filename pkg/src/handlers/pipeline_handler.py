"""Handlers for the forecasting pipeline: ingest through simulate."""

import logging
from typing import Dict, List, Optional

import pandas as pd

from src.constants import (
    CLUSTERED_FEATURES_FILE,
    CLUSTERED_MODEL_FILE,
    DATASET_SUMMARY_FILE,
    FEATURE_NAMES,
    FEATURES_FILE,
    FULL_MODEL_FILE,
    HIT_CURVE_FILE,
    INGEST_SUMMARY_FILE,
    INSPECTIONS_FILE,
    METRICS_FILE,
    MODEL_FILE,
    MONTHLY_COUNTS_FILE,
    ODDS_RATIOS_FILE,
    PORTAL_SUMMARY_FILE,
    SANITARIAN_CLUSTERS_FILE,
    SCHEDULE_FILE_TEMPLATE,
    SCORES_FILE,
)
from src.handlers.base_handler import BaseHandler
from src.models.logistic_model import LogisticModel
from src.models.schedule import ScheduleStrategy
from src.services.clustering_service import cluster_sanitarians
from src.services.feature_service import EventIndex, build_dataset
from src.services.ingest_service import adapt_portal_export, link_previous_inspection, monthly_counts
from src.services.scheduler_service import (
    evaluate_schedule,
    make_schedule,
    random_baseline,
    random_seeds,
)
from src.services.training_service import (
    assign_clusters,
    fit_logistic,
    fit_sanitarian_model,
    odds_ratio_table,
    refit_with_clusters,
    score_instances,
)
from src.utils.error_handler import validation_error

logger = logging.getLogger(__name__)


class PipelineHandler(BaseHandler):
    """Runs one pipeline step per call; each step reads its inputs from disk."""

    def ingest(self) -> List:
        if self.config.portal_export is not None:
            self.convert_portal_export()
        bundle = self.load_bundle()
        summary = bundle.summary
        logger.info(
            f"Ingested {summary.records_kept} of {summary.rows_read} rows "
            f"({summary.dropped_after_cutoff} after cutoff, {summary.unknown_type_count} unknown types)"
        )
        self.write_summary(INGEST_SUMMARY_FILE, summary.model_dump(mode="json"))
        self.write_frame(MONTHLY_COUNTS_FILE, monthly_counts(bundle.records))
        return self.written

    def convert_portal_export(self) -> None:
        """Write the portal export as inspections.csv under --out and ingest that file."""
        target = self.output(INSPECTIONS_FILE)
        summary = adapt_portal_export(self.config.portal_export, target)
        self._record(target)
        self.write_summary(PORTAL_SUMMARY_FILE, summary.model_dump(mode="json"))
        self.config = self.config.model_copy(update={"inspections": target})
        logger.info(f"Converted {summary.rows_written} portal rows; later steps take --inspections {target}")

    def featurize(self) -> List:
        bundle = self.load_bundle()
        links = link_previous_inspection(bundle.records)
        train, test, summary = build_dataset(
            links,
            bundle.licenses,
            bundle.weather,
            EventIndex(bundle.events),
            self.config.train_window,
            self.config.test_window,
            self.config.feature_config,
        )
        self._record(self.features.write_splits(self.output(FEATURES_FILE), train, test))
        self.write_summary(DATASET_SUMMARY_FILE, summary.model_dump(mode="json"))
        return self.written

    def train(self) -> List:
        train, _ = self.load_splits()
        model = fit_logistic(train, self.config.training, FEATURE_NAMES)
        self._record(self.models.save(model, self.output(MODEL_FILE)))
        self.write_frame(ODDS_RATIOS_FILE, odds_ratio_table(model))
        return self.written

    def cluster_sanitarians(self) -> List:
        """
        Full per-sanitarian model on the training split, optimal clustering of
        its coefficients, and the refit with cluster indicators.
        """
        train, test = self.load_splits()
        full_model, effects = fit_sanitarian_model(train, self.config.training)
        assignment = cluster_sanitarians(effects)
        clustered_model, clustered_train = refit_with_clusters(train, assignment, self.config.training)
        clustered_test = assign_clusters(test, assignment, allow_unmapped=True)

        self._record(self.models.save(full_model, self.output(FULL_MODEL_FILE)))
        self._record(self.models.save_assignment(assignment, effects, self.output(SANITARIAN_CLUSTERS_FILE)))
        self._record(self.models.save(clustered_model, self.output(CLUSTERED_MODEL_FILE)))
        self._record(self.features.write_splits(self.output(CLUSTERED_FEATURES_FILE), clustered_train, clustered_test))
        return self.written

    def _checked_model(self, clustered: bool = False) -> LogisticModel:
        """The scoring model; its features must be exactly the feature-file layout."""
        model = self.load_model(clustered)
        unknown = [name for name in model.feature_names if name not in FEATURE_NAMES]
        if unknown:
            raise validation_error(f"model feature {unknown[0]} is not a feature column", feature=unknown[0])
        absent = [name for name in FEATURE_NAMES if name not in model.feature_names]
        if absent:
            raise validation_error(f"model.json is missing feature {absent[0]}", feature=absent[0])
        return model

    def score(self) -> List:
        model = self._checked_model()
        _, test = self.load_splits()
        probabilities = score_instances(model, test)
        frame = pd.DataFrame({
            "inspection_id": [i.inspection_id for i in test],
            "date": [i.date.isoformat() for i in test],
            "score": probabilities,
            "label": [i.label for i in test],
        })
        self.write_frame(SCORES_FILE, frame)
        return self.written

    def _strategies(self) -> List[ScheduleStrategy]:
        if self.config.strategy:
            try:
                return [ScheduleStrategy(self.config.strategy)]
            except ValueError:
                raise validation_error(f"unknown strategy {self.config.strategy!r}")
        return list(ScheduleStrategy)

    def simulate(self) -> List:
        """
        Schedules of the requested strategy (all five when none is named),
        their metrics against the usual schedule, and the seed-averaged random
        baseline.
        """
        _, test = self.load_splits()
        if not test:
            raise validation_error("no test instances to schedule")
        capacity = self.capacity_for(test)
        strategies = self._strategies()

        scores: Optional[Dict[str, float]] = None
        if ScheduleStrategy.MODEL in strategies:
            model = self._checked_model()
            scores = dict(zip((i.inspection_id for i in test), score_instances(model, test)))

        usual = make_schedule(test, ScheduleStrategy.USUAL, capacity)
        labels = {i.inspection_id: i.label for i in test}
        metrics = {}
        curves = []
        for strategy in strategies:
            schedule = make_schedule(test, strategy, capacity, scores, seed=self.config.seed)
            result = evaluate_schedule(schedule, test, usual)
            metrics[strategy.value] = result.model_dump(mode="json", exclude={"hit_curve"})
            curves.extend({"strategy": strategy.value, "day": day, "cumulative_hits": hits} for day, hits in result.hit_curve)
            self.write_frame(
                SCHEDULE_FILE_TEMPLATE.format(strategy=strategy.value),
                self._schedule_frame(schedule, labels, scores),
            )
            logger.info(
                f"{strategy.value}: mean day reduction {result.mean_day_reduction:.3f}, "
                f"first-half fraction {result.first_half_fraction:.3f}"
            )

        baseline = random_baseline(test, capacity, random_seeds(self.config.seed, self.config.random_replicates))
        self.write_summary(METRICS_FILE, {
            "capacity": capacity,
            "seed": self.config.seed,
            "n_instances": len(test),
            "strategies": metrics,
            "random_baseline": baseline,
        })
        self.write_frame(HIT_CURVE_FILE, pd.DataFrame(curves, columns=["strategy", "day", "cumulative_hits"]))
        return self.written

    @staticmethod
    def _schedule_frame(schedule, labels: Dict[str, int], scores: Optional[Dict[str, float]]) -> pd.DataFrame:
        return pd.DataFrame({
            "inspection_id": list(schedule.ordering),
            "position": range(1, schedule.size + 1),
            "day": [schedule.day_of[iid] for iid in schedule.ordering],
            "score": [scores[iid] if scores else None for iid in schedule.ordering],
            "label": [labels[iid] for iid in schedule.ordering],
        })

