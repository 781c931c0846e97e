"""Handlers for the audit subcommands."""

import logging
import math
from typing import Dict, List, Optional

import pandas as pd

from src.constants import (
    AUDIT_SUMMARY_TEMPLATE,
    CLUSTER_HIT_RATES_FILE,
    CLUSTER_POSITIONS_FILE,
    CODE_FREQUENCIES_FILE,
    CODES_BY_CLUSTER_FILE,
    COUNTERFACTUAL_FILE,
    CRITICAL_CODES,
    MONTHLY_HIT_RATES_FILE,
    PREPOST_MONTHLY_FILE,
    PREPOST_SUMMARY_FILE,
    SEASONAL_FILE,
    TEMPERATURE_SENSITIVE_CODES,
)
from src.handlers.base_handler import BaseHandler
from src.models.inspection import InspectionRecord, InspectionType
from src.models.schedule import ScheduleStrategy
from src.services.audit_service import (
    COUNTERFACTUAL_MODES,
    apply_assignment,
    cluster_hit_rates,
    cluster_schedule_positions,
    code_frequency_table,
    code_hit_rates_by_cluster,
    monthly_average_temperature,
    monthly_hit_rate_series,
    prepost_comparison,
    sanitarian_counterfactual,
    seasonal_association,
    top_chains,
)
from src.services.scheduler_service import make_schedule
from src.services.training_service import score_instances
from src.utils.error_handler import validation_error

logger = logging.getLogger(__name__)


class AuditHandler(BaseHandler):
    """
    One method per audit.

    ``code`` and ``kind`` narrow the audits that accept them; records are
    taken from inspections.csv and, when cluster-sanitarians has run, missing
    record clusters are filled from sanitarian_clusters.csv.
    """

    def __init__(self, config, code: Optional[int] = None, kind: Optional[str] = None):
        super().__init__(config)
        if code is not None and code not in CRITICAL_CODES:
            raise validation_error(f"code must be a critical code 1..14, got {code}", code=code)
        self.code = code
        try:
            self.kind = InspectionType(kind) if kind else None
        except ValueError:
            raise validation_error(f"unknown inspection type {kind!r}")

    def _records(self) -> List[InspectionRecord]:
        records = self.load_records()
        assignment = self.load_assignment()
        if assignment is not None:
            records = apply_assignment(records, assignment)
        return records

    def _kind(self, default: Optional[InspectionType]) -> Optional[InspectionType]:
        return self.kind if self.kind is not None else default

    def _summary(self, name: str, payload: Dict) -> None:
        self.write_summary(AUDIT_SUMMARY_TEMPLATE.format(name=name), payload)

    def hit_rates(self) -> List:
        kind = self._kind(InspectionType.CANVASS)
        records = [r for r in self._records() if kind is None or r.kind == kind]
        table = cluster_hit_rates(records)
        self.write_frame(CLUSTER_HIT_RATES_FILE, table.to_frame())
        self.write_frame(CODE_FREQUENCIES_FILE, code_frequency_table(records, kind))
        self._summary("hit_rates", {
            "kind": kind.value if kind else None,
            "inspections": table.total_inspections,
            "hits": table.total_hits,
            "hit_rates": table.display_rates(),
        })
        return self.written

    def codes_by_cluster(self) -> List:
        kind = self._kind(InspectionType.CANVASS)
        records = [r for r in self._records() if kind is None or r.kind == kind]
        wide = code_hit_rates_by_cluster(records)
        tidy = pd.DataFrame(
            [
                {"group": group, "code": code, "inspections": int(wide.at[group, "inspections"]),
                 "rate": float(wide.at[group, f"V{code}"])}
                for group in wide.index for code in CRITICAL_CODES
            ],
            columns=["group", "code", "inspections", "rate"],
        )
        self.write_frame(CODES_BY_CLUSTER_FILE, tidy)
        self._summary("codes_by_cluster", {
            "kind": kind.value if kind else None,
            "groups": list(wide.index),
            "inspections": int(wide["inspections"].sum()),
        })
        return self.written

    def monthly(self) -> List:
        kind = self._kind(None)
        series = monthly_hit_rate_series(self._records(), self.code, kind)
        frame = pd.DataFrame(
            [m.model_dump() for m in series], columns=["month", "n", "hits", "rate"]
        )
        self.write_frame(MONTHLY_HIT_RATES_FILE, frame)
        self._summary("monthly", {
            "code": self.code,
            "kind": kind.value if kind else None,
            "months": len(series),
        })
        return self.written

    def prepost(self) -> List:
        codes = [self.code] if self.code is not None else list(CRITICAL_CODES)
        kinds = [self.kind] if self.kind is not None else [InspectionType.CANVASS, InspectionType.COMPLAINT]
        summary = prepost_comparison(self._records(), self.config.split_date, codes, kinds)

        monthly_rows = []
        summary_rows = []
        for entry in summary.entries:
            for period in (entry.pre, entry.post):
                for m in period.monthly:
                    monthly_rows.append({
                        "code": entry.code, "kind": entry.kind.value, "period": period.period,
                        "month": m.month, "n": m.n, "hits": m.hits, "rate": m.rate,
                    })
                summary_rows.append({
                    "code": entry.code, "kind": entry.kind.value, "period": period.period,
                    "median": period.median, "lower_hinge": period.lower_hinge,
                    "upper_hinge": period.upper_hinge, "mean": period.mean,
                    "pooled_rate": period.pooled_rate, "n_inspections": period.n_inspections,
                    "median_change": entry.median_change,
                })
        self.write_frame(PREPOST_MONTHLY_FILE, pd.DataFrame(
            monthly_rows, columns=["code", "kind", "period", "month", "n", "hits", "rate"]))
        self.write_frame(PREPOST_SUMMARY_FILE, pd.DataFrame(summary_rows, columns=[
            "code", "kind", "period", "median", "lower_hinge", "upper_hinge",
            "mean", "pooled_rate", "n_inspections", "median_change"]))
        self._summary("prepost", {
            "split_date": summary.split.isoformat(),
            "increased": sorted(
                f"{e.kind.value}:V{e.code}" for e in summary.entries
                if e.median_change is not None and e.median_change > 0
            ),
        })
        return self.written

    def seasonal(self) -> List:
        """Chain-controlled association of V2/V3 (or ``code``) with monthly temperature."""
        bundle = self.load_bundle()
        canvass = [r for r in bundle.records if r.kind == InspectionType.CANVASS]
        chains = top_chains(canvass, self.config.top_chains)
        temps = monthly_average_temperature(bundle.weather)
        codes = [self.code] if self.code is not None else list(TEMPERATURE_SENSITIVE_CODES)
        results = {
            f"V{code}": seasonal_association(canvass, chains, temps, code, self.config.training).model_dump(mode="json")
            for code in codes
        }
        self.write_summary(SEASONAL_FILE, {"top_chains": chains, "associations": results})
        return self.written

    def counterfactual(self) -> List:
        """Rank shifts with the cluster contribution neutralized, plus cluster positions of the model schedule."""
        mode = self.config.mode or COUNTERFACTUAL_MODES[0]
        if mode not in COUNTERFACTUAL_MODES:
            raise validation_error(f"unknown counterfactual mode {mode!r}")
        model = self.load_model(clustered=True)
        _, test = self.load_splits(clustered=True)
        if not test:
            raise validation_error("no test instances for the counterfactual")

        report = sanitarian_counterfactual(model, test, mode)
        self.write_frame(COUNTERFACTUAL_FILE, report.to_frame())

        scores = dict(zip((i.inspection_id for i in test), score_instances(model, test)))
        schedule = make_schedule(test, ScheduleStrategy.MODEL, self.capacity_for(test), scores)
        positions = cluster_schedule_positions(schedule, test)
        self.write_frame(CLUSTER_POSITIONS_FILE, pd.DataFrame(
            [{**row.model_dump(), "hit_rate": row.hit_rate} for row in positions],
            columns=["group", "scheduled", "last_position", "hits", "hit_rate"],
        ))

        half = math.ceil(len(test) / 2)
        self._summary("counterfactual", {
            "mode": mode,
            "n_instances": len(test),
            "first_half_crossings": report.crossings(half),
            "max_rank_shift": max(abs(r.rank_shift) for r in report.rows),
        })
        return self.written
