"""Audits of the deployed model and of hit-rate patterns in the inspection records."""
import logging
from collections import Counter, defaultdict
from datetime import date
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.constants import (
    CLUSTER_FEATURE_NAMES,
    CRITICAL_CODE_TITLES,
    CRITICAL_CODES,
    DEFAULT_SPLIT_DATE,
    DEFAULT_TOP_CHAINS,
    UNCLUSTERED_GROUP,
)
from src.models.audit import (
    ClusterPositionRow,
    CounterfactualReport,
    CounterfactualRow,
    HitRateRow,
    HitRateTable,
    MonthlyRate,
    PeriodSummary,
    PrePostEntry,
    PrePostSummary,
    SeasonalAssociation,
)
from src.models.features import LabeledInstance
from src.models.inspection import ClusterLabel, InspectionRecord, InspectionType, id_sort_key, target_label
from src.models.logistic_model import ClusterAssignment, LogisticModel
from src.models.schedule import Schedule
from src.services.training_service import fit_logistic_matrix, score_instances
from src.utils.date_utils import month_key
from src.utils.error_handler import data_error, validation_error

logger = logging.getLogger(__name__)

COUNTERFACTUAL_MODES = ("zero_out", "reference_mean")
TEMPERATURE_FEATURE = "monthly_tmax_f"


def _group_order(groups: Iterable[str]) -> List[str]:
    present = set(groups)
    ordered = [label.value for label in ClusterLabel.ordered() if label.value in present]
    if UNCLUSTERED_GROUP in present:
        ordered.append(UNCLUSTERED_GROUP)
    return ordered


def _cluster_group(cluster: Optional[ClusterLabel]) -> str:
    return cluster.value if cluster is not None else UNCLUSTERED_GROUP


def apply_assignment(records: Sequence[InspectionRecord], assignment: ClusterAssignment) -> List[InspectionRecord]:
    """Fill missing record clusters from the inspecting sanitarian's assignment."""
    return [
        r.model_copy(update={"cluster": assignment.labels[r.sanitarian]})
        if r.cluster is None and r.sanitarian in assignment.labels else r
        for r in records
    ]


def cluster_hit_rates(records: Sequence[InspectionRecord]) -> HitRateTable:
    """
    Inspections and critical-violation hits per sanitarian cluster.

    Records without a cluster form the ``unclustered`` row.
    """
    inspections: Counter = Counter()
    hits: Counter = Counter()
    for record in records:
        group = _cluster_group(record.cluster)
        inspections[group] += 1
        hits[group] += target_label(record)
    rows = [HitRateRow(group=g, inspections=inspections[g], hits=hits[g]) for g in _group_order(inspections)]
    return HitRateTable(rows=rows)


def code_frequency_table(
    records: Sequence[InspectionRecord],
    kind: Optional[InspectionType] = InspectionType.CANVASS,
) -> pd.DataFrame:
    """Per critical code: citing inspections and their rate over all inspections of ``kind``."""
    selected = [r for r in records if kind is None or r.kind == kind]
    counts = Counter(code for r in selected for code in r.violations if code in CRITICAL_CODES)
    frame = pd.DataFrame({
        "code": list(CRITICAL_CODES),
        "title": [CRITICAL_CODE_TITLES[c] for c in CRITICAL_CODES],
        "count": [counts.get(c, 0) for c in CRITICAL_CODES],
    })
    frame["rate"] = frame["count"] / len(selected) if selected else 0.0
    frame = frame.sort_values(["count", "code"], ascending=[False, True], kind="mergesort")
    return frame.reset_index(drop=True)


def code_hit_rates_by_cluster(records: Sequence[InspectionRecord]) -> pd.DataFrame:
    """Rate of inspections citing each critical code, one row per cluster group."""
    totals: Counter = Counter()
    citations: Dict[str, Counter] = defaultdict(Counter)
    for record in records:
        group = _cluster_group(record.cluster)
        totals[group] += 1
        for code in record.violations:
            if code in CRITICAL_CODES:
                citations[group][code] += 1

    groups = _group_order(totals)
    data = {
        f"V{code}": [citations[g][code] / totals[g] for g in groups]
        for code in CRITICAL_CODES
    }
    frame = pd.DataFrame(data, index=pd.Index(groups, name="group"))
    frame.insert(0, "inspections", [totals[g] for g in groups])
    return frame


def _cites(record: InspectionRecord, code: Optional[int]) -> int:
    if code is None:
        return target_label(record)
    return int(code in record.violations)


def monthly_hit_rate_series(
    records: Sequence[InspectionRecord],
    code: Optional[int] = None,
    kind: Optional[InspectionType] = None,
) -> List[MonthlyRate]:
    """
    Citing share per calendar month.

    With ``code`` None an inspection counts when it cites any critical code.
    Months without inspections are omitted.
    """
    n: Counter = Counter()
    hits: Counter = Counter()
    for record in records:
        if kind is not None and record.kind != kind:
            continue
        month = month_key(record.date)
        n[month] += 1
        hits[month] += _cites(record, code)
    return [MonthlyRate(month=m, rate=hits[m] / n[m], n=n[m], hits=hits[m]) for m in sorted(n)]


def tukey_hinges(values: Sequence[float]) -> Tuple[float, float, float]:
    """(lower hinge, median, upper hinge); odd-length halves share the median."""
    ordered = sorted(values)
    size = len(ordered)
    if size == 0:
        raise validation_error("hinges of an empty sample are undefined")
    half = size // 2
    lower = ordered[:half + 1] if size % 2 else ordered[:half]
    upper = ordered[half:]
    return float(np.median(lower)), float(np.median(ordered)), float(np.median(upper))


def summarize_period(period: str, monthly: List[MonthlyRate]) -> PeriodSummary:
    if not monthly:
        return PeriodSummary(period=period, monthly=[])
    rates = [m.rate for m in monthly]
    lower, median, upper = tukey_hinges(rates)
    total = sum(m.n for m in monthly)
    return PeriodSummary(
        period=period,
        monthly=monthly,
        median=median,
        lower_hinge=lower,
        upper_hinge=upper,
        mean=float(np.mean(rates)),
        pooled_rate=sum(m.hits for m in monthly) / total,
        n_inspections=total,
    )


def prepost_comparison(
    records: Sequence[InspectionRecord],
    split: date = DEFAULT_SPLIT_DATE,
    codes: Sequence[int] = tuple(CRITICAL_CODES),
    kinds: Sequence[InspectionType] = (InspectionType.CANVASS, InspectionType.COMPLAINT),
) -> PrePostSummary:
    """
    Monthly hit-rate distributions before and after ``split`` per code and kind.

    Raises:
        PipelineError: A kind with records on only one side of the split
            (the error names the empty period)
    """
    pre_name = f"before {split.isoformat()}"
    post_name = f"from {split.isoformat()}"
    entries = []
    for kind in kinds:
        pre = [r for r in records if r.kind == kind and r.date < split]
        post = [r for r in records if r.kind == kind and r.date >= split]
        if not pre and not post:
            logger.warning(f"No {kind.value} records; skipped in the pre/post comparison")
            continue
        if not pre or not post:
            empty = pre_name if not pre else post_name
            raise validation_error(f"no {kind.value} records {empty}", period=empty, kind=kind.value)
        for code in codes:
            entries.append(PrePostEntry(
                code=code,
                kind=kind,
                pre=summarize_period(pre_name, monthly_hit_rate_series(pre, code)),
                post=summarize_period(post_name, monthly_hit_rate_series(post, code)),
            ))
    if not entries:
        raise validation_error("no records of the compared inspection types", period="all")
    return PrePostSummary(split=split, entries=entries)


def top_chains(records: Sequence[InspectionRecord], n: int = DEFAULT_TOP_CHAINS) -> List[str]:
    """Chain keys ranked by canvass record count, ties by key."""
    counts = Counter(r.chain_key for r in records if r.kind == InspectionType.CANVASS and r.chain_key)
    return [key for key, _ in sorted(counts.items(), key=lambda item: (-item[1], item[0]))[:n]]


def monthly_average_temperature(weather: Mapping[date, float]) -> Dict[str, float]:
    """Mean daily high per calendar month."""
    if not weather:
        return {}
    series = pd.Series(list(weather.values()), index=[month_key(d) for d in weather], dtype=float)
    means = series.groupby(level=0).mean()
    return {month: float(value) for month, value in means.sort_index().items()}


def seasonal_association(
    records: Sequence[InspectionRecord],
    chains: Optional[Iterable[str]],
    monthly_temps: Mapping[str, float],
    code: int,
    cfg=None,
) -> SeasonalAssociation:
    """
    Logit of citing ``code`` on chain fixed effects plus monthly average temperature.

    Chains whose records all cite or all miss the code carry no information
    and are dropped with a warning. The alphabetically first remaining chain
    is the reference level.

    Raises:
        PipelineError: record without chain key, uncovered month, or a
            temperature column that is constant (association unidentifiable)
    """
    if chains is not None:
        keep = set(chains)
        selected = [r for r in records if r.chain_key in keep]
    else:
        selected = list(records)
        unkeyed = [r.inspection_id for r in selected if not r.chain_key]
        if unkeyed:
            raise validation_error(f"inspection {unkeyed[0]} has no chain key", inspection_id=unkeyed[0])
    if not selected:
        raise validation_error("no inspections of the selected chains")

    by_chain: Dict[str, List[InspectionRecord]] = defaultdict(list)
    for record in selected:
        by_chain[record.chain_key].append(record)

    dropped = sorted(
        key for key, group in by_chain.items()
        if len({int(code in r.violations) for r in group}) == 1
    )
    if dropped:
        logger.warning(f"Dropping {len(dropped)} chains whose records all cite or all miss V{code}")
    kept_chains = sorted(key for key in by_chain if key not in dropped)
    if not kept_chains:
        raise validation_error(f"no chain has both citing and non-citing inspections for V{code}")

    rows = [r for key in kept_chains for r in sorted(by_chain[key], key=lambda r: r.sort_key)]
    temperatures = []
    for record in rows:
        month = month_key(record.date)
        if month not in monthly_temps:
            raise data_error(f"no monthly temperature for {month}", month=month)
        temperatures.append(monthly_temps[month])
    temperatures = np.array(temperatures, dtype=float)
    if temperatures.max() == temperatures.min():
        raise validation_error(
            "monthly temperature is constant; temperature association is unidentifiable",
            feature=TEMPERATURE_FEATURE,
        )

    dummy_chains = kept_chains[1:]
    column_of = {key: k for k, key in enumerate(dummy_chains)}
    X = np.zeros((len(rows), len(dummy_chains) + 1))
    for i, record in enumerate(rows):
        k = column_of.get(record.chain_key)
        if k is not None:
            X[i, k] = 1.0
    X[:, -1] = temperatures
    y = np.array([int(code in r.violations) for r in rows], dtype=float)
    names = [f"chain_{key}" for key in dummy_chains] + [TEMPERATURE_FEATURE]

    model = fit_logistic_matrix(X, y, names, cfg)
    coefficient = model.coefficient(TEMPERATURE_FEATURE)
    error = model.standard_errors[-1] if model.standard_errors else None
    logger.info(f"V{code} temperature coefficient {coefficient:.5f} (SE {error})")
    return SeasonalAssociation(
        code=code,
        coefficient=coefficient,
        standard_error=error,
        n_inspections=len(rows),
        n_chains=len(kept_chains),
        dropped_chains=dropped,
    )


def counterfactual_model(
    model: LogisticModel,
    mode: str,
    instances: Sequence[LabeledInstance] = (),
) -> LogisticModel:
    """
    Model with the cluster contributions neutralized.

    zero_out sets all six cluster coefficients to 0; reference_mean sets them
    to the mean cluster coefficient weighted by how many instances carry
    each cluster (unweighted when none does), so only clustered instances
    move.
    """
    if not model.has_cluster_features:
        raise validation_error("model lacks the six cluster features", feature=CLUSTER_FEATURE_NAMES[0])
    if mode not in COUNTERFACTUAL_MODES:
        raise validation_error(f"unknown counterfactual mode {mode!r}")

    if mode == "zero_out":
        value = 0.0
    else:
        counts = Counter(i.features.cluster for i in instances if i.features.cluster is not None)
        coefficients = model.coefficient_map()
        total = sum(counts.values())
        if total:
            value = sum(counts[label] * coefficients[label.feature_name] for label in counts) / total
        else:
            value = float(np.mean([coefficients[name] for name in CLUSTER_FEATURE_NAMES]))
    return model.with_coefficients({name: value for name in CLUSTER_FEATURE_NAMES})


def rank_by_probability(ids: Sequence[str], probabilities: Sequence[float]) -> Dict[str, int]:
    """1-based ranks by descending probability, ties by id."""
    order = sorted(range(len(ids)), key=lambda k: (-probabilities[k], id_sort_key(ids[k])))
    return {ids[k]: rank for rank, k in enumerate(order, start=1)}


def sanitarian_counterfactual(
    model: LogisticModel,
    test: Sequence[LabeledInstance],
    mode: str = "zero_out",
) -> CounterfactualReport:
    """Rescore ``test`` without the sanitarian-cluster contribution and compare rankings."""
    neutral = counterfactual_model(model, mode, test)
    ids = [i.inspection_id for i in test]
    baseline = score_instances(model, test)
    counterfactual = score_instances(neutral, test)
    baseline_rank = rank_by_probability(ids, baseline)
    counterfactual_rank = rank_by_probability(ids, counterfactual)

    rows = [
        CounterfactualRow(
            inspection_id=instance.inspection_id,
            cluster=instance.features.cluster.value if instance.features.cluster else None,
            label=instance.label,
            baseline_probability=float(baseline[k]),
            counterfactual_probability=float(counterfactual[k]),
            baseline_rank=baseline_rank[instance.inspection_id],
            counterfactual_rank=counterfactual_rank[instance.inspection_id],
        )
        for k, instance in enumerate(test)
    ]
    rows.sort(key=lambda row: row.baseline_rank)
    return CounterfactualReport(mode=mode, rows=rows)


def cluster_schedule_positions(
    schedule: Schedule,
    instances: Sequence[LabeledInstance],
) -> List[ClusterPositionRow]:
    """Per previous-inspection cluster: scheduled count, last position and hits."""
    by_id = {i.inspection_id: i for i in instances}
    positions = schedule.position_of()
    scheduled: Counter = Counter()
    last: Dict[str, int] = {}
    hits: Counter = Counter()
    for iid in schedule.ordering:
        instance = by_id.get(iid)
        if instance is None:
            raise validation_error(f"scheduled inspection {iid} has no instance", inspection_id=iid)
        group = _cluster_group(instance.features.cluster)
        scheduled[group] += 1
        hits[group] += instance.label
        last[group] = max(last.get(group, 0), positions[iid])
    return [
        ClusterPositionRow(group=g, scheduled=scheduled[g], last_position=last[g], hits=hits[g])
        for g in _group_order(scheduled)
    ]
