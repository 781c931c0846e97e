"""Schedule simulation under equal daily capacity and the schedule metrics."""
import logging
import math
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from src.models.features import LabeledInstance
from src.models.inspection import id_sort_key
from src.models.schedule import Schedule, ScheduleMetrics, ScheduleStrategy
from src.utils.error_handler import validation_error

logger = logging.getLogger(__name__)


def default_capacity(test: Sequence[LabeledInstance]) -> int:
    """Test-set size over the number of distinct actual inspection dates, rounded up."""
    if not test:
        raise validation_error("no test instances to schedule")
    return math.ceil(len(test) / len({i.date for i in test}))


def _usual_key(instance: LabeledInstance):
    return (instance.date, id_sort_key(instance.inspection_id))


def make_schedule(
    test: Sequence[LabeledInstance],
    strategy: ScheduleStrategy,
    capacity: int,
    scores: Optional[Mapping[str, float]] = None,
    seed: Optional[int] = None,
) -> Schedule:
    """
    Order the test instances and assign simulated days.

    usual: actual date then id; model: descending score then id; best/worst:
    hits first/last, each group in usual order; random: seeded shuffle of
    the usual order.

    Raises:
        PipelineError: capacity <= 0, missing scores for the model strategy,
            or a missing seed for the random strategy
    """
    strategy = ScheduleStrategy(strategy)
    if capacity is None or capacity <= 0:
        raise validation_error(f"capacity must be positive, got {capacity}")
    ids = [i.inspection_id for i in test]
    if len(set(ids)) != len(ids):
        raise validation_error("test instances must have unique inspection ids")

    usual = sorted(test, key=_usual_key)
    if strategy == ScheduleStrategy.USUAL:
        ordered = usual
    elif strategy == ScheduleStrategy.MODEL:
        if scores is None:
            raise validation_error("model strategy requires scores")
        missing = [iid for iid in ids if iid not in scores]
        if missing:
            raise validation_error(f"no score for inspection {missing[0]}", inspection_id=missing[0])
        ordered = sorted(test, key=lambda i: (-scores[i.inspection_id], id_sort_key(i.inspection_id)))
    elif strategy == ScheduleStrategy.BEST:
        ordered = [i for i in usual if i.label == 1] + [i for i in usual if i.label == 0]
    elif strategy == ScheduleStrategy.WORST:
        ordered = [i for i in usual if i.label == 0] + [i for i in usual if i.label == 1]
    else:
        if seed is None:
            raise validation_error("random strategy requires a seed")
        permutation = np.random.default_rng(seed).permutation(len(usual))
        ordered = [usual[k] for k in permutation]

    return Schedule.from_ordering(
        [i.inspection_id for i in ordered],
        capacity,
        strategy,
        seed if strategy == ScheduleStrategy.RANDOM else None,
    )


def _hit_ids(labels: Mapping[str, int], schedule: Schedule) -> List[str]:
    return [iid for iid in schedule.ordering if labels[iid] == 1]


def day_reduction_stats(
    schedule: Schedule,
    actual_days: Mapping[str, int],
    labels: Mapping[str, int],
) -> Tuple[float, float]:
    """
    Mean and population standard deviation of actual_day - simulated_day over hits.

    Raises:
        PipelineError: No hits (the metric is undefined)
    """
    hits = _hit_ids(labels, schedule)
    if not hits:
        raise validation_error("day reduction is undefined without critical-violation instances")
    reductions = np.array([actual_days[iid] - schedule.day_of[iid] for iid in hits], dtype=float)
    return float(reductions.mean()), float(reductions.std())


def calendar_day_reduction_stats(
    schedule: Schedule,
    actual_days: Mapping[str, int],
    labels: Mapping[str, int],
    calendar_dates: Sequence,
) -> Tuple[float, float]:
    """
    Day reductions measured in calendar days.

    Simulated day d maps to the d-th distinct actual inspection date of the
    test set, clamped to the last one.
    """
    hits = _hit_ids(labels, schedule)
    if not hits:
        raise validation_error("day reduction is undefined without critical-violation instances")
    if not calendar_dates:
        raise validation_error("calendar mapping needs at least one inspection date")

    def to_date(day: int):
        return calendar_dates[min(day, len(calendar_dates)) - 1]

    reductions = np.array(
        [(to_date(actual_days[iid]) - to_date(schedule.day_of[iid])).days for iid in hits],
        dtype=float,
    )
    return float(reductions.mean()), float(reductions.std())


def first_half_fraction(schedule: Schedule, labels: Mapping[str, int]) -> float:
    """Share of hits among the first ceil(N/2) positions."""
    hits = _hit_ids(labels, schedule)
    if not hits:
        raise validation_error("first-half fraction is undefined without critical-violation instances")
    half = math.ceil(schedule.size / 2)
    in_first_half = sum(1 for iid in schedule.ordering[:half] if labels[iid] == 1)
    return in_first_half / len(hits)


def first_half_hit_rate(schedule: Schedule, labels: Mapping[str, int]) -> float:
    half = math.ceil(schedule.size / 2)
    if half == 0:
        return 0.0
    return sum(labels[iid] for iid in schedule.ordering[:half]) / half


def hit_curve(schedule: Schedule, labels: Mapping[str, int]) -> List[Tuple[int, int]]:
    """Cumulative hits with day_of <= d, for every simulated day d."""
    per_day = [0] * (schedule.n_days + 1)
    for iid in schedule.ordering:
        if labels[iid] == 1:
            per_day[schedule.day_of[iid]] += 1
    curve = []
    total = 0
    for day in range(1, schedule.n_days + 1):
        total += per_day[day]
        curve.append((day, total))
    return curve


def evaluate_schedule(
    schedule: Schedule,
    test: Sequence[LabeledInstance],
    usual: Optional[Schedule] = None,
) -> ScheduleMetrics:
    """All schedule metrics against the usual schedule of the same capacity."""
    labels = {i.inspection_id: i.label for i in test}
    usual = usual or make_schedule(test, ScheduleStrategy.USUAL, schedule.capacity)
    if usual.capacity != schedule.capacity:
        raise validation_error("schedules must share a capacity to be compared")

    mean, std = day_reduction_stats(schedule, usual.day_of, labels)
    calendar_dates = sorted({i.date for i in test})
    calendar_mean, calendar_std = calendar_day_reduction_stats(schedule, usual.day_of, labels, calendar_dates)
    n_hits = sum(labels.values())
    return ScheduleMetrics(
        strategy=schedule.strategy,
        n_instances=schedule.size,
        n_hits=n_hits,
        mean_day_reduction=mean,
        std_day_reduction=std,
        first_half_fraction=first_half_fraction(schedule, labels),
        hit_rate=n_hits / schedule.size,
        first_half_hit_rate=first_half_hit_rate(schedule, labels),
        calendar_mean_day_reduction=calendar_mean,
        calendar_std_day_reduction=calendar_std,
        hit_curve=hit_curve(schedule, labels),
    )


def random_seeds(seed: int, replicates: int) -> List[int]:
    """Replicate seeds derived from the run seed."""
    return [seed + k for k in range(replicates)]


def random_baseline(
    test: Sequence[LabeledInstance],
    capacity: int,
    seeds: Sequence[int],
) -> Dict[str, float]:
    """Seed-averaged metrics of the random strategy."""
    if not seeds:
        raise validation_error("random baseline needs at least one seed")
    usual = make_schedule(test, ScheduleStrategy.USUAL, capacity)
    totals: Dict[str, float] = {}
    for seed in seeds:
        metrics = evaluate_schedule(make_schedule(test, ScheduleStrategy.RANDOM, capacity, seed=seed), test, usual)
        for key in ("mean_day_reduction", "std_day_reduction", "first_half_fraction", "first_half_hit_rate",
                    "calendar_mean_day_reduction", "calendar_std_day_reduction"):
            totals[key] = totals.get(key, 0.0) + getattr(metrics, key)
    averaged = {key: value / len(seeds) for key, value in totals.items()}
    averaged["replicates"] = len(seeds)
    return averaged
