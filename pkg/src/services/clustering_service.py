"""Optimal one-dimensional clustering of per-sanitarian coefficients."""
import logging
from typing import Dict, List, Mapping, Tuple

import numpy as np

from src.constants import DEFAULT_CLUSTER_COUNT
from src.models.inspection import ClusterLabel
from src.models.logistic_model import ClusterAssignment
from src.utils.error_handler import validation_error

logger = logging.getLogger(__name__)


def optimal_segments(values: np.ndarray, weights: np.ndarray, k: int) -> List[Tuple[int, int]]:
    """
    Minimum weighted-SSE split of sorted ``values`` into ``k`` contiguous segments.

    Dynamic programming over prefix sums; among equal costs the earliest
    split point wins.

    Returns:
        List[Tuple[int, int]]: Inclusive (first, last) index pairs, ascending
    """
    m = len(values)
    centered = values - np.average(values, weights=weights)
    cum_w = np.concatenate([[0.0], np.cumsum(weights)])
    cum_x = np.concatenate([[0.0], np.cumsum(weights * centered)])
    cum_xx = np.concatenate([[0.0], np.cumsum(weights * centered * centered)])

    def cost(first: int, last: int) -> float:
        w = cum_w[last + 1] - cum_w[first]
        s = cum_x[last + 1] - cum_x[first]
        ss = cum_xx[last + 1] - cum_xx[first]
        return max(ss - s * s / w, 0.0)

    best = np.full((k + 1, m), np.inf)
    split = np.zeros((k + 1, m), dtype=int)
    for last in range(m):
        best[1, last] = cost(0, last)
    for c in range(2, k + 1):
        for last in range(c - 1, m):
            for first in range(c - 1, last + 1):
                candidate = best[c - 1, first - 1] + cost(first, last)
                if candidate < best[c, last]:
                    best[c, last] = candidate
                    split[c, last] = first

    segments = []
    last = m - 1
    for c in range(k, 1, -1):
        first = split[c, last]
        segments.append((first, last))
        last = first - 1
    segments.append((0, last))
    return list(reversed(segments))


def cluster_sanitarians(
    per_sanitarian_coefficients: Mapping[str, float],
    k: int = DEFAULT_CLUSTER_COUNT,
) -> ClusterAssignment:
    """
    Group sanitarians into at most ``k`` clusters of their full-model coefficients.

    Equal coefficients always share a cluster; with fewer distinct values
    than ``k`` every distinct value forms its own cluster and the remaining
    colors stay unused. Clusters are named purple..brown by descending mean.
    """
    if k < 1 or k > len(ClusterLabel.ordered()):
        raise validation_error(f"cluster count must be between 1 and {len(ClusterLabel.ordered())}, got {k}")
    if not per_sanitarian_coefficients:
        raise validation_error("no sanitarian coefficients to cluster")

    coefficients = {sid: float(value) for sid, value in per_sanitarian_coefficients.items()}
    if not all(np.isfinite(v) for v in coefficients.values()):
        raise validation_error("sanitarian coefficients must be finite")

    distinct, counts = np.unique(np.array(list(coefficients.values())), return_counts=True)
    k_used = min(k, len(distinct))
    segments = optimal_segments(distinct, counts.astype(float), k_used)

    # Highest segment gets the first color
    labels: Dict[str, ClusterLabel] = {}
    means: Dict[ClusterLabel, float] = {}
    sse = 0.0
    for label, (first, last) in zip(ClusterLabel.ordered(), reversed(segments)):
        low, high = distinct[first], distinct[last]
        members = [sid for sid, value in coefficients.items() if low <= value <= high]
        member_values = np.array([coefficients[sid] for sid in members])
        mean = float(member_values.mean())
        sse += float(np.sum((member_values - mean) ** 2))
        means[label] = mean
        for sid in members:
            labels[sid] = label

    logger.info(
        f"Clustered {len(coefficients)} sanitarians into {k_used} clusters "
        f"(SSE {sse:.6g}): " + ", ".join(f"{label.value}={mean:.3f}" for label, mean in means.items())
    )
    return ClusterAssignment(labels=labels, cluster_means=means, sse=sse)
