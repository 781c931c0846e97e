"""Tests for sanitarian clustering."""
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.models.inspection import ClusterLabel
from src.services.clustering_service import cluster_sanitarians
from src.utils.error_handler import PipelineError


def sse_of(groups):
    return sum(float(np.sum((np.array(g) - np.mean(g)) ** 2)) for g in groups)


def brute_force_sse(values, k):
    """Smallest SSE over every split of the sorted distinct values into k contiguous groups."""
    distinct = sorted(set(values))
    k = min(k, len(distinct))
    best = None
    for cuts in combinations(range(1, len(distinct)), k - 1):
        bounds = (0,) + cuts + (len(distinct),)
        groups = []
        for first, last in zip(bounds, bounds[1:]):
            segment = set(distinct[first:last])
            groups.append([v for v in values if v in segment])
        cost = sse_of(groups)
        best = cost if best is None else min(best, cost)
    return best


class TestClusterSanitarians:

    def test_single_sanitarian(self):
        assignment = cluster_sanitarians({"201": 0.7})
        assert assignment.labels == {"201": ClusterLabel.PURPLE}
        assert assignment.cluster_means == {ClusterLabel.PURPLE: 0.7}
        assert assignment.sse == 0.0

    def test_equal_values_share_a_cluster(self):
        assignment = cluster_sanitarians({"1": 0.0, "2": 0.0, "3": 5.0})
        assert assignment.labels == {"1": ClusterLabel.BLUE, "2": ClusterLabel.BLUE, "3": ClusterLabel.PURPLE}
        assert assignment.used_labels == [ClusterLabel.PURPLE, ClusterLabel.BLUE]

    def test_all_equal(self):
        assignment = cluster_sanitarians({str(n): -0.4 for n in range(10)})
        assert set(assignment.labels.values()) == {ClusterLabel.PURPLE}

    def test_two_pairs(self):
        assignment = cluster_sanitarians({"a": 0.0, "b": 1.0, "c": 10.0, "d": 11.0}, k=2)
        assert assignment.members(ClusterLabel.PURPLE) == ["c", "d"]
        assert assignment.members(ClusterLabel.BLUE) == ["a", "b"]
        assert assignment.sse == pytest.approx(1.0)

    def test_colors_follow_descending_means(self):
        values = {str(n): v for n, v in enumerate([-3.0, -2.9, -1.0, 0.0, 0.1, 1.5, 3.0, 3.2])}
        assignment = cluster_sanitarians(values)
        means = [assignment.cluster_means[label] for label in assignment.used_labels]
        assert means == sorted(means, reverse=True)
        assert assignment.labels["7"] == ClusterLabel.PURPLE
        assert assignment.labels["0"] == assignment.used_labels[-1]

    @pytest.mark.parametrize("k", [0, 7])
    def test_cluster_count_range(self, k):
        with pytest.raises(PipelineError):
            cluster_sanitarians({"1": 0.0}, k=k)

    def test_empty_input(self):
        with pytest.raises(PipelineError):
            cluster_sanitarians({})

    def test_non_finite_coefficient(self):
        with pytest.raises(PipelineError):
            cluster_sanitarians({"1": float("nan")})

    @settings(max_examples=80, deadline=None)
    @given(
        values=st.lists(st.integers(min_value=-20, max_value=20).map(lambda v: v / 4), min_size=1, max_size=12),
        k=st.integers(min_value=1, max_value=6),
    )
    def test_matches_exhaustive_search(self, values, k):
        coefficients = {str(n): v for n, v in enumerate(values)}
        assignment = cluster_sanitarians(coefficients, k=k)
        assert assignment.sse == pytest.approx(brute_force_sse(values, k), abs=1e-9)
        assert len(assignment.used_labels) == min(k, len(set(values)))
        for a in coefficients:
            for b in coefficients:
                if coefficients[a] == coefficients[b]:
                    assert assignment.labels[a] == assignment.labels[b]
