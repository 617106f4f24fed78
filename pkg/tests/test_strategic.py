import random

import pytest

from themeflow.communities import Partition
from themeflow.errors import AnalysisError
from themeflow.strategic import (
    QUADRANT_BASIC,
    QUADRANT_LOW_LOW,
    QUADRANT_MOTOR,
    QUADRANT_NICHE,
    build_themes,
    callon_centrality,
    callon_density,
    classify_quadrant,
    equivalence_index,
    rank_topics,
)

FIXTURE_THEMES = (frozenset({"A", "B", "C"}), frozenset({"D", "E"}))


class TestEquivalenceIndex:
    def test_zero_cooccurrence(self):
        assert equivalence_index(0, 4, 7) == 0.0

    def test_perfect_overlap(self):
        assert equivalence_index(3, 3, 3) == 1.0

    def test_direct_evaluation(self):
        assert equivalence_index(2, 4, 4) == 0.25

    def test_domain_errors(self):
        with pytest.raises(AnalysisError):
            equivalence_index(1, 0, 4)
        with pytest.raises(AnalysisError):
            equivalence_index(5, 4, 4)
        with pytest.raises(AnalysisError):
            equivalence_index(-1, 4, 4)

    def test_range(self):
        rng = random.Random(6)
        for _ in range(300):
            ci, cj = rng.randint(1, 50), rng.randint(1, 50)
            cij = rng.randint(0, min(ci, cj))
            e = equivalence_index(cij, ci, cj)
            assert 0.0 <= e <= 1.0


class TestCallonIndices:
    def test_fixture_centralities(self, callon_fixture):
        assert abs(callon_centrality(callon_fixture, FIXTURE_THEMES[0]) - 5 / 3) < 1e-9
        assert abs(callon_centrality(callon_fixture, FIXTURE_THEMES[1]) - 5 / 3) < 1e-9

    def test_fixture_densities(self, callon_fixture):
        assert abs(callon_density(callon_fixture, FIXTURE_THEMES[0]) - 50 / 3) < 1e-9
        assert abs(callon_density(callon_fixture, FIXTURE_THEMES[1]) - 200 / 9) < 1e-9

    def test_isolated_theme_zero_centrality(self, disjoint_triangles):
        assert callon_centrality(disjoint_triangles, frozenset("abc")) == 0.0

    def test_singleton_theme_zero_density(self, callon_fixture):
        assert callon_density(callon_fixture, frozenset({"E"})) == 0.0

    def test_empty_theme_density_is_error(self, callon_fixture):
        with pytest.raises(AnalysisError):
            callon_density(callon_fixture, frozenset())

    def test_density_zero_iff_no_internal_edges(self, callon_fixture):
        assert callon_density(callon_fixture, frozenset({"A", "D"})) == 0.0
        assert callon_density(callon_fixture, frozenset({"A", "B"})) > 0.0


class TestClassifyQuadrant:
    def test_four_cases(self):
        thresholds = (1.5, 4.0)
        assert classify_quadrant((2, 5), thresholds) == QUADRANT_MOTOR
        assert classify_quadrant((2, 3), thresholds) == QUADRANT_BASIC
        assert classify_quadrant((1, 5), thresholds) == QUADRANT_NICHE
        assert classify_quadrant((1, 3), thresholds) == QUADRANT_LOW_LOW

    def test_ties_fall_below(self):
        assert classify_quadrant((1.5, 4.0), (1.5, 4.0)) == QUADRANT_LOW_LOW
        assert classify_quadrant((2.0, 4.0), (1.5, 4.0)) == QUADRANT_BASIC
        assert classify_quadrant((1.5, 5.0), (1.5, 4.0)) == QUADRANT_NICHE

    def test_scaling_invariance(self):
        rng = random.Random(99)
        for _ in range(1000):
            c, d = rng.uniform(0, 10), rng.uniform(0, 10)
            mc, md = rng.uniform(0, 10), rng.uniform(0, 10)
            s = rng.uniform(1e-3, 1e3)
            base = classify_quadrant((c, d), (mc, md))
            assert classify_quadrant((s * c, d), (s * mc, md)) == base
            assert classify_quadrant((c, s * d), (mc, s * md)) == base


class TestBuildThemes:
    def _fixture_partition(self):
        return Partition({"A": 0, "B": 0, "C": 0, "D": 1, "E": 1})

    def test_fixture_values_and_ordering(self, callon_fixture):
        themes = build_themes(callon_fixture, self._fixture_partition())
        assert [t.theme_id for t in themes] == [0, 1]
        t_abc, t_de = themes
        assert abs(t_abc.centrality - 5 / 3) < 1e-9
        assert abs(t_abc.density - 50 / 3) < 1e-9
        assert abs(t_de.centrality - 5 / 3) < 1e-9
        assert abs(t_de.density - 200 / 9) < 1e-9
        # top topics: weight descending, lexicographic on ties
        assert t_abc.top_topics == ("A", "B", "C")  # A=4, B=4 tie -> A first
        assert t_abc.representative_topic == "A"
        assert t_de.top_topics == ("D", "E")

    def test_fixture_lands_on_not_above_centrality_side(self, callon_fixture):
        # both themes tie the centrality mean exactly, so neither is "high
        # centrality": the fixture must classify niche / low-low
        themes = build_themes(callon_fixture, self._fixture_partition())
        quadrants = {t.theme_id: t.quadrant for t in themes}
        assert quadrants[0] == QUADRANT_LOW_LOW  # density 16.67 <= mean 19.44
        assert quadrants[1] == QUADRANT_NICHE  # density 22.22 > mean

    def test_quadrants_partition_the_themes(self, callon_fixture):
        themes = build_themes(callon_fixture, self._fixture_partition())
        for t in themes:
            assert t.quadrant in {
                QUADRANT_MOTOR, QUADRANT_BASIC, QUADRANT_NICHE, QUADRANT_LOW_LOW
            }

    def test_median_threshold_mode(self, callon_fixture):
        themes = build_themes(
            callon_fixture, self._fixture_partition(), threshold="median"
        )
        assert {t.quadrant for t in themes} <= {
            QUADRANT_MOTOR, QUADRANT_BASIC, QUADRANT_NICHE, QUADRANT_LOW_LOW
        }
        with pytest.raises(AnalysisError):
            build_themes(callon_fixture, self._fixture_partition(), threshold="mode")

    def test_rank_topics_tie_break(self, callon_fixture):
        assert rank_topics(callon_fixture, frozenset({"B", "A"})) == ("A", "B")

    def test_empty_partition_gives_no_themes(self, callon_fixture):
        assert build_themes(callon_fixture, Partition({})) == []

    def test_one_pass_matches_per_theme_ops(self, callon_fixture):
        themes = build_themes(callon_fixture, self._fixture_partition())
        for t in themes:
            assert t.centrality == callon_centrality(callon_fixture, t.topics)
            assert t.density == callon_density(callon_fixture, t.topics)
