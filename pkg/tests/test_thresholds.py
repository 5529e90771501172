import pytest
from hypothesis import given, strategies as st

from groupform.model import (
    CoordinationMatrix,
    GroupPartition,
    ModelParams,
    ValidationError,
)
from groupform.thresholds import (
    GroupGraph,
    RegimeKind,
    RegimeUndefinedError,
    classify_two_group_efficient,
    classify_two_group_stable,
    clique_link_gain,
    efficient_boundaries,
    extra_link_gain,
    minimally_connected_sufficient,
    redundancy_bounds,
    shortcut_gain,
    stability_efficiency_overlap,
    stable_boundaries,
)

PARAMS = ModelParams(0.5, 0.2)

sizes_st = st.integers(3, 12)
delta_st = st.floats(0.02, 0.98, allow_nan=False)


class TestGainFactors:
    def test_first_link_values(self):
        assert clique_link_gain(3, 0.5) == pytest.approx(1.0, abs=1e-12)
        assert clique_link_gain(5, 0.5) == pytest.approx(1.5, abs=1e-12)

    @given(sizes_st, delta_st)
    def test_first_link_grows_with_group_size(self, s, delta):
        assert clique_link_gain(s + 1, delta) > clique_link_gain(s, delta)

    def test_extra_link_values(self):
        assert extra_link_gain(3, 0.5) == pytest.approx(0.5, abs=1e-12)
        assert extra_link_gain(5, 0.5) == pytest.approx(0.75, abs=1e-12)

    def test_shortcut_value(self):
        assert shortcut_gain(0.5) == pytest.approx(0.25, abs=1e-12)

    def test_shortcut_peaks_at_one_quarter(self):
        # clique formation is impossible for any cost of 1/4 or more
        peak = max(shortcut_gain(k / 1000) for k in range(1, 1000))
        assert peak <= 0.25 + 1e-12
        assert shortcut_gain(0.5) == 0.25

    @given(sizes_st, delta_st)
    def test_ordering(self, s, delta):
        assert 0 < shortcut_gain(delta) < extra_link_gain(s, delta) < clique_link_gain(s, delta)

    def test_domain_checks(self):
        with pytest.raises(ValidationError):
            clique_link_gain(2, 0.5)
        with pytest.raises(ValidationError):
            shortcut_gain(1.0)


class TestStableBoundaries:
    def test_frozen_values_3_5(self):
        bounds = stable_boundaries(3, 5, PARAMS)
        expected = [0.2, 0.4, 8 / 15, 0.8]
        assert len(bounds) == len(expected)
        for got, want in zip(bounds, expected):
            assert got == pytest.approx(want, abs=1e-12)

    def test_last_bound_meets_the_maximal_bound(self):
        for s1, s2 in [(3, 3), (3, 5), (4, 7), (5, 5), (6, 9)]:
            for delta in (0.2, 0.5, 0.7):
                params = ModelParams(delta, 0.8 * shortcut_gain(delta))
                bounds = stable_boundaries(s1, s2, params)
                assert bounds[-1] == pytest.approx(
                    params.cost / shortcut_gain(delta), rel=1e-12)

    def test_requires_low_cost(self):
        with pytest.raises(RegimeUndefinedError):
            stable_boundaries(3, 5, ModelParams(0.5, 0.25))


class TestClassifyStable:
    def test_disjoint_example(self):
        pred = classify_two_group_stable(3, 5, PARAMS, 0.1)
        assert pred.kind is RegimeKind.DISJOINT
        assert pred.upper == pytest.approx(0.2, abs=1e-12)
        assert pred.interconnections(3, 5) == 0

    def test_boundary_tie_example(self):
        pred = classify_two_group_stable(3, 5, PARAMS, 0.4)
        assert pred.kind is RegimeKind.BOUNDARY_TIE
        assert pred.lower == pytest.approx(0.4, abs=1e-12)

    def test_maximal_example(self):
        pred = classify_two_group_stable(3, 5, PARAMS, 0.85)
        assert pred.kind is RegimeKind.MAXIMAL
        assert pred.lower == pytest.approx(0.8, abs=1e-12)
        assert pred.interconnections(3, 5) == 15

    def test_exact_two_example(self):
        pred = classify_two_group_stable(3, 5, PARAMS, 0.45)
        assert pred.kind is RegimeKind.EXACT_K and pred.k == 2
        assert pred.lower == pytest.approx(0.4, abs=1e-12)
        assert pred.upper == pytest.approx(0.2 / 0.375, abs=1e-12)

    def test_bridge_interval(self):
        pred = classify_two_group_stable(3, 5, PARAMS, 0.3)
        assert pred.kind is RegimeKind.BRIDGE
        assert pred.interconnections(3, 5) == 1

    def test_regime_is_monotone_in_cross_weight(self):
        order = []
        for k in range(1, 100):
            f = k / 100
            pred = classify_two_group_stable(3, 5, PARAMS, f)
            if pred.kind is RegimeKind.BOUNDARY_TIE:
                continue
            rank = {RegimeKind.DISJOINT: 0, RegimeKind.BRIDGE: 1,
                    RegimeKind.MAXIMAL: 99}.get(pred.kind, pred.k)
            order.append(rank)
        assert order == sorted(order)

    def test_undefined_when_cost_high(self):
        with pytest.raises(RegimeUndefinedError):
            classify_two_group_stable(3, 5, ModelParams(0.5, 0.3), 0.5)

    def test_count_prediction_symmetric_and_peaked_at_even_split(self):
        # fixed n = 20, cross weight 0.25: count depends only on min(s1, s2)
        counts = {}
        for s1 in range(3, 18):
            pred = classify_two_group_stable(s1, 20 - s1, PARAMS, 0.25)
            assert pred.kind is not RegimeKind.BOUNDARY_TIE
            counts[s1] = pred.interconnections(s1, 20 - s1)
        for s1 in range(3, 18):
            assert counts[s1] == counts[20 - s1]
        assert max(counts, key=counts.get) == 10


class TestClassifyEfficient:
    def test_frozen_boundaries_3_5(self):
        bounds = efficient_boundaries(3, 5, PARAMS)
        expected = [1 / 15, 8 / 35, 0.8]
        for got, want in zip(bounds, expected):
            assert got == pytest.approx(want, abs=1e-12)

    def test_disjoint_example(self):
        pred = classify_two_group_efficient(3, 5, PARAMS, 0.05)
        assert pred.kind is RegimeKind.DISJOINT
        assert pred.upper == pytest.approx(1 / 15, abs=1e-12)

    def test_bridge_example(self):
        pred = classify_two_group_efficient(3, 5, PARAMS, 0.15)
        assert pred.kind is RegimeKind.BRIDGE
        assert pred.upper == pytest.approx(8 / 35, abs=1e-12)

    def test_maximal_example(self):
        pred = classify_two_group_efficient(3, 5, PARAMS, 0.9)
        assert pred.kind is RegimeKind.MAXIMAL
        assert pred.lower == pytest.approx(0.8, abs=1e-12)

    def test_redundant_band(self):
        pred = classify_two_group_efficient(3, 5, PARAMS, 0.5)
        assert pred.kind is RegimeKind.REDUNDANT
        assert pred.interconnections(3, 5) is None

    def test_bridge_upper_stays_below_both_redundancy_bounds(self):
        for s1, s2 in [(3, 3), (3, 5), (3, 8), (4, 6), (5, 9)]:
            for delta in (0.2, 0.4, 0.6, 0.8):
                params = ModelParams(delta, 0.5 * shortcut_gain(delta))
                upper = efficient_boundaries(s1, s2, params)[1]
                assert upper < params.cost / extra_link_gain(max(s1, s2), delta)


class TestOverlap:
    def test_low_weight_overlap(self):
        assert stability_efficiency_overlap(3, 5, PARAMS, 0.05)

    def test_gap_between_disjoint_and_bridge(self):
        assert not stability_efficiency_overlap(3, 5, PARAMS, 0.1)

    def test_full_weight_always_overlaps(self):
        for s1, s2, delta, cost in [(3, 5, 0.5, 0.2), (4, 4, 0.3, 0.1), (3, 8, 0.7, 0.15)]:
            assert stability_efficiency_overlap(s1, s2, ModelParams(delta, cost), 1.0)

    def test_middle_interval_needs_large_delta(self):
        # sizes (3, 9): the size-imbalance threshold is (9-3)/(12-3) = 2/3
        low = ModelParams(0.5, 0.1)
        assert not stability_efficiency_overlap(3, 9, low, 0.105)
        # same cross weight lies in the middle overlap piece when delta is high
        high = ModelParams(0.7, 0.1)
        stable_lo = stable_boundaries(3, 9, high)[0]
        eff_hi = efficient_boundaries(3, 9, high)[1]
        assert stable_lo <= eff_hi
        mid = (stable_lo + eff_hi) / 2
        assert stability_efficiency_overlap(3, 9, high, mid)


class TestRedundancyBounds:
    def test_frozen_values(self):
        assert redundancy_bounds(3, 5, PARAMS) == (
            pytest.approx(0.4, abs=1e-12), pytest.approx(0.8, abs=1e-12))
        assert redundancy_bounds(3, 3, PARAMS) == (
            pytest.approx(0.4, abs=1e-12), pytest.approx(0.8, abs=1e-12))

    @given(sizes_st, sizes_st, delta_st)
    def test_redundant_before_maximal(self, s1, s2, delta):
        cost = 0.5 * shortcut_gain(delta)
        lo, hi = redundancy_bounds(s1, s2, ModelParams(delta, cost))
        assert lo < hi


class TestGroupGraph:
    def test_star_edges(self):
        tree = GroupGraph.star(4, center=1)
        assert tree.edges == frozenset({(0, 1), (1, 2), (1, 3)})

    def test_rejects_self_loops(self):
        with pytest.raises(ValidationError):
            GroupGraph.from_edges(3, [(1, 1)])

    def test_connectivity(self):
        assert GroupGraph.star(4).is_connected()
        assert not GroupGraph.from_edges(4, [(0, 1)]).is_connected()

    def test_distances_with_toggles(self):
        ring = GroupGraph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
        assert ring.distances_from(0)[2] == 2
        assert ring.distances_from(0, drop=(0, 1))[1] == 3
        assert ring.distances_from(0, add=(0, 2))[2] == 1


class TestBridgeSufficiency:
    def test_two_group_reduction_matches_the_bridge_regime(self):
        # one tree edge between two groups: the check must accept exactly the
        # open bridge band of the two-group classifier
        tree = GroupGraph.from_edges(2, [(0, 1)])
        partition = GroupPartition.from_sizes([3, 5])
        for k in range(1, 100):
            f = k / 100
            pred = classify_two_group_stable(3, 5, PARAMS, f)
            verdict = minimally_connected_sufficient(
                tree, CoordinationMatrix.uniform(2, f), partition, PARAMS)
            if pred.kind is RegimeKind.BOUNDARY_TIE:
                continue
            assert verdict == (pred.kind is RegimeKind.BRIDGE)

    def test_star_with_qualified_center(self):
        partition = GroupPartition.from_sizes([3, 3, 3, 3])
        tree = GroupGraph.star(4, center=0)
        rows = [[1.0, 0.3, 0.3, 0.3],
                [0.3, 1.0, 0.1, 0.1],
                [0.3, 0.1, 1.0, 0.1],
                [0.3, 0.1, 0.1, 1.0]]
        coordination = CoordinationMatrix.from_array(rows)
        assert minimally_connected_sufficient(tree, coordination, partition, PARAMS)

    def test_star_fails_when_a_spoke_is_too_weak(self):
        partition = GroupPartition.from_sizes([3, 3, 3, 3])
        tree = GroupGraph.star(4, center=0)
        rows = [[1.0, 0.3, 0.3, 0.1],
                [0.3, 1.0, 0.1, 0.1],
                [0.3, 0.1, 1.0, 0.1],
                [0.1, 0.1, 0.1, 1.0]]
        coordination = CoordinationMatrix.from_array(rows)
        assert not minimally_connected_sufficient(tree, coordination, partition, PARAMS)

    def test_five_equal_groups_star_premise(self):
        params = ModelParams(0.55, 0.2)
        lo = params.cost / clique_link_gain(3, params.delta)
        hi = params.cost / extra_link_gain(3, params.delta)
        assert lo < 0.2 < hi
        partition = GroupPartition.from_sizes([3, 3, 3, 3, 3])
        tree = GroupGraph.star(5, center=0)
        assert minimally_connected_sufficient(
            tree, CoordinationMatrix.uniform(5, 0.2), partition, params)

    def test_disconnected_tree_rejected(self):
        partition = GroupPartition.from_sizes([3, 3, 3])
        tree = GroupGraph.from_edges(3, [(0, 1)])
        with pytest.raises(ValidationError):
            minimally_connected_sufficient(
                tree, CoordinationMatrix.uniform(3, 0.3), partition, PARAMS)
