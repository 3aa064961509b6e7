import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from locscore import (
    Box,
    GroundTruthSet,
    MatcherPolicy,
    SpaceMismatchError,
    assignment_cost,
    match,
    pixel_space,
)

from conftest import LABELS, random_box, random_gt
from oracles import assignment_total, min_assignment_cost

SPACE = pixel_space(640, 480)


def _cost_matrix(preds, gt, policy):
    return np.array(
        [
            [assignment_cost(p, (inst.label, inst.box), policy) for inst in gt.instances]
            for p in preds
        ]
    )


def _matched_pairs(result):
    return [(i, m.gt_index) for i, m in enumerate(result) if m.gt_index is not None]


class TestAssignmentCost:
    def test_identical_box_same_label(self):
        pred = ("cat", Box(0, 0, 10, 10))
        for policy in MatcherPolicy:
            assert assignment_cost(pred, pred, policy) == 0.0

    def test_identical_box_label_mismatch_penalty(self):
        pred = ("cat", Box(0, 0, 10, 10))
        gt = ("dog", Box(0, 0, 10, 10))
        assert assignment_cost(pred, gt, MatcherPolicy.BOX_AND_LABEL) == 1.0
        assert assignment_cost(pred, gt, MatcherPolicy.BOX_ONLY) == 0.0

    def test_disjoint_same_label(self):
        pred = ("cat", Box(0, 0, 10, 10))
        gt = ("cat", Box(20, 20, 30, 30))
        assert assignment_cost(pred, gt, MatcherPolicy.BOX_ONLY) == 1.0

    def test_label_comparison_is_normalized(self):
        pred = ("Traffic  Light", Box(0, 0, 10, 10))
        gt = ("traffic light", Box(0, 0, 10, 10))
        assert assignment_cost(pred, gt, MatcherPolicy.BOX_AND_LABEL) == 0.0


class TestMatch:
    def test_two_by_two_example(self):
        preds = [("cat", Box(0, 0, 10, 10)), ("dog", Box(20, 20, 30, 30))]
        gt = GroundTruthSet.from_pairs(
            [("cat", Box(1, 1, 10, 10)), ("dog", Box(19, 19, 31, 31))], SPACE
        )
        result = match(preds, gt, MatcherPolicy.BOX_ONLY)
        assert [m.gt_index for m in result] == [0, 1]
        assert result[0].iou == pytest.approx(81 / 100)
        assert result[1].iou == pytest.approx(100 / 144)
        assert all(m.label_correct for m in result)

    def test_empty_predictions(self):
        assert match([], random_gt(random.Random(1), 3), MatcherPolicy.BOX_ONLY) == []

    def test_empty_gt(self):
        gt = GroundTruthSet((), SPACE)
        result = match([("cat", Box(0, 0, 10, 10))], gt)
        assert len(result) == 1
        assert result[0].gt_index is None
        assert result[0].iou == 0.0
        assert not result[0].label_correct

    def test_more_predictions_than_gt(self):
        preds = [
            ("cat", Box(0, 0, 10, 10)),
            ("cat", Box(1, 1, 11, 11)),
            ("cat", Box(100, 100, 120, 120)),
        ]
        gt = GroundTruthSet.from_pairs([("cat", Box(0, 0, 10, 10))], SPACE)
        result = match(preds, gt)
        assigned = [m for m in result if m.gt_index is not None]
        assert len(assigned) == 1
        assert assigned[0].iou == 1.0

    def test_label_mismatch_flag(self):
        preds = [("dog", Box(0, 0, 10, 10))]
        gt = GroundTruthSet.from_pairs([("cat", Box(0, 0, 10, 10))], SPACE)
        result = match(preds, gt, MatcherPolicy.BOX_ONLY)
        assert result[0].gt_index == 0
        assert result[0].iou == 1.0
        assert not result[0].label_correct

    def test_box_and_label_prefers_matching_label(self):
        # equal boxes; label agreement must win under box-and-label
        preds = [("cat", Box(0, 0, 10, 10))]
        gt = GroundTruthSet.from_pairs(
            [("dog", Box(0, 0, 10, 10)), ("cat", Box(1, 1, 10, 10))], SPACE
        )
        box_only = match(preds, gt, MatcherPolicy.BOX_ONLY)
        with_label = match(preds, gt, MatcherPolicy.BOX_AND_LABEL)
        assert box_only[0].gt_index == 0  # higher IoU wins
        assert with_label[0].gt_index == 1  # label correctness wins
        assert with_label[0].label_correct

    def test_space_mismatch_detected(self):
        gt = GroundTruthSet.from_pairs([("cat", Box(0, 0, 10, 10))], SPACE)
        with pytest.raises(SpaceMismatchError):
            match([("cat", Box(0, 0, 10_000, 10))], gt)

    def test_tie_break_prefers_low_indices(self):
        # two identical predictions, two identical ground truths: all four
        # pairings cost the same, so pred 0 must take gt 0
        box = Box(0, 0, 10, 10)
        preds = [("cat", box), ("cat", box)]
        gt = GroundTruthSet.from_pairs([("cat", box), ("cat", box)], SPACE)
        result = match(preds, gt)
        assert [m.gt_index for m in result] == [0, 1]

    def test_zero_overlap_pairs_still_assigned(self):
        preds = [("cat", Box(0, 0, 10, 10))]
        gt = GroundTruthSet.from_pairs([("cat", Box(100, 100, 200, 200))], SPACE)
        result = match(preds, gt)
        assert result[0].gt_index == 0
        assert result[0].iou == 0.0


class TestCanonicalTieBreak:
    # exercises the solver's documented tie order on exact-tie cost matrices
    def test_exact_cost_tie_prefers_low_gt_for_low_pred(self):
        from locscore.matching import _canonical_pairs

        # both assignments total exactly 1.0 (binary-exact values)
        cost = np.array([[0.25, 0.5], [0.5, 0.75]])
        assert _canonical_pairs(cost) == [(0, 0), (1, 1)]

    def test_all_equal_matrix(self):
        from locscore.matching import _canonical_pairs

        cost = np.ones((3, 3))
        assert _canonical_pairs(cost) == [(0, 0), (1, 1), (2, 2)]

    def test_surplus_predictions_prefer_low_index_assignment(self):
        from locscore.matching import _canonical_pairs

        cost = np.ones((3, 1))
        assert _canonical_pairs(cost) == [(0, 0)]

    def test_rectangular_tie(self):
        from locscore.matching import _canonical_pairs

        cost = np.array([[0.5, 0.5, 0.5], [0.5, 0.5, 0.5]])
        assert _canonical_pairs(cost) == [(0, 0), (1, 1)]

    def test_forced_skip_of_expensive_prediction(self):
        from locscore.matching import _canonical_pairs

        # pred 0 is costly everywhere; the optimum must leave it out
        cost = np.array([[10.0], [0.25]])
        assert _canonical_pairs(cost) == [(1, 0)]


class TestOptimality:
    @pytest.mark.parametrize("policy", list(MatcherPolicy))
    def test_matches_brute_force_on_random_instances(self, policy):
        rng = random.Random(97)
        for _ in range(60):
            m = rng.randrange(0, 7)
            g = rng.randrange(0, 7)
            preds = [(rng.choice(LABELS), random_box(rng)) for _ in range(m)]
            gt = random_gt(rng, g)
            result = match(preds, gt, policy)
            assert len(result) == m
            pairs = _matched_pairs(result)
            assert len(pairs) == min(m, g)
            if m and g:
                cost = _cost_matrix(preds, gt, policy)
                assert assignment_total(cost, pairs) == min_assignment_cost(cost)

    def test_one_to_one(self):
        rng = random.Random(5)
        for _ in range(40):
            preds = [(rng.choice(LABELS), random_box(rng)) for _ in range(rng.randrange(1, 8))]
            gt = random_gt(rng, rng.randrange(1, 8))
            used = [m.gt_index for m in match(preds, gt) if m.gt_index is not None]
            assert len(used) == len(set(used))

    def test_shuffle_invariance_of_total_cost(self):
        rng = random.Random(11)
        for _ in range(25):
            preds = [(rng.choice(LABELS), random_box(rng)) for _ in range(rng.randrange(1, 7))]
            gt = random_gt(rng, rng.randrange(1, 7))
            base = match(preds, gt)
            cost = _cost_matrix(preds, gt, MatcherPolicy.BOX_ONLY)
            base_total = assignment_total(cost, _matched_pairs(base))

            shuffled = preds[:]
            rng.shuffle(shuffled)
            index_of = {id(p): i for i, p in enumerate(preds)}
            other = match(shuffled, gt)
            other_pairs = [
                (index_of[id(shuffled[i])], m.gt_index)
                for i, m in enumerate(other)
                if m.gt_index is not None
            ]
            assert assignment_total(cost, other_pairs) == pytest.approx(base_total, abs=1e-9)
            # continuous random boxes: optimum is unique, multisets agree
            assert sorted((m.gt_index, m.iou) for m in base if m.gt_index is not None) == sorted(
                (m.gt_index, m.iou) for m in other if m.gt_index is not None
            )

    @given(st.data())
    @settings(max_examples=60, deadline=None)
    def test_output_shape_properties(self, data):
        rng = random.Random(data.draw(st.integers(0, 2**28)))
        m = data.draw(st.integers(0, 6))
        g = data.draw(st.integers(0, 6))
        preds = [(rng.choice(LABELS), random_box(rng)) for _ in range(m)]
        gt = random_gt(rng, g)
        result = match(preds, gt)
        assert len(result) == m
        assert [r.label for r in result] == [p[0] for p in preds]
        used = [r.gt_index for r in result if r.gt_index is not None]
        assert len(used) == len(set(used))
        for r in result:
            if r.gt_index is None:
                assert r.iou == 0.0
            assert 0.0 <= r.iou <= 1.0
