"""One-to-one prediction/ground-truth assignment ahead of reward computation.

The matcher solves an exact rectangular minimum-cost assignment over a
box-driven cost (1 - IoU), optionally adding a flat label-mismatch penalty.
Among equal-cost optima, ties are broken canonically: scanning predictions in
emission order, each takes the lowest-indexed ground truth consistent with
some minimum-total-cost completion.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import SpaceMismatchError
from .geometry import Box, CoordinateSpace, iou, validate_box
from .parsing import normalize_label

LABEL_MISMATCH_PENALTY = 1.0

# absolute slack when testing whether a pair belongs to some optimal
# assignment; well above float summation noise (~1e-15 for these sizes) and
# far below any meaningful cost difference
_COST_TIE_ATOL = 1e-9


class MatcherPolicy(str, Enum):
    BOX_ONLY = "box"
    BOX_AND_LABEL = "box-label"


@dataclass(frozen=True)
class GroundTruthInstance:
    label: str
    box: Box


@dataclass(frozen=True)
class GroundTruthSet:
    """Annotated instances for one query; may be empty (negative sample)."""

    instances: tuple[GroundTruthInstance, ...]
    space: CoordinateSpace

    def __post_init__(self) -> None:
        for instance in self.instances:
            ok, reason = validate_box(instance.box, self.space)
            if not ok:
                raise SpaceMismatchError(
                    f"ground-truth box {instance.box.coords()} invalid in its space: {reason}"
                )

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, Box]], space: CoordinateSpace) -> "GroundTruthSet":
        return cls(tuple(GroundTruthInstance(label, box) for label, box in pairs), space)

    def __len__(self) -> int:
        return len(self.instances)


@dataclass(frozen=True)
class MatchedPrediction:
    """A prediction with its assigned ground truth (if any) and overlap."""

    box: Box
    label: str
    iou: float
    gt_index: int | None
    label_correct: bool


def assignment_cost(
    pred: tuple[str, Box],
    gt_instance: tuple[str, Box],
    policy: MatcherPolicy = MatcherPolicy.BOX_ONLY,
) -> float:
    """Pairwise cost: ``1 - IoU``, plus 1.0 when labels differ under box-label."""
    pred_label, pred_box = pred
    gt_label, gt_box = gt_instance
    cost = 1.0 - iou(pred_box, gt_box)
    if policy is MatcherPolicy.BOX_AND_LABEL and normalize_label(pred_label) != normalize_label(gt_label):
        cost += LABEL_MISMATCH_PENALTY
    return cost


def _lsa_total(cost: np.ndarray) -> float:
    if cost.size == 0:
        return 0.0
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].sum())


def _canonical_pairs(cost: np.ndarray) -> list[tuple[int, int]]:
    """Minimum-cost maximal assignment, canonical among cost ties.

    Exactly ``min(m, g)`` pairs are produced. Each candidate choice is kept
    only if the remaining subproblem can still complete to the optimal total,
    so the result is always exactly optimal; the tolerance only absorbs float
    summation order.
    """
    m, g = cost.shape
    need = min(m, g)
    if need == 0:
        return []
    pairs: list[tuple[int, int]] = []
    remaining = list(range(g))
    for i in range(m):
        if need == 0:
            break
        target = _lsa_total(cost[np.ix_(range(i, m), remaining)])
        chosen = None
        for j in remaining:
            if need > 1:
                rest = [c for c in remaining if c != j]
                completion = _lsa_total(cost[np.ix_(range(i + 1, m), rest)])
            else:
                completion = 0.0
            if abs(cost[i, j] + completion - target) <= _COST_TIE_ATOL:
                chosen = j
                break
        if chosen is None:
            if m - i - 1 >= need:
                # every optimum leaves prediction i out
                continue
            # numeric safety net (unreachable in practice): accept the plain
            # solver's pairing for the remaining block
            sub = cost[np.ix_(range(i, m), remaining)]
            rows, cols = linear_sum_assignment(sub)
            pairs.extend((i + int(r), remaining[int(c)]) for r, c in zip(rows, cols))
            return pairs
        pairs.append((i, chosen))
        remaining.remove(chosen)
        need -= 1
    return pairs


def _cost_matrix(
    predictions: Sequence[tuple[str, Box]],
    gt: GroundTruthSet,
    policy: MatcherPolicy,
) -> tuple[np.ndarray, np.ndarray]:
    ious = np.array(
        [[iou(box, inst.box) for inst in gt.instances] for _, box in predictions],
        dtype=float,
    )
    cost = 1.0 - ious
    if policy is MatcherPolicy.BOX_AND_LABEL:
        pred_norm = [normalize_label(label) for label, _ in predictions]
        gt_norm = [normalize_label(inst.label) for inst in gt.instances]
        penalty = np.array(
            [[0.0 if p == g else LABEL_MISMATCH_PENALTY for g in gt_norm] for p in pred_norm]
        )
        cost = cost + penalty
    return cost, ious


def match(
    predictions: Sequence[tuple[str, Box]],
    gt: GroundTruthSet,
    policy: MatcherPolicy = MatcherPolicy.BOX_ONLY,
) -> list[MatchedPrediction]:
    """Assign predictions to ground-truth instances one-to-one.

    Returns one entry per prediction in input order. Predictions left without
    a ground truth (only possible when they outnumber the ground truths)
    carry ``iou=0`` and no index. Zero-overlap pairs stay assignable at cost
    1; they are reported with their index but never reach any validity
    threshold.
    """
    for label, box in predictions:
        ok, reason = validate_box(box, gt.space)
        if not ok:
            raise SpaceMismatchError(
                f"prediction box {box.coords()} invalid in the ground-truth space: {reason}"
            )
    if not predictions:
        return []
    if len(gt) == 0:
        return [MatchedPrediction(box, label, 0.0, None, False) for label, box in predictions]
    cost, ious = _cost_matrix(predictions, gt, policy)
    assigned = dict(_canonical_pairs(cost))
    out: list[MatchedPrediction] = []
    for index, (label, box) in enumerate(predictions):
        gt_index = assigned.get(index)
        if gt_index is None:
            out.append(MatchedPrediction(box, label, 0.0, None, False))
        else:
            correct = normalize_label(label) == normalize_label(gt.instances[gt_index].label)
            out.append(MatchedPrediction(box, label, float(ious[index, gt_index]), gt_index, correct))
    return out
