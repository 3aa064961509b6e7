"""Detection-quality metrics: interpolated average precision and recall.

Model-emitted detections carry no confidence scores, so every detection is
treated as score 1.0 and ranked by emission order (dataset image order, then
order within the completion). Detections are truncated to the first 100 per
image and category before matching, matching consumes each ground truth at
most once, and a true positive needs a label match plus IoU at or above the
threshold. Categories without any ground-truth instance are excluded from
category averages.

The IoU threshold grid is the conventional ten steps from 0.5 to 0.95 built
by repeated 0.05 addition (as ``numpy.arange`` would). The floats drift a few
ulps above the nominal values, so a detection whose IoU is exactly a nominal
boundary such as 0.6 falls below that gridpoint; averages are reported over
these grid floats as-is.
"""

from __future__ import annotations

from bisect import bisect_left
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import InvalidBoxError
from .geometry import Box, CoordinateSpace, iou, validate_box
from .matching import GroundTruthSet
from .parsing import normalize_label


def _threshold_grid() -> tuple[float, ...]:
    value = 0.5
    grid = [value]
    for _ in range(9):
        value += 0.05
        grid.append(value)
    return tuple(grid)


IOU_THRESHOLDS: tuple[float, ...] = _threshold_grid()
MAX_DETECTIONS_PER_IMAGE = 100
_RECALL_GRID = tuple(i / 100 for i in range(101))


@dataclass(frozen=True)
class EvalImage:
    image_id: str
    space: CoordinateSpace
    gt: GroundTruthSet


@dataclass(frozen=True)
class EvalDataset:
    images: tuple[EvalImage, ...]
    categories: tuple[str, ...]

    def __post_init__(self) -> None:
        ids = [img.image_id for img in self.images]
        if len(set(ids)) != len(ids):
            raise ValueError("image ids must be unique")
        known = {normalize_label(c) for c in self.categories}
        for img in self.images:
            for inst in img.gt.instances:
                if normalize_label(inst.label) not in known:
                    raise ValueError(
                        f"ground-truth label {inst.label!r} missing from the category list"
                    )


@dataclass(frozen=True)
class EvalResult:
    ap_per_iou: Mapping[float, float]
    map_5095: float
    ap50: float
    ap75: float
    ar100: float
    diagnostics: tuple[str, ...] = field(default_factory=tuple)


def per_image_counts(
    predictions: Sequence[tuple[str, Box]],
    gt: GroundTruthSet,
    iou_threshold: float,
) -> tuple[int, int, int]:
    """Greedy TP/FP/FN counts for one image at one IoU threshold.

    Predictions are visited in rank order; each takes the best still-unmatched
    ground truth of its own label, and counts as a true positive only when
    that overlap reaches the threshold. Duplicates of an already-consumed
    ground truth become false positives.
    """
    used = [False] * len(gt.instances)
    tp = 0
    fp = 0
    for label, box in predictions:
        wanted = normalize_label(label)
        best_index = -1
        best_value = -1.0
        for gt_index, inst in enumerate(gt.instances):
            if used[gt_index] or normalize_label(inst.label) != wanted:
                continue
            overlap = iou(box, inst.box)
            if overlap > best_value:
                best_index, best_value = gt_index, overlap
        if best_index >= 0 and best_value >= iou_threshold:
            used[best_index] = True
            tp += 1
        else:
            fp += 1
    return tp, fp, len(gt.instances) - tp


def _match_category(
    dataset: EvalDataset,
    detections: Mapping[str, Mapping[str, list[Box]]],
    category: str,
    threshold: float,
) -> tuple[list[bool], int]:
    """Rank-ordered TP flags and the ground-truth count for one category."""
    flags: list[bool] = []
    npos = 0
    for img in dataset.images:
        gt_boxes = [
            inst.box for inst in img.gt.instances if normalize_label(inst.label) == category
        ]
        npos += len(gt_boxes)
        used = [False] * len(gt_boxes)
        for det in detections.get(img.image_id, {}).get(category, []):
            best_index = -1
            best_value = -1.0
            for gt_index, gt_box in enumerate(gt_boxes):
                if used[gt_index]:
                    continue
                overlap = iou(det, gt_box)
                if overlap > best_value:
                    best_index, best_value = gt_index, overlap
            if best_index >= 0 and best_value >= threshold:
                used[best_index] = True
                flags.append(True)
            else:
                flags.append(False)
    return flags, npos


def _interpolated_ap(tp_flags: Sequence[bool], npos: int) -> float:
    """101-point interpolated average precision from rank-ordered TP flags."""
    if npos == 0:
        return 0.0
    if not tp_flags:
        return 0.0
    precisions: list[float] = []
    recalls: list[float] = []
    tp_cum = 0
    for rank, flag in enumerate(tp_flags, start=1):
        tp_cum += flag
        precisions.append(tp_cum / rank)
        recalls.append(tp_cum / npos)
    # precision envelope: best precision achieved at this recall or beyond
    for i in range(len(precisions) - 2, -1, -1):
        precisions[i] = max(precisions[i], precisions[i + 1])
    total = 0.0
    for r in _RECALL_GRID:
        k = bisect_left(recalls, r)
        if k < len(recalls):
            total += precisions[k]
    return total / len(_RECALL_GRID)


def evaluate(
    predictions: Mapping[str, Sequence[tuple[str, Box]]],
    dataset: EvalDataset,
) -> EvalResult:
    """Category-averaged AP across the IoU grid, plus average recall.

    ``predictions`` maps image ids to rank-ordered (label, box) detections in
    that image's coordinate space; missing ids mean no detections. Labels
    outside the category list can never match and are only reported in
    diagnostics.
    """
    diagnostics: list[str] = []
    known = {normalize_label(c) for c in dataset.categories}
    gt_count: Counter[str] = Counter()
    for img in dataset.images:
        for inst in img.gt.instances:
            gt_count[normalize_label(inst.label)] += 1
    active: list[str] = []
    for category in dataset.categories:
        norm = normalize_label(category)
        if gt_count[norm] > 0 and norm not in active:
            active.append(norm)

    unknown = 0
    detections: dict[str, dict[str, list[Box]]] = {}
    for img in dataset.images:
        per_category: dict[str, list[Box]] = defaultdict(list)
        for label, box in predictions.get(img.image_id, ()):
            ok, reason = validate_box(box, img.space)
            if not ok:
                raise InvalidBoxError(
                    f"prediction box {box.coords()} invalid in image {img.image_id}: {reason}"
                )
            norm = normalize_label(label)
            if norm not in known:
                unknown += 1
                continue
            if len(per_category[norm]) < MAX_DETECTIONS_PER_IMAGE:
                per_category[norm].append(box)
        detections[img.image_id] = dict(per_category)
    if unknown:
        diagnostics.append(
            f"{unknown} prediction(s) with labels outside the category list; "
            "counted as false positives"
        )

    ap_per_iou: dict[float, float] = {}
    recall_values: list[float] = []
    for threshold in IOU_THRESHOLDS:
        ap_values: list[float] = []
        for category in active:
            flags, npos = _match_category(dataset, detections, category, threshold)
            ap_values.append(_interpolated_ap(flags, npos))
            recall_values.append(sum(flags) / npos)
        ap_per_iou[threshold] = sum(ap_values) / len(ap_values) if ap_values else 0.0

    if not active:
        diagnostics.append("no category has ground-truth instances; all metrics are 0")
    ap_list = [ap_per_iou[t] for t in IOU_THRESHOLDS]
    return EvalResult(
        ap_per_iou=ap_per_iou,
        map_5095=sum(ap_list) / len(ap_list),
        ap50=ap_per_iou[IOU_THRESHOLDS[0]],
        ap75=ap_per_iou[IOU_THRESHOLDS[5]],
        ar100=(sum(recall_values) / len(recall_values)) if recall_values else 0.0,
        diagnostics=tuple(diagnostics),
    )
