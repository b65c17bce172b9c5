"""Partition a (ground truth, prediction) frame pair into TP / FP / FN sets.

A (gt, pd) pair is eligible when IoU strictly exceeds the configured
minimum overlap and the class labels agree. Eligible pairs are accepted
greedily in order of descending IoU, one-to-one on both sides; ties break
toward the lower gt index, then the lower pd index, so results are
deterministic across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .model import BBox, FrameDetections, MetricConfig


@dataclass(frozen=True)
class MatchResult:
    """One-to-one matching outcome for a frame pair.

    tp holds (gt_index, pd_index) pairs in acceptance (descending IoU)
    order; fp and fn hold the unmatched pd / gt indices in ascending order.
    """

    tp: tuple[tuple[int, int], ...]
    fp: tuple[int, ...]
    fn: tuple[int, ...]


def iou(a: BBox, b: BBox) -> float:
    """Intersection over union of two boxes; 0 when disjoint."""
    iw = min(a.x2, b.x2) - max(a.x1, b.x1)
    ih = min(a.y2, b.y2) - max(a.y1, b.y1)
    if iw <= 0.0 or ih <= 0.0:
        return 0.0
    inter = iw * ih
    union = a.area() + b.area() - inter
    if union <= 0.0:
        return 0.0
    return inter / union


def intersection_area(a: BBox, b: BBox) -> float:
    iw = min(a.x2, b.x2) - max(a.x1, b.x1)
    ih = min(a.y2, b.y2) - max(a.y1, b.y1)
    if iw <= 0.0 or ih <= 0.0:
        return 0.0
    return iw * ih


def symmetric_difference_area(a: BBox, b: BBox) -> float:
    """Area of (A - B) union (B - A): area(a) + area(b) - 2 * area(a n b)."""
    return a.area() + b.area() - 2.0 * intersection_area(a, b)


def boxes_array(frame: FrameDetections) -> np.ndarray:
    """Frame boxes as an (N,4) float64 array in x1,y1,x2,y2 order."""
    if not frame.detections:
        return np.zeros((0, 4), dtype=np.float64)
    return np.array([d.bbox.as_tuple() for d in frame.detections], dtype=np.float64)


def classes_array(frame: FrameDetections) -> np.ndarray:
    return np.array([d.class_id for d in frame.detections], dtype=np.int64)


def match(gt: FrameDetections, pd: FrameDetections, cfg: MetricConfig) -> MatchResult:
    """Greedy one-to-one matching under the IoU-and-class eligibility rule."""
    n, m = len(gt.detections), len(pd.detections)
    if n == 0 or m == 0:
        return MatchResult((), tuple(range(m)), tuple(range(n)))
    iou_mat = kernels.pairwise_iou(boxes_array(gt), boxes_array(pd))
    eligible = (iou_mat > cfg.min_overlap) & (
        classes_array(gt)[:, None] == classes_array(pd)[None, :]
    )
    pairs = kernels.greedy_match(iou_mat, eligible)
    tp = tuple((int(i), int(j)) for i, j in pairs)
    matched_gt = {i for i, _ in tp}
    matched_pd = {j for _, j in tp}
    fp = tuple(j for j in range(m) if j not in matched_pd)
    fn = tuple(i for i in range(n) if i not in matched_gt)
    return MatchResult(tp, fp, fn)
