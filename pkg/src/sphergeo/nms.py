"""Greedy score-ordered non-maximum suppression over FoV detections."""

from __future__ import annotations

from dataclasses import dataclass

from .bfov import FovBBox
from .iou import FOV, IoUMethod, pair_iou

__all__ = ["Detection", "nms"]


@dataclass(frozen=True)
class Detection:
    """A scored, categorized box prediction on one image."""

    bbox: FovBBox
    score: float
    category_id: int
    image_id: int

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score {self.score} outside [0, 1]")


def nms(dets: list[Detection], iou_threshold: float,
        method: IoUMethod = FOV) -> list[Detection]:
    """Classic greedy NMS, applied per category.

    Detections are visited by descending score (ties keep input order); a
    detection is suppressed when its IoU with an already-kept detection of
    the same category exceeds the threshold strictly.  Kept detections are
    returned unmodified, in descending-score order.
    """
    if not 0.0 <= iou_threshold <= 1.0:
        raise ValueError(f"iou_threshold {iou_threshold} outside [0, 1]")
    order = sorted(range(len(dets)), key=lambda i: -dets[i].score)
    kept: list[Detection] = []
    for i in order:
        d = dets[i]
        suppressed = any(
            k.category_id == d.category_id
            and pair_iou(k.bbox, d.bbox, method) > iou_threshold
            for k in kept
        )
        if not suppressed:
            kept.append(d)
    return kept
