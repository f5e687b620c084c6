"""COCO-style mean average precision over FoV boxes.

AP uses 101-point interpolation (recall grid 0.00:0.01:1.00, precision
taken as the maximum at recall >= r) averaged over the categories that
have at least one ground truth, and the usual threshold sweep
0.50:0.05:0.95.  Matching is greedy per (image, category): detections by
descending score, each taking the unmatched ground truth of highest
IoU >= threshold, exact ties broken toward the lower ground-truth id.

Size buckets cut on the planar FoV-product area; the default thresholds
translate the usual 32/96-pixel box edges at a 1920x960 panorama
(0.1875 degrees per pixel) into 6 and 18 degree edges.  Latitude bands cut
on the absolute center latitude.  Both cuts filter ground truths and
detections alike before matching; crowd/ignore annotations are not
supported.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial

from .bfov import FovBBox, planar_area
from .iou import FOV, IoUMethod, pair_iou
from .nms import Detection

__all__ = [
    "GroundTruth",
    "Matching",
    "EvalReport",
    "COCO_THRESHOLDS",
    "DEFAULT_SIZE_BUCKETS",
    "DEFAULT_BANDS",
    "match_detections",
    "average_precision",
    "evaluate",
]

COCO_THRESHOLDS = tuple(round(0.50 + 0.05 * i, 2) for i in range(10))

# (lower, upper) planar areas in square degrees: edges below 6 deg are
# "small", below 18 deg "medium", the rest "large".
DEFAULT_SIZE_BUCKETS: dict[str, tuple[float, float]] = {
    "small": (0.0, 36.0),
    "medium": (36.0, 324.0),
    "large": (324.0, float("inf")),
}

# Absolute-latitude bands, degrees.
DEFAULT_BANDS: tuple[tuple[float, float], ...] = ((50.0, 90.0),)


@dataclass(frozen=True)
class GroundTruth:
    """An annotated box; ids must be unique within a dataset."""

    id: int
    bbox: FovBBox
    category_id: int
    image_id: int


@dataclass(frozen=True)
class Matching:
    """Outcome of matching one detection list against one GT list.

    ``pairs`` holds (detection index, ground-truth id); indices refer to
    the detection list passed in, unsorted.
    """

    pairs: tuple[tuple[int, int], ...]
    unmatched_dets: tuple[int, ...]
    unmatched_gts: tuple[int, ...]


@dataclass(frozen=True)
class EvalReport:
    """AP statistics; ``None`` marks a slice with no ground truth."""

    ap: float | None
    ap50: float | None
    ap75: float | None
    ap_small: float | None
    ap_medium: float | None
    ap_large: float | None
    band_aps: dict[str, float | None] = field(default_factory=dict)
    per_category: dict[int, float | None] = field(default_factory=dict)
    n_ground_truths: int = 0
    n_detections: int = 0

    def to_dict(self) -> dict:
        return {
            "ap": self.ap,
            "ap50": self.ap50,
            "ap75": self.ap75,
            "ap_small": self.ap_small,
            "ap_medium": self.ap_medium,
            "ap_large": self.ap_large,
            "band_aps": dict(self.band_aps),
            "per_category": {str(k): v for k, v in self.per_category.items()},
            "n_ground_truths": self.n_ground_truths,
            "n_detections": self.n_detections,
        }


def match_detections(gts: list[GroundTruth], dets: list[Detection],
                     iou_thr: float, method: IoUMethod = FOV,
                     iou_fn=None) -> Matching:
    """Greedy one-to-one matching, independent per (image, category).

    ``iou_fn(gt_bbox, det_bbox)`` overrides the method dispatch; ``evaluate``
    passes a memoized one so the threshold sweep prices each pair once.
    """
    if iou_fn is None:
        iou_fn = partial(pair_iou, method=method)
    pairs: list[tuple[int, int]] = []
    unmatched_dets: list[int] = []
    taken: set[int] = set()

    groups: dict[tuple[int, int], list[int]] = {}
    for i, d in enumerate(dets):
        groups.setdefault((d.image_id, d.category_id), []).append(i)

    for key, det_idx in groups.items():
        image_id, category_id = key
        # Ascending gt id plus strict improvement breaks exact IoU ties
        # toward the lower id.
        candidates = sorted(
            (g for g in gts
             if g.image_id == image_id and g.category_id == category_id),
            key=lambda g: g.id)
        det_idx = sorted(det_idx, key=lambda i: -dets[i].score)
        for i in det_idx:
            best_gt = None
            best_iou = -1.0
            for g in candidates:
                if g.id in taken:
                    continue
                v = iou_fn(g.bbox, dets[i].bbox)
                if v >= iou_thr and v > best_iou:
                    best_gt, best_iou = g, v
            if best_gt is None:
                unmatched_dets.append(i)
            else:
                taken.add(best_gt.id)
                pairs.append((i, best_gt.id))

    unmatched_gts = tuple(g.id for g in gts if g.id not in taken)
    return Matching(tuple(pairs), tuple(unmatched_dets), tuple(unmatched_gts))


def average_precision(scored_hits: list[tuple[float, bool]], n_gt: int) -> float:
    """101-point interpolated AP from (score, is-true-positive) pairs."""
    if n_gt <= 0:
        raise ValueError("average_precision needs at least one ground truth")
    ranked = sorted(range(len(scored_hits)), key=lambda i: -scored_hits[i][0])
    tp = 0
    fp = 0
    points: list[tuple[float, float]] = []  # (recall, precision)
    for i in ranked:
        if scored_hits[i][1]:
            tp += 1
        else:
            fp += 1
        points.append((tp / n_gt, tp / (tp + fp)))

    ap = 0.0
    for k in range(101):
        r = k / 100.0
        best = 0.0
        for recall, precision in points:
            if recall >= r - 1e-12 and precision > best:
                best = precision
        ap += best
    return ap / 101.0


def _category_ap(gts, dets, thr, method, iou_fn=None) -> float:
    matching = match_detections(gts, dets, thr, method, iou_fn=iou_fn)
    matched = {i for i, _ in matching.pairs}
    scored = [(d.score, i in matched) for i, d in enumerate(dets)]
    return average_precision(scored, len(gts))


def _slice_ap(gts: list[GroundTruth], dets: list[Detection],
              thresholds, method, iou_fn=None) -> float | None:
    """Mean AP over thresholds and categories with ground truth; None if
    the slice has no ground truth at all."""
    categories = sorted({g.category_id for g in gts})
    if not categories:
        return None
    per_thr = []
    for thr in thresholds:
        aps = []
        for c in categories:
            c_gts = [g for g in gts if g.category_id == c]
            c_dets = [d for d in dets if d.category_id == c]
            aps.append(_category_ap(c_gts, c_dets, thr, method, iou_fn))
        per_thr.append(sum(aps) / len(aps))
    return sum(per_thr) / len(per_thr)


def evaluate(gt_set: list[GroundTruth], det_set: list[Detection],
             method: IoUMethod = FOV,
             bands: tuple[tuple[float, float], ...] = DEFAULT_BANDS,
             size_buckets: dict[str, tuple[float, float]] | None = None,
             categories: list[int] | None = None,
             image_ids: list[int] | None = None) -> EvalReport:
    """Full report: AP, AP50, AP75, size buckets, latitude bands.

    ``categories``/``image_ids``, when given, are the known reference sets;
    a detection or ground truth pointing outside them raises ``ValueError``
    naming the offending id.
    """
    if size_buckets is None:
        size_buckets = DEFAULT_SIZE_BUCKETS
    if categories is not None:
        known = set(categories)
        for g in gt_set:
            if g.category_id not in known:
                raise ValueError(f"unknown category id {g.category_id} "
                                 f"in ground truth {g.id}")
        for d in det_set:
            if d.category_id not in known:
                raise ValueError(f"unknown category id {d.category_id} "
                                 "in detections")
    if image_ids is not None:
        known = set(image_ids)
        for g in gt_set:
            if g.image_id not in known:
                raise ValueError(f"unknown image id {g.image_id} "
                                 f"in ground truth {g.id}")
        for d in det_set:
            if d.image_id not in known:
                raise ValueError(f"unknown image id {d.image_id} in detections")

    ids = [g.id for g in gt_set]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate ground-truth ids")

    # One memoized IoU per box pair across the whole threshold/slice sweep;
    # boxes are frozen dataclasses, so value identity is safe as a key.
    cache: dict[tuple[FovBBox, FovBBox], float] = {}

    def cached_iou(g: FovBBox, d: FovBBox) -> float:
        key = (g, d)
        v = cache.get(key)
        if v is None:
            v = pair_iou(g, d, method)
            cache[key] = v
        return v

    ap = _slice_ap(gt_set, det_set, COCO_THRESHOLDS, method, cached_iou)
    ap50 = _slice_ap(gt_set, det_set, (0.50,), method, cached_iou)
    ap75 = _slice_ap(gt_set, det_set, (0.75,), method, cached_iou)

    def by_size(lo, hi):
        g = [x for x in gt_set if lo <= planar_area(x.bbox) < hi]
        d = [x for x in det_set if lo <= planar_area(x.bbox) < hi]
        return _slice_ap(g, d, COCO_THRESHOLDS, method, cached_iou)

    bucket_aps = {name: by_size(lo, hi)
                  for name, (lo, hi) in size_buckets.items()}

    band_aps: dict[str, float | None] = {}
    for lo, hi in bands:
        g = [x for x in gt_set if lo <= abs(x.bbox.lat) <= hi]
        d = [x for x in det_set if lo <= abs(x.bbox.lat) <= hi]
        band_aps[f"{lo:g}:{hi:g}"] = _slice_ap(g, d, COCO_THRESHOLDS, method,
                                               cached_iou)

    per_category: dict[int, float | None] = {}
    for c in sorted({g.category_id for g in gt_set}):
        g = [x for x in gt_set if x.category_id == c]
        d = [x for x in det_set if x.category_id == c]
        per_category[c] = _slice_ap(g, d, COCO_THRESHOLDS, method, cached_iou)

    return EvalReport(
        ap=ap, ap50=ap50, ap75=ap75,
        ap_small=bucket_aps.get("small"),
        ap_medium=bucket_aps.get("medium"),
        ap_large=bucket_aps.get("large"),
        band_aps=band_aps,
        per_category=per_category,
        n_ground_truths=len(gt_set),
        n_detections=len(det_set),
    )
