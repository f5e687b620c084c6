"""Generate the shared parity fixture for the binding tests.

Computes expected values through the core Python API directly (not the
CLI), so the test suite proves the whole CLI round trip is lossless.
Output goes to tests/fixture.json next to the test files.

Usage: python3 scripts/make_fixture.py
"""

import json
from pathlib import Path

import numpy as np

import sphergeo
from sphergeo import (Detection, FovBBox, fov_giou_loss, fov_iou, iou_matrix,
                      loss_gradient, nms, sph_iou)
from sphergeo.iou import FOV, SPH


def random_boxes(rng, n):
    out = []
    for _ in range(n):
        out.append([
            float(rng.uniform(-180.0, 180.0)),
            float(rng.uniform(-75.0, 75.0)),
            float(rng.uniform(5.0, 100.0)),
            float(rng.uniform(5.0, 100.0)),
        ])
    return out


def main():
    rng = np.random.default_rng(31337)
    # Reference pair first, then 100 seeded random pairs.
    pairs_a = [[30.0, 60.0, 60.0, 60.0]] + random_boxes(rng, 100)
    pairs_b = [[60.0, 60.0, 60.0, 60.0]] + [
        [a[0] + float(rng.uniform(-30.0, 30.0)),
         float(np.clip(a[1] + rng.uniform(-20.0, 20.0), -75.0, 75.0)),
         float(rng.uniform(5.0, 100.0)),
         float(rng.uniform(5.0, 100.0))]
        for a in pairs_a[1:]
    ]

    boxes_a = [FovBBox(*row) for row in pairs_a]
    boxes_b = [FovBBox(*row) for row in pairs_b]

    losses = [fov_giou_loss(a, b) for a, b in zip(boxes_a, boxes_b)]
    grads = [loss_gradient(a, b, "fov") for a, b in zip(boxes_a, boxes_b)]

    block_a, block_b = boxes_a[:8], boxes_b[:8]

    nms_boxes = random_boxes(rng, 24)
    nms_scores = [round(float(rng.uniform()), 6) for _ in nms_boxes]
    dets = [Detection(FovBBox(*b), s, 1, 1)
            for b, s in zip(nms_boxes, nms_scores)]
    kept = nms(dets, 0.35)
    kept_indices = [next(i for i, d in enumerate(dets) if d is k)
                    for k in kept]

    fixture = {
        "core_version": sphergeo.__version__,
        "pairs_a": pairs_a,
        "pairs_b": pairs_b,
        "fov_iou": [fov_iou(a, b) for a, b in zip(boxes_a, boxes_b)],
        "sph_iou": [sph_iou(a, b) for a, b in zip(boxes_a, boxes_b)],
        "fov_matrix_8x8": [list(r) for r in
                           iou_matrix(block_a, block_b, FOV).values],
        "sph_matrix_8x8": [list(r) for r in
                           iou_matrix(block_a, block_b, SPH).values],
        "loss_values": [v.value for v in losses],
        "loss_iou_terms": [v.iou_term for v in losses],
        "loss_penalties": [v.enclosure_penalty for v in losses],
        "loss_gradients": [list(g.as_tuple()) for g in grads],
        "loss_at_kink": [g.at_kink for g in grads],
        "nms_boxes": nms_boxes,
        "nms_scores": nms_scores,
        "nms_threshold": 0.35,
        "nms_kept_indices": kept_indices,
    }
    out = Path(__file__).resolve().parent.parent / "tests" / "fixture.json"
    out.write_text(json.dumps(fixture, indent=1) + "\n", encoding="utf-8")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
