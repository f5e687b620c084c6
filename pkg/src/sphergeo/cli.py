"""Command-line interface.

Subcommands: ``iou`` (pairwise matrix as CSV), ``nms``, ``eval``,
``augment``, ``bench``, and ``loss``.  Exit codes: 0 success, 1 usage
error, 2 data error.  ``--threads`` (or the ``SPHERGEO_THREADS``
environment variable) caps internal parallelism; results are identical at
any setting.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from .augment import AugmentConfig, augment_dataset
from .dataio import (Annotation, DataError, DatasetFile, ImageInfo,
                     Prediction, PredictionFile, load_boxes, load_dataset,
                     load_image, load_predictions, save_dataset, save_image,
                     save_predictions)
from .evaluation import EvalReport, evaluate
from .iou import EXACT, FOV, SPH, IoUMethod, iou_matrix, monte_carlo
from .losses import fov_giou_loss, loss_gradient, sph_giou_loss
from .nms import nms

USAGE_ERROR = 1
DATA_ERROR = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; this tool reserves 2 for data errors.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _method_from_args(args) -> IoUMethod:
    name = args.method
    if name == "fov":
        return FOV
    if name == "sph":
        return SPH
    if name == "exact":
        return EXACT
    return monte_carlo(samples=args.samples, seed=args.seed)


def _add_method_flags(p: _Parser, default: str = "fov") -> None:
    p.add_argument("--method", choices=["fov", "sph", "exact", "mc"],
                   default=default, help="IoU method (default: %(default)s)")
    p.add_argument("--samples", type=int, default=1_000_000,
                   help="Monte-Carlo sample count (default: %(default)s)")
    p.add_argument("--seed", type=int, default=0,
                   help="random seed (default: %(default)s)")


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("SPHERGEO_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_iou(args) -> int:
    a = load_boxes(args.a)
    b = load_boxes(args.b)
    matrix = iou_matrix(a, b, _method_from_args(args), threads=_threads(args))
    prec = args.precision
    lines = [",".join(f"{v:.{prec}f}" if prec <= 9 else repr(float(v))
                      for v in row)
             for row in matrix.values]
    _write_or_print("\n".join(lines) + "\n", args.out)
    return 0


def cmd_nms(args) -> int:
    pf = load_predictions(args.det)
    dets = pf.detections()
    kept: list = []
    for image_id in sorted({d.image_id for d in dets}):
        per_image = [d for d in dets if d.image_id == image_id]
        kept.extend(nms(per_image, args.iou_thr, _method_from_args(args)))
    out = PredictionFile([Prediction(d.image_id, d.category_id, d.bbox, d.score)
                          for d in kept])
    save_predictions(out, args.out)
    print(f"kept {len(kept)} of {len(dets)} detections")
    return 0


def _band(text: str) -> tuple[float, float]:
    lo, _, hi = text.partition(":")
    try:
        return float(lo), float(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"band {text!r} is not LO:HI")


def _format_report(report: EvalReport) -> str:
    def cell(v):
        return "no ground truth" if v is None else f"{v:.4f}"

    rows = [("AP", report.ap), ("AP50", report.ap50), ("AP75", report.ap75),
            ("AP_s", report.ap_small), ("AP_m", report.ap_medium),
            ("AP_l", report.ap_large)]
    rows += [(f"AP[{k}]", v) for k, v in report.band_aps.items()]
    width = max(len(r[0]) for r in rows)
    lines = [f"{name:<{width}}  {cell(value)}" for name, value in rows]
    lines.append(f"{'#gt':<{width}}  {report.n_ground_truths}")
    lines.append(f"{'#det':<{width}}  {report.n_detections}")
    return "\n".join(lines) + "\n"


def cmd_eval(args) -> int:
    ds = load_dataset(args.gt)
    pf = load_predictions(args.det)
    bands = tuple(args.lat_band) if args.lat_band else ((50.0, 90.0),)
    report = evaluate(
        ds.ground_truths(), pf.detections(),
        method=_method_from_args(args), bands=bands,
        categories=[c.id for c in ds.categories],
        image_ids=[i.id for i in ds.images],
    )
    text = _format_report(report)
    sys.stdout.write(text)
    if args.out:
        Path(args.out).write_text(json.dumps(report.to_dict(), indent=2) + "\n",
                                  encoding="utf-8")
    return 0


def cmd_augment(args) -> int:
    ds = load_dataset(args.ann)
    images_dir = Path(args.images)
    images = {}
    names = {}
    for info in ds.images:
        path = images_dir / info.file_name
        if not path.exists():
            raise DataError(f"missing image file {path}")
        images[info.id] = load_image(path)
        names[info.id] = info.file_name

    cfg = AugmentConfig(pitch_range=(-args.pitch_max, args.pitch_max),
                        fraction=args.fraction, seed=args.seed)
    ann_tuples = [(a.id, a.image_id, a.category_id, a.bbox)
                  for a in ds.annotations]
    result = augment_dataset(images, ann_tuples, cfg, image_names=names)

    out_dir = Path(args.out)
    out_images = out_dir / "images"
    out_images.mkdir(parents=True, exist_ok=True)
    for info in ds.images:
        save_image(images[info.id], out_images / info.file_name)
    new_infos = []
    for new_id in sorted(result.images):
        img = result.images[new_id]
        name = result.image_names[new_id]
        save_image(img, out_images / name)
        new_infos.append(ImageInfo(new_id, name, img.width, img.height))

    merged = DatasetFile(
        images=list(ds.images) + new_infos,
        categories=list(ds.categories),
        annotations=[Annotation(i, im, c, b)
                     for i, im, c, b in result.annotations],
    )
    save_dataset(merged, out_dir / "annotations.json")
    print(f"images: {len(merged.images)} ({len(new_infos)} new); "
          f"dropped boxes: {result.dropped_boxes}")
    return 0


def cmd_bench(args) -> int:
    results = bench_mod.run_bench(["sph", "fov", "exact"], args.n, args.seed,
                                  warmup_fraction=args.warmup)
    by_name = {r.method: r for r in results}
    print("method,n_calls,mean_ns,p50_ns,p95_ns,pairs_per_sec")
    for r in results:
        print(f"{r.method},{r.n_calls},{r.mean_ns:.1f},{r.p50_ns:.1f},"
              f"{r.p95_ns:.1f},{r.pairs_per_sec:.1f}")
    print(f"exact/fov mean ratio: "
          f"{by_name['exact'].mean_ns / by_name['fov'].mean_ns:.2f}")
    print(f"fov/sph mean ratio: "
          f"{by_name['fov'].mean_ns / by_name['sph'].mean_ns:.2f}")
    return 0


def cmd_loss(args) -> int:
    a = load_boxes(args.a)
    b = load_boxes(args.b)
    if len(a) != len(b):
        raise DataError(f"box lists differ in length: {len(a)} vs {len(b)}")
    rows = []
    for bg, bd in zip(a, b):
        loss = fov_giou_loss(bg, bd) if args.kind == "fov" \
            else sph_giou_loss(bg, bd)
        grad = loss_gradient(bg, bd, args.kind)
        rows.append({
            "value": loss.value,
            "iou_term": loss.iou_term,
            "enclosure_penalty": loss.enclosure_penalty,
            "gradient": list(grad.as_tuple()),
            "at_kink": grad.at_kink,
        })
    _write_or_print(json.dumps(rows, indent=2) + "\n", args.out)
    return 0


def build_parser() -> _Parser:
    from . import __version__

    parser = _Parser(prog="sphergeo",
                     description="FoV bounding-box geometry on the sphere")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("iou", help="pairwise IoU matrix as CSV")
    p.add_argument("--a", required=True, help="first box list (JSON)")
    p.add_argument("--b", required=True, help="second box list (JSON)")
    _add_method_flags(p)
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.add_argument("--precision", type=int, default=6,
                   help="decimal places; >9 switches to full repr "
                        "(default: %(default)s)")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(fn=cmd_iou)

    p = sub.add_parser("nms", help="per-image non-maximum suppression")
    p.add_argument("--det", required=True, help="prediction file")
    p.add_argument("--iou-thr", type=float, required=True)
    _add_method_flags(p)
    p.add_argument("--out", required=True, help="output prediction file")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(fn=cmd_nms)

    p = sub.add_parser("eval", help="COCO-style AP report")
    p.add_argument("--gt", required=True, help="dataset file")
    p.add_argument("--det", required=True, help="prediction file")
    _add_method_flags(p)
    p.add_argument("--lat-band", type=_band, action="append",
                   metavar="LO:HI", help="latitude band (repeatable; "
                   "default 50:90)")
    p.add_argument("--out", help="report JSON path")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("augment", help="randomized panorama augmentation")
    p.add_argument("--images", required=True, help="input image directory")
    p.add_argument("--ann", required=True, help="dataset file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--fraction", type=float, default=0.5)
    p.add_argument("--pitch-max", type=float, default=30.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_augment)

    p = sub.add_parser("bench", help="IoU kernel timing")
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--warmup", type=float, default=0.1)
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("loss", help="GIoU-style loss values and gradients")
    p.add_argument("--a", required=True, help="ground-truth box list (JSON)")
    p.add_argument("--b", required=True, help="detected box list (JSON)")
    p.add_argument("--kind", choices=["fov", "sph"], default="fov")
    p.add_argument("--out", help="output JSON path (default: stdout)")
    p.set_defaults(fn=cmd_loss)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.fn(args)
    except DataError as e:
        print(f"sphergeo: {e}", file=sys.stderr)
        return DATA_ERROR
    except ValueError as e:
        print(f"sphergeo: {e}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
