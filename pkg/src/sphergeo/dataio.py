"""Dataset, prediction, and image serialization.

Datasets are JSON with a ``"format": "bfov/1"`` header::

    {"format": "bfov/1",
     "images": [{"id": 1, "file_name": "a.png", "width": 1920, "height": 960}],
     "categories": [{"id": 1, "name": "chair"}],
     "annotations": [{"id": 1, "image_id": 1, "category_id": 1,
                      "bbox": [30.0, 60.0, 60.0, 60.0]}]}

``bbox`` is ``[center-lon, center-lat, fov-h, fov-v]`` in degrees, longitude
in ``[-180, 180)``.  Prediction files carry the same header and a
``"predictions"`` list of ``{image_id, category_id, bbox, score}`` rows.
Floats are written with ``repr`` so a save/load round trip is exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .augment import ErpImage
from .bfov import FovBBox
from .evaluation import GroundTruth
from .nms import Detection

__all__ = [
    "FORMAT_TAG",
    "DataError",
    "ParseError",
    "ValidationError",
    "ImageInfo",
    "Category",
    "Annotation",
    "DatasetFile",
    "Prediction",
    "PredictionFile",
    "load_dataset",
    "save_dataset",
    "load_predictions",
    "save_predictions",
    "load_boxes",
    "load_image",
    "save_image",
]

FORMAT_TAG = "bfov/1"


class DataError(Exception):
    """Base for all load/validation failures."""


class ParseError(DataError):
    """Malformed file syntax; message carries line/column when known."""


class ValidationError(DataError):
    """Well-formed file violating an invariant; names the offending record."""


@dataclass(frozen=True)
class ImageInfo:
    id: int
    file_name: str
    width: int
    height: int


@dataclass(frozen=True)
class Category:
    id: int
    name: str


@dataclass(frozen=True)
class Annotation:
    id: int
    image_id: int
    category_id: int
    bbox: FovBBox


@dataclass(frozen=True)
class DatasetFile:
    images: list[ImageInfo] = field(default_factory=list)
    categories: list[Category] = field(default_factory=list)
    annotations: list[Annotation] = field(default_factory=list)

    def ground_truths(self) -> list[GroundTruth]:
        return [GroundTruth(a.id, a.bbox, a.category_id, a.image_id)
                for a in self.annotations]


@dataclass(frozen=True)
class Prediction:
    image_id: int
    category_id: int
    bbox: FovBBox
    score: float


@dataclass(frozen=True)
class PredictionFile:
    predictions: list[Prediction] = field(default_factory=list)

    def detections(self) -> list[Detection]:
        return [Detection(p.bbox, p.score, p.category_id, p.image_id)
                for p in self.predictions]


def _read_json(path) -> object:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"{path}: {e}") from e
    except UnicodeDecodeError as e:
        raise ParseError(f"{path}: not valid UTF-8 ({e})") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(
            f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: "
            f"{e.msg}") from e


def _require(obj, key: str, kinds, where: str):
    if not isinstance(obj, dict):
        raise ValidationError(f"{where}: expected a JSON object")
    if key not in obj:
        raise ValidationError(f"{where}: missing field {key!r}")
    value = obj[key]
    if not isinstance(value, kinds) or isinstance(value, bool):
        raise ValidationError(f"{where}: field {key!r} has wrong type")
    return value


def _record_id(rec) -> object:
    return rec.get("id") if isinstance(rec, dict) else None


def _parse_bbox(raw, where: str) -> FovBBox:
    if (not isinstance(raw, list) or len(raw) != 4
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool)
                       for x in raw)):
        raise ValidationError(f"{where}: bbox must be 4 numbers "
                              "[lon, lat, fov_h, fov_v]")
    try:
        return FovBBox(*[float(x) for x in raw])
    except ValueError as e:
        raise ValidationError(f"{where}: invalid bbox: {e}") from e


def load_dataset(path) -> DatasetFile:
    """Load and validate a dataset file; see the module docstring."""
    raw = _read_json(path)
    if not isinstance(raw, dict):
        raise ValidationError(f"{path}: dataset file must be a JSON object")
    if raw.get("format") != FORMAT_TAG:
        raise ValidationError(f"{path}: expected format {FORMAT_TAG!r}, "
                              f"got {raw.get('format')!r}")

    images = []
    seen_img: set[int] = set()
    for rec in _require(raw, "images", list, str(path)):
        where = f"{path}: image {_record_id(rec)!r}"
        img = ImageInfo(
            id=_require(rec, "id", int, where),
            file_name=_require(rec, "file_name", str, where),
            width=_require(rec, "width", int, where),
            height=_require(rec, "height", int, where),
        )
        if img.width != 2 * img.height:
            raise ValidationError(f"{where}: image must be 2:1, got "
                                  f"{img.width}x{img.height}")
        if img.id in seen_img:
            raise ValidationError(f"{where}: duplicate image id")
        seen_img.add(img.id)
        images.append(img)

    categories = []
    seen_cat: set[int] = set()
    for rec in _require(raw, "categories", list, str(path)):
        where = f"{path}: category {_record_id(rec)!r}"
        cat = Category(id=_require(rec, "id", int, where),
                       name=_require(rec, "name", str, where))
        if cat.id in seen_cat:
            raise ValidationError(f"{where}: duplicate category id")
        seen_cat.add(cat.id)
        categories.append(cat)

    annotations = []
    seen_ann: set[int] = set()
    for rec in _require(raw, "annotations", list, str(path)):
        where = f"{path}: annotation {_record_id(rec)!r}"
        ann = Annotation(
            id=_require(rec, "id", int, where),
            image_id=_require(rec, "image_id", int, where),
            category_id=_require(rec, "category_id", int, where),
            bbox=_parse_bbox(_require(rec, "bbox", list, where), where),
        )
        if ann.id in seen_ann:
            raise ValidationError(f"{where}: duplicate annotation id")
        if ann.image_id not in seen_img:
            raise ValidationError(f"{where}: unknown image_id {ann.image_id}")
        if ann.category_id not in seen_cat:
            raise ValidationError(f"{where}: unknown category_id "
                                  f"{ann.category_id}")
        seen_ann.add(ann.id)
        annotations.append(ann)

    return DatasetFile(images, categories, annotations)


def save_dataset(ds: DatasetFile, path) -> None:
    doc = {
        "format": FORMAT_TAG,
        "images": [{"id": i.id, "file_name": i.file_name,
                    "width": i.width, "height": i.height} for i in ds.images],
        "categories": [{"id": c.id, "name": c.name} for c in ds.categories],
        "annotations": [{"id": a.id, "image_id": a.image_id,
                         "category_id": a.category_id,
                         "bbox": [a.bbox.lon, a.bbox.lat,
                                  a.bbox.fov_h, a.bbox.fov_v]}
                        for a in ds.annotations],
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_predictions(path) -> PredictionFile:
    """Load and validate a prediction file."""
    raw = _read_json(path)
    if not isinstance(raw, dict):
        raise ValidationError(f"{path}: prediction file must be a JSON object")
    if raw.get("format") != FORMAT_TAG:
        raise ValidationError(f"{path}: expected format {FORMAT_TAG!r}, "
                              f"got {raw.get('format')!r}")
    predictions = []
    for k, rec in enumerate(_require(raw, "predictions", list, str(path))):
        where = f"{path}: prediction #{k}"
        score = _require(rec, "score", (int, float), where)
        if not 0.0 <= score <= 1.0:
            raise ValidationError(f"{where}: score {score} outside [0, 1]")
        predictions.append(Prediction(
            image_id=_require(rec, "image_id", int, where),
            category_id=_require(rec, "category_id", int, where),
            bbox=_parse_bbox(_require(rec, "bbox", list, where), where),
            score=float(score),
        ))
    return PredictionFile(predictions)


def save_predictions(pf: PredictionFile, path) -> None:
    doc = {
        "format": FORMAT_TAG,
        "predictions": [{"image_id": p.image_id, "category_id": p.category_id,
                         "bbox": [p.bbox.lon, p.bbox.lat,
                                  p.bbox.fov_h, p.bbox.fov_v],
                         "score": p.score} for p in pf.predictions],
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_boxes(path) -> list[FovBBox]:
    """Load a box list: either a bare JSON array of [lon, lat, fov_h, fov_v]
    rows or a dataset file (whose annotation boxes are taken in order)."""
    raw = _read_json(path)
    if isinstance(raw, list):
        return [_parse_bbox(rec, f"{path}: box #{k}")
                for k, rec in enumerate(raw)]
    if isinstance(raw, dict) and "annotations" in raw:
        return [a.bbox for a in load_dataset(path).annotations]
    raise ValidationError(f"{path}: expected a box array or a dataset file")


def load_image(path) -> ErpImage:
    """Load a 2:1 PNG or JPEG as an 8-bit ERP image."""
    try:
        with Image.open(path) as im:
            if im.format not in ("PNG", "JPEG"):
                raise ValidationError(f"{path}: unsupported format {im.format}; "
                                      "only PNG and JPEG are supported")
            mode = "L" if im.mode in ("L", "1", "I;16") else "RGB"
            arr = np.asarray(im.convert(mode), dtype=np.uint8)
    except (OSError, Image.DecompressionBombError) as e:
        raise ParseError(f"{path}: cannot read image: {e}") from e
    try:
        return ErpImage(arr)
    except ValueError as e:
        raise ValidationError(f"{path}: {e}") from e


def save_image(img: ErpImage, path) -> None:
    """Write an ERP image; PNG is lossless, JPEG quality 95."""
    pil = Image.fromarray(img.pixels)
    suffix = Path(path).suffix.lower()
    if suffix in (".jpg", ".jpeg"):
        pil.save(path, quality=95)
    else:
        pil.save(path)
