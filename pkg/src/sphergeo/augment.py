"""Spherically consistent augmentation of ERP images and their boxes.

An augmentation is a random yaw (horizontal translation of the panorama)
followed by a bounded random pitch.  Images are resampled by inverse
mapping with bilinear interpolation (horizontal wrap, vertical clamp);
boxes are moved by rotating their center and resized by the local roll
angle the rotation induces in the tangent plane at the new center.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bfov import FovBBox
from .sphere import (RotationSpec, SphPoint, Vec3, apply_rotation, cart_to_sph,
                     pitch_matrix, sph_to_cart, yaw_matrix)

__all__ = ["ErpImage", "AugmentConfig", "RollAngle", "remap_erp",
           "local_roll_angle", "transform_bbox", "augment_dataset",
           "AugmentResult"]

# Boxes whose transformed center gets this close to a pole are dropped
# (the roll angle is undefined at the pole itself).
POLE_DROP_MARGIN = 0.5
# Resized FoVs are clamped into the open (0, 180) interval by this margin.
_FOV_CLAMP = 1e-6


@dataclass(frozen=True)
class ErpImage:
    """An 8-bit equirectangular raster, strictly 2:1, 1 or 3 channels."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.dtype != np.uint8:
            raise ValueError("ERP pixels must be uint8")
        if px.ndim == 2:
            pass
        elif px.ndim == 3 and px.shape[2] in (1, 3):
            if px.shape[2] == 1:
                px = px[:, :, 0]
        else:
            raise ValueError(f"unsupported pixel shape {px.shape}")
        h, w = px.shape[:2]
        if w != 2 * h:
            raise ValueError(f"ERP image must be 2:1, got {w}x{h}")
        px = px.copy()
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def channels(self) -> int:
        return 1 if self.pixels.ndim == 2 else self.pixels.shape[2]


@dataclass(frozen=True)
class AugmentConfig:
    """Randomized-augmentation parameters; deterministic under ``seed``."""

    yaw_range: tuple[float, float] = (0.0, 360.0)
    pitch_range: tuple[float, float] = (-30.0, 30.0)
    fraction: float = 0.5
    seed: int = 0

    def __post_init__(self):
        lo, hi = self.pitch_range
        if not (-90.0 <= lo <= hi <= 90.0):
            raise ValueError(f"pitch range {self.pitch_range} not within [-90, 90]")
        ylo, yhi = self.yaw_range
        if not (0.0 <= ylo <= yhi <= 360.0):
            raise ValueError(f"yaw range {self.yaw_range} not within [0, 360]")
        if not 0.0 <= self.fraction <= 1.0:
            raise ValueError(f"fraction {self.fraction} outside [0, 1]")


@dataclass(frozen=True)
class RollAngle:
    """Signed in-plane rotation at a point, degrees, |delta| <= 180."""

    delta: float

    def __post_init__(self):
        if abs(self.delta) > 180.0:
            raise ValueError(f"roll angle {self.delta} outside [-180, 180]")


def _rotation_matrix(spec: RotationSpec) -> np.ndarray:
    return pitch_matrix(spec.pitch) @ yaw_matrix(spec.yaw)


def remap_erp(img: ErpImage, spec: RotationSpec, inverse: bool = False) -> ErpImage:
    """Resample an ERP image under the rotation (or, with ``inverse``, undo it).

    Inverse mapping: each output pixel center is carried back through the
    rotation to a continuous source position, sampled bilinearly with
    horizontal wraparound and vertical clamping.  The identity rotation
    returns the input unchanged.
    """
    if spec.yaw == 0.0 and spec.pitch == 0.0:
        return ErpImage(img.pixels)
    h, w = img.height, img.width
    rot = _rotation_matrix(spec)
    back = rot if inverse else rot.T  # output direction -> source direction

    lon = np.radians((np.arange(w) + 0.5) / w * 360.0 - 180.0)
    lat = np.radians(90.0 - (np.arange(h) + 0.5) / h * 180.0)
    lon, lat = np.meshgrid(lon, lat)
    clat = np.cos(lat)
    dirs = np.stack((np.sin(lon) * clat, np.sin(lat), np.cos(lon) * clat), axis=-1)
    src = dirs @ back.T

    src_lon = np.degrees(np.arctan2(src[..., 0], src[..., 2]))
    src_lat = np.degrees(np.arcsin(np.clip(src[..., 1], -1.0, 1.0)))
    u = (src_lon + 180.0) / 360.0 * w - 0.5
    v = np.clip((90.0 - src_lat) / 180.0 * h - 0.5, 0.0, h - 1.0)

    u0 = np.floor(u).astype(np.int64)
    v0 = np.floor(v).astype(np.int64)
    fu = u - u0
    fv = v - v0
    u0 %= w
    u1 = (u0 + 1) % w
    v1 = np.minimum(v0 + 1, h - 1)

    px = img.pixels.astype(np.float64)
    if px.ndim == 2:
        px = px[:, :, None]
    out = (px[v0, u0] * ((1 - fu) * (1 - fv))[..., None]
           + px[v0, u1] * (fu * (1 - fv))[..., None]
           + px[v1, u0] * ((1 - fu) * fv)[..., None]
           + px[v1, u1] * (fu * fv)[..., None])
    out = np.clip(np.rint(out), 0, 255).astype(np.uint8)
    if img.channels == 1:
        out = out[:, :, 0]
    return ErpImage(out)


def _east(p: SphPoint) -> Vec3:
    lon = math.radians(p.lon)
    return Vec3(math.cos(lon), 0.0, -math.sin(lon))


def _north(p: SphPoint) -> Vec3:
    lon = math.radians(p.lon)
    lat = math.radians(p.lat)
    return Vec3(-math.sin(lon) * math.sin(lat), math.cos(lat),
                -math.cos(lon) * math.sin(lat))


def local_roll_angle(center: SphPoint, spec: RotationSpec) -> RollAngle:
    """In-plane rotation the transform induces at a point, degrees.

    Measured as the signed angle between the transported east direction and
    the east direction at the transformed point, positive toward local
    north.  Undefined (raises ``ValueError``) when the transformed point
    lands on a pole.
    """
    if spec.pitch == 0.0:
        return RollAngle(0.0)  # yaw maps east vectors to east vectors
    moved = apply_rotation(sph_to_cart(center), spec)
    if math.hypot(moved.x, moved.z) < 1e-12:
        raise ValueError("transformed center is at a pole; roll is undefined")
    moved_sph = cart_to_sph(moved)
    transported = apply_rotation(_east(center), spec)
    cos_d = transported.dot(_east(moved_sph))
    sin_d = transported.dot(_north(moved_sph))
    return RollAngle(math.degrees(math.atan2(sin_d, cos_d)))


def transform_bbox(b: FovBBox, spec: RotationSpec) -> FovBBox:
    """Carry a box through the rotation: move center, resize by the roll.

    The tightest axis-aligned enclosure of the rotated rectangle gives the
    new FoVs: ``(a', b') = (a cos|d| + b sin|d|, a sin|d| + b cos|d|)``,
    clamped into (0, 180).
    """
    moved = apply_rotation(sph_to_cart(b.center), spec)
    if math.hypot(moved.x, moved.z) < 1e-12:
        raise ValueError("transformed box center is at a pole")
    center = cart_to_sph(moved)
    d = math.radians(abs(local_roll_angle(b.center, spec).delta))
    c, s = math.cos(d), math.sin(d)
    fov_h = b.fov_h * c + b.fov_v * s
    fov_v = b.fov_h * s + b.fov_v * c
    fov_h = min(max(fov_h, _FOV_CLAMP), 180.0 - _FOV_CLAMP)
    fov_v = min(max(fov_v, _FOV_CLAMP), 180.0 - _FOV_CLAMP)
    return FovBBox(center.lon, center.lat, fov_h, fov_v)


@dataclass(frozen=True)
class AugmentResult:
    """Augmented dataset pieces produced by :func:`augment_dataset`."""

    images: dict[int, ErpImage]          # new image id -> remapped raster
    image_names: dict[int, str]          # new image id -> suggested file name
    source_ids: dict[int, int]           # new image id -> source image id
    specs: dict[int, RotationSpec]       # new image id -> rotation applied
    annotations: list[tuple[int, int, int, FovBBox]]  # (id, image, cat, box)
    dropped_boxes: int = 0


def augment_dataset(images: dict[int, ErpImage],
                    annotations: list[tuple[int, int, int, FovBBox]],
                    cfg: AugmentConfig,
                    image_names: dict[int, str] | None = None) -> AugmentResult:
    """Produce augmented copies of a fraction of the images.

    ``annotations`` rows are (annotation id, image id, category id, box).
    ``ceil(fraction * len(images))`` images are chosen without replacement
    under ``cfg.seed``; each gets a yaw/pitch drawn from a per-image
    substream, a remapped raster, and transformed copies of its boxes with
    fresh ids.  Boxes whose new center lies within ``POLE_DROP_MARGIN``
    degrees of a pole are dropped and counted.  Fully deterministic under
    the seed.
    """
    for ann_id, image_id, _, _ in annotations:
        if image_id not in images:
            raise ValueError(f"annotation {ann_id} references missing image "
                             f"{image_id}")
    ids = sorted(images)
    n_pick = math.ceil(cfg.fraction * len(ids))
    rng = np.random.default_rng(cfg.seed)
    picked = sorted(rng.choice(ids, size=n_pick, replace=False).tolist()) \
        if n_pick else []

    next_image_id = max(ids, default=0) + 1
    next_ann_id = max((a[0] for a in annotations), default=0) + 1

    out_images: dict[int, ErpImage] = {}
    out_names: dict[int, str] = {}
    out_sources: dict[int, int] = {}
    out_specs: dict[int, RotationSpec] = {}
    out_annotations = list(annotations)
    dropped = 0

    for src_id in picked:
        sub = np.random.default_rng([cfg.seed, src_id])
        yaw = float(sub.uniform(cfg.yaw_range[0], cfg.yaw_range[1])) % 360.0
        pitch = float(sub.uniform(cfg.pitch_range[0], cfg.pitch_range[1]))
        spec = RotationSpec(yaw, pitch)
        new_id = next_image_id
        next_image_id += 1
        out_images[new_id] = remap_erp(images[src_id], spec)
        out_sources[new_id] = src_id
        out_specs[new_id] = spec
        if image_names and src_id in image_names:
            stem = image_names[src_id].rsplit(".", 1)[0]
        else:
            stem = f"image_{src_id}"
        out_names[new_id] = f"{stem}__aug{new_id}.png"

        for _, image_id, category_id, box in annotations:
            if image_id != src_id:
                continue
            moved = apply_rotation(sph_to_cart(box.center), spec)
            new_lat = math.degrees(math.asin(min(1.0, max(-1.0, moved.y))))
            if abs(new_lat) > 90.0 - POLE_DROP_MARGIN:
                dropped += 1
                continue
            out_annotations.append(
                (next_ann_id, new_id, category_id, transform_bbox(box, spec)))
            next_ann_id += 1

    return AugmentResult(images=out_images, image_names=out_names,
                         source_ids=out_sources, specs=out_specs,
                         annotations=out_annotations, dropped_boxes=dropped)
