import math

import numpy as np
import pytest

from sphergeo import (AugmentConfig, ErpImage, FovBBox, RotationSpec,
                      SphPoint, augment_dataset, cart_to_sph, contains,
                      fov_iou, local_roll_angle, remap_erp, sph_to_cart,
                      sph_to_erp_pixel, transform_bbox)
from sphergeo.augment import POLE_DROP_MARGIN, _east, _north
from sphergeo.sphere import Vec3, apply_rotation

from conftest import psnr


def smooth_test_image(h=256, w=512, channels=3, seed=3):
    """Low-frequency synthetic panorama; smooth enough for resampling."""
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:h, 0:w]
    img = np.zeros((h, w, channels))
    for c in range(channels):
        acc = np.zeros((h, w))
        for _ in range(6):
            fx, fy = rng.uniform(0.5, 3.0, 2)
            px, py = rng.uniform(0, 2 * np.pi, 2)
            acc += rng.uniform(0.3, 1.0) * np.sin(
                2 * np.pi * fx * xx / w + px) * np.cos(2 * np.pi * fy * yy / h + py)
        acc = (acc - acc.min()) / (np.ptp(acc) + 1e-9)
        img[:, :, c] = acc * 255.0
    return ErpImage(np.rint(img).astype(np.uint8))


def fd_roll(center, spec, eps=1e-5):
    """Finite-difference bearing oracle for the local roll angle."""
    c = sph_to_cart(center)
    e = _east(center)
    q = Vec3(c.x + eps * e.x, c.y + eps * e.y, c.z + eps * e.z).normalized()
    rc, rq = apply_rotation(c, spec), apply_rotation(q, spec)
    rcs = cart_to_sph(rc)
    d = Vec3(rq.x - rc.x, rq.y - rc.y, rq.z - rc.z)
    k = d.dot(rc)
    t = Vec3(d.x - k * rc.x, d.y - k * rc.y, d.z - k * rc.z).normalized()
    return math.degrees(math.atan2(t.dot(_north(rcs)), t.dot(_east(rcs))))


class TestErpImage:
    def test_aspect_enforced(self):
        with pytest.raises(ValueError):
            ErpImage(np.zeros((32, 65), dtype=np.uint8))

    def test_dtype_enforced(self):
        with pytest.raises(ValueError):
            ErpImage(np.zeros((32, 64), dtype=np.float32))

    def test_channel_handling(self):
        gray = ErpImage(np.zeros((32, 64), dtype=np.uint8))
        assert gray.channels == 1
        rgb = ErpImage(np.zeros((32, 64, 3), dtype=np.uint8))
        assert rgb.channels == 3


class TestRemap:
    def test_identity_is_bit_exact(self):
        img = smooth_test_image(64, 128)
        out = remap_erp(img, RotationSpec(0.0, 0.0))
        assert np.array_equal(out.pixels, img.pixels)

    def test_yaw_quarter_turn_shifts_columns(self):
        w, h = 64, 32
        stripes = np.zeros((h, w), dtype=np.uint8)
        stripes[:, ::4] = 255
        img = ErpImage(stripes)
        out = remap_erp(img, RotationSpec(90.0, 0.0))
        assert np.array_equal(out.pixels, np.roll(stripes, -w // 4, axis=1))

    def test_round_trip_interior_psnr(self):
        img = smooth_test_image()
        spec = RotationSpec(123.0, 24.0)
        back = remap_erp(remap_erp(img, spec), spec, inverse=True)
        h = img.height
        interior = slice(h // 6, h - h // 6)  # keep |lat| <= 60 deg
        value = psnr(img.pixels[interior], back.pixels[interior])
        assert value >= 30.0, value


class TestLocalRoll:
    def test_yaw_only_has_no_roll(self, rng):
        for _ in range(25):
            center = SphPoint(rng.uniform(-180, 180), rng.uniform(-80, 80))
            r = local_roll_angle(center, RotationSpec(rng.uniform(0, 360), 0.0))
            assert abs(r.delta) < 1e-9

    def test_central_meridian_pitch_has_no_roll(self):
        r = local_roll_angle(SphPoint(0.0, 35.0), RotationSpec(0.0, 20.0))
        assert abs(r.delta) < 1e-9

    def test_pitch_axis_point_rolls_by_full_pitch(self):
        # The pitch axis pierces the sphere at (lon +-90, lat 0); content
        # there spins in place by the whole pitch angle.
        r = local_roll_angle(SphPoint(90.0, 0.0), RotationSpec(0.0, 25.0))
        assert abs(r.delta + 25.0) < 1e-9

    def test_grid_against_bearing_oracle(self):
        # lat 57 instead of 60 so no grid point lands exactly on the pole
        spec = RotationSpec(0.0, 30.0)
        for lon in (-140.0, -70.0, 0.0, 70.0, 140.0):
            for lat in (-60.0, -30.0, 0.0, 30.0, 57.0):
                got = local_roll_angle(SphPoint(lon, lat), spec).delta
                want = fd_roll(SphPoint(lon, lat), spec)
                assert abs(got - want) < 0.1

    def test_pole_destination_rejected(self):
        with pytest.raises(ValueError):
            local_roll_angle(SphPoint(0.0, 60.0), RotationSpec(0.0, 30.0))


class TestTransformBbox:
    def test_yaw_only_shifts_longitude(self, rng):
        for _ in range(25):
            b = FovBBox(rng.uniform(-180, 180), rng.uniform(-60, 60),
                        rng.uniform(10, 60), rng.uniform(10, 60))
            yaw = rng.uniform(0, 360)
            out = transform_bbox(b, RotationSpec(yaw, 0.0))
            from sphergeo import wrap_lon
            assert abs(wrap_lon(out.lon - (b.lon - yaw))) < 1e-9
            assert abs(out.lat - b.lat) < 1e-9
            assert out.fov_h == b.fov_h and out.fov_v == b.fov_v

    def test_quarter_roll_swaps_fovs(self):
        # At the pitch axis point a 90-degree pitch rolls by 90 degrees,
        # which swaps the FoVs per the enclosure formula.
        b = FovBBox(90.0, 0.0, 30.0, 50.0)
        out = transform_bbox(b, RotationSpec(0.0, 90.0))
        assert abs(out.fov_h - 50.0) < 1e-9
        assert abs(out.fov_v - 30.0) < 1e-9

    def test_central_meridian_pitch_moves_center_only(self):
        out = transform_bbox(FovBBox(0, 0, 30, 40), RotationSpec(0.0, 20.0))
        assert abs(out.lon) < 1e-9 and abs(out.lat - 20.0) < 1e-9
        assert out.fov_h == 30.0 and out.fov_v == 40.0

    def test_transformed_center_stays_inside(self, rng):
        for _ in range(50):
            b = FovBBox(rng.uniform(-180, 180), rng.uniform(-50, 50),
                        rng.uniform(15, 50), rng.uniform(15, 50))
            spec = RotationSpec(rng.uniform(0, 360), rng.uniform(-30, 30))
            out = transform_bbox(b, spec)
            moved = cart_to_sph(apply_rotation(sph_to_cart(b.center), spec))
            assert contains(out, moved)

    def test_near_pole_results_remain_valid(self, rng):
        # Adversarial: centers pushed close to the pole with large rolls.
        for _ in range(100):
            b = FovBBox(rng.uniform(-180, 180), rng.uniform(55, 70),
                        rng.uniform(20, 120), rng.uniform(10, 35))
            spec = RotationSpec(rng.uniform(0, 360), rng.uniform(-30, 30))
            moved = apply_rotation(sph_to_cart(b.center), spec)
            lat = math.degrees(math.asin(max(-1.0, min(1.0, moved.y))))
            if abs(lat) > 90.0 - POLE_DROP_MARGIN:
                continue
            out = transform_bbox(b, spec)
            assert 0.0 < out.fov_h < 180.0 and 0.0 < out.fov_v < 180.0

    def test_yaw_only_preserves_pairwise_iou(self, rng):
        from conftest import random_box

        boxes = [random_box(rng) for _ in range(6)]
        spec = RotationSpec(137.0, 0.0)
        moved = [transform_bbox(b, spec) for b in boxes]
        for i in range(6):
            for j in range(6):
                assert abs(fov_iou(boxes[i], boxes[j])
                           - fov_iou(moved[i], moved[j])) < 1e-12


class TestBoxImageConsistency:
    def test_center_marker_follows_box(self):
        # Paint a small marker at a box center, remap the image, and check
        # the marker lands within one pixel of the transformed center.
        h, w = 128, 256
        for lon, lat, spec in [
            (40.0, 30.0, RotationSpec(70.0, 20.0)),
            (-100.0, -45.0, RotationSpec(200.0, -25.0)),
            (10.0, 60.0, RotationSpec(330.0, 15.0)),
        ]:
            canvas = np.zeros((h, w), dtype=np.uint8)
            u, v = sph_to_erp_pixel(SphPoint(lon, lat), w, h)
            ui, vi = int(round(u)), int(round(v))
            canvas[max(0, vi - 1):vi + 2, max(0, ui - 1):ui + 2] = 255
            out = remap_erp(ErpImage(canvas), spec)

            box = FovBBox(lon, lat, 20, 20)
            moved = transform_bbox(box, spec)
            mu, mv = sph_to_erp_pixel(SphPoint(moved.lon, moved.lat), w, h)

            ys, xs = np.nonzero(out.pixels > 64)
            assert len(xs) > 0
            du = np.abs((xs - mu + w / 2) % w - w / 2)
            assert np.min(np.hypot(du, ys - mv)) <= 1.5


class TestAugmentDataset:
    def _tiny_dataset(self, n_images=4, seed=9):
        rng = np.random.default_rng(seed)
        images = {}
        annotations = []
        ann_id = 1
        for img_id in range(1, n_images + 1):
            images[img_id] = smooth_test_image(32, 64, channels=1,
                                               seed=seed + img_id)
            for _ in range(2):
                annotations.append(
                    (ann_id, img_id, int(rng.integers(1, 3)),
                     FovBBox(rng.uniform(-180, 180), rng.uniform(-45, 45),
                             rng.uniform(15, 40), rng.uniform(15, 40))))
                ann_id += 1
        return images, annotations

    def test_fraction_zero_is_identity(self):
        images, anns = self._tiny_dataset()
        out = augment_dataset(images, anns, AugmentConfig(fraction=0.0, seed=1))
        assert out.images == {}
        assert out.annotations == anns
        assert out.dropped_boxes == 0

    def test_fraction_half_adds_ceil(self):
        images, anns = self._tiny_dataset(n_images=10)
        out = augment_dataset(images, anns, AugmentConfig(fraction=0.5, seed=1))
        assert len(out.images) == 5
        assert len(set(out.images) & set(images)) == 0

    def test_deterministic_under_seed(self):
        images, anns = self._tiny_dataset()
        a = augment_dataset(images, anns, AugmentConfig(fraction=0.75, seed=5))
        b = augment_dataset(images, anns, AugmentConfig(fraction=0.75, seed=5))
        assert a.annotations == b.annotations
        assert a.specs == b.specs
        assert all(np.array_equal(a.images[k].pixels, b.images[k].pixels)
                   for k in a.images)

    def test_missing_image_rejected(self):
        images, anns = self._tiny_dataset()
        anns.append((99, 42, 1, FovBBox(0, 0, 10, 10)))
        with pytest.raises(ValueError, match="missing image 42"):
            augment_dataset(images, anns, AugmentConfig(seed=1))

    def test_pole_drops_counted(self):
        img = smooth_test_image(32, 64, channels=1)
        # Center at high latitude, forced pitch pushing it onto the pole.
        anns = [(1, 1, 1, FovBBox(0.0, 65.0, 20, 20))]
        cfg = AugmentConfig(yaw_range=(0.0, 0.0), pitch_range=(25.0, 25.3),
                            fraction=1.0, seed=2)
        out = augment_dataset({1: img}, anns, cfg)
        new_lat = 65.0 + out.specs[2].pitch
        if abs(new_lat) > 90.0 - POLE_DROP_MARGIN:
            assert out.dropped_boxes == 1
        else:
            assert out.dropped_boxes == 0

    def test_config_validation(self):
        with pytest.raises(ValueError):
            AugmentConfig(pitch_range=(-120.0, 0.0))
        with pytest.raises(ValueError):
            AugmentConfig(fraction=1.5)
