import math

import numpy as np
import pytest

from sphergeo import (FovBBox, SphPoint, box_corners, box_frame, cart_to_sph,
                      contains, planar_area, segment_area, solid_angle,
                      sph_to_cart, spherical_polygon_area)
from sphergeo.bfov import contains_many
from sphergeo.sphere import Vec3

from conftest import random_box


class TestFovBBox:
    def test_field_validation(self):
        with pytest.raises(ValueError):
            FovBBox(0, 0, 0.0, 30)
        with pytest.raises(ValueError):
            FovBBox(0, 0, 30, 180.0)
        with pytest.raises(ValueError):
            FovBBox(0, 95, 30, 30)
        assert FovBBox(200.0, 0, 30, 30).lon == -160.0

    def test_pole_adjacent_predicate(self):
        assert FovBBox(0, 80, 30, 30).pole_adjacent()
        assert not FovBBox(0, 60, 30, 30).pole_adjacent()
        assert FovBBox(0, -78, 25, 46).pole_adjacent()


class TestBoxFrame:
    def test_identity_at_origin(self):
        m = box_frame(FovBBox(0, 0, 40, 40)).matrix
        assert np.allclose(m, np.eye(3), atol=1e-15)

    def test_center_maps_to_forward(self, rng):
        for _ in range(100):
            b = random_box(rng, lat_range=(-89, 89), pole_ok=True)
            v = box_frame(b).to_frame(sph_to_cart(b.center))
            assert abs(v.x) < 1e-12 and abs(v.y) < 1e-12 and abs(v.z - 1) < 1e-12

    def test_composition_against_rotation_vectors(self, rng):
        # The frame must act like undo-yaw followed by undo-pitch.
        from sphergeo import rotate_pitch, rotate_yaw
        from conftest import random_unit_vec

        for _ in range(100):
            b = random_box(rng, pole_ok=True)
            v = random_unit_vec(rng)
            got = box_frame(b).to_frame(v)
            want = rotate_pitch(rotate_yaw(v, b.lon), -b.lat)
            assert max(abs(got.x - want.x), abs(got.y - want.y),
                       abs(got.z - want.z)) < 1e-12


class TestContains:
    def test_center_inside(self, rng):
        for _ in range(50):
            b = random_box(rng, pole_ok=True)
            assert contains(b, b.center)

    def test_antipode_outside(self, rng):
        for _ in range(50):
            b = random_box(rng)
            anti = cart_to_sph(Vec3(*(-sph_to_cart(b.center).as_array())))
            assert not contains(b, anti)

    def test_boundary_point_counts_as_inside(self):
        b = FovBBox(25.0, 35.0, 50.0, 40.0)
        # Point at angular offset exactly fov_h/2 along the horizontal axis.
        t = math.tan(math.radians(b.fov_h / 2.0))
        edge = box_frame(b).from_frame(Vec3(t, 0.0, 1.0).normalized())
        assert contains(b, cart_to_sph(edge))

    def test_invariant_under_joint_yaw(self, rng):
        from conftest import random_point

        for _ in range(100):
            b = random_box(rng)
            p = random_point(rng)
            shift = rng.uniform(0, 360)
            b2 = FovBBox(b.lon + shift, b.lat, b.fov_h, b.fov_v)
            p2 = SphPoint(p.lon + shift, p.lat)
            assert contains(b, p) == contains(b2, p2)

    def test_vectorized_matches_scalar(self, rng):
        b = random_box(rng)
        pts = rng.normal(size=(500, 3))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        flags = contains_many(b, pts)
        for row, flag in zip(pts, flags):
            assert contains(b, cart_to_sph(Vec3(*row))) == bool(flag)


class TestBoxCorners:
    def test_symmetric_box_corners(self):
        got = box_corners(FovBBox(0, 0, 90, 90))
        want = {tuple(np.sign([sx, sy, 1.0]) / math.sqrt(3.0))
                for sx in (1, -1) for sy in (1, -1)}
        for c in got:
            key = min(want, key=lambda w: abs(w[0] - c.x) + abs(w[1] - c.y))
            assert abs(c.x - key[0]) < 1e-15
            assert abs(c.y - key[1]) < 1e-15
            assert abs(c.z - 1 / math.sqrt(3.0)) < 1e-15

    def test_corners_lie_on_their_box(self, rng):
        for _ in range(50):
            b = random_box(rng, pole_ok=True)
            for c in box_corners(b):
                assert contains(b, cart_to_sph(c))

    def test_corners_are_unit_vectors(self, rng):
        for _ in range(100):
            b = random_box(rng, pole_ok=True)
            for c in box_corners(b):
                assert abs(c.norm() - 1.0) < 1e-12

    def test_corners_invariant_under_joint_yaw(self, rng):
        from sphergeo import rotate_yaw

        for _ in range(50):
            b = random_box(rng)
            shift = rng.uniform(0, 360)
            b2 = FovBBox(b.lon + shift, b.lat, b.fov_h, b.fov_v)
            for c, c2 in zip(box_corners(b), box_corners(b2)):
                r = rotate_yaw(c, -shift)  # yaw by a shifts longitude by -a
                assert max(abs(r.x - c2.x), abs(r.y - c2.y), abs(r.z - c2.z)) < 1e-12


class TestAreas:
    def test_planar_area(self):
        assert planar_area(FovBBox(10, 20, 60, 60)) == 3600.0

    def test_segment_area(self):
        want = 2.0 * (math.pi / 3.0) * 0.5
        assert abs(segment_area(FovBBox(10, 20, 60, 60)) - want) < 1e-12

    def test_solid_angle_closed_form(self):
        b = FovBBox(0, 0, 60, 60)
        want = 4.0 * math.asin(math.sin(math.pi / 6) ** 2)
        assert abs(solid_angle(b) - want) < 1e-12

    def test_solid_angle_equals_corner_polygon_area(self, rng):
        for _ in range(50):
            b = random_box(rng, fov_range=(5.0, 170.0), pole_ok=True)
            area = spherical_polygon_area(box_corners(b))
            assert abs(area - solid_angle(b)) < 1e-9

    def test_solid_angle_against_monte_carlo(self, rng):
        # Membership-counting area estimate, N = 1e6 per box, 3 sigma band.
        n = 1_000_000
        for _ in range(50):
            b = random_box(rng, lat_range=(-85, 85), fov_range=(10, 120),
                           pole_ok=True)
            y = rng.uniform(-1.0, 1.0, n)
            lon = rng.uniform(-math.pi, math.pi, n)
            r = np.sqrt(1.0 - y * y)
            pts = np.column_stack((r * np.sin(lon), y, r * np.cos(lon)))
            p = np.count_nonzero(contains_many(b, pts)) / n
            est = 4.0 * math.pi * p
            sigma = 4.0 * math.pi * math.sqrt(p * (1.0 - p) / n)
            assert abs(est - solid_angle(b)) < 3.0 * sigma + 1e-4

    def test_solid_angle_against_monte_carlo_10m(self):
        # Single high-budget check of the closed form.
        b = FovBBox(0.0, 0.0, 60.0, 60.0)
        rng = np.random.default_rng(7)
        n = 10_000_000
        hits = 0
        for _ in range(10):
            y = rng.uniform(-1.0, 1.0, n // 10)
            lon = rng.uniform(-math.pi, math.pi, n // 10)
            r = np.sqrt(1.0 - y * y)
            pts = np.column_stack((r * np.sin(lon), y, r * np.cos(lon)))
            hits += int(np.count_nonzero(contains_many(b, pts)))
        p = hits / n
        est = 4.0 * math.pi * p
        sigma = 4.0 * math.pi * math.sqrt(p * (1.0 - p) / n)
        assert abs(est - solid_angle(b)) < 3.0 * sigma
