import math

import numpy as np
import pytest

from sphergeo import FovBBox, SphPoint, Vec3


def random_unit_vec(rng) -> Vec3:
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    return Vec3(*v)


def random_point(rng) -> SphPoint:
    return SphPoint(rng.uniform(-180.0, 180.0),
                    math.degrees(math.asin(rng.uniform(-1.0, 1.0))))


def random_box(rng, lat_range=(-70.0, 70.0), fov_range=(10.0, 80.0),
               pole_ok=False) -> FovBBox:
    while True:
        b = FovBBox(rng.uniform(-180.0, 180.0),
                    rng.uniform(*lat_range),
                    rng.uniform(*fov_range),
                    rng.uniform(*fov_range))
        if pole_ok or not b.pole_adjacent():
            return b


def overlapping_pair(rng, lat_range=(-70.0, 70.0), fov_range=(15.0, 60.0)):
    """A non-pole-adjacent pair with genuinely overlapping regions."""
    from sphergeo import exact_iou

    while True:
        a = random_box(rng, lat_range, fov_range)
        b = FovBBox(
            a.lon + rng.uniform(-0.4, 0.4) * a.fov_h,
            float(np.clip(a.lat + rng.uniform(-0.4, 0.4) * a.fov_v,
                          lat_range[0], lat_range[1])),
            float(np.clip(a.fov_h * rng.uniform(0.7, 1.3), 5.0, 100.0)),
            float(np.clip(a.fov_v * rng.uniform(0.7, 1.3), 5.0, 100.0)),
        )
        if b.pole_adjacent():
            continue
        if exact_iou(a, b) > 0.05:
            return a, b


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    mse = np.mean((a.astype(np.float64) - b.astype(np.float64)) ** 2)
    if mse == 0:
        return math.inf
    return 10.0 * math.log10(255.0 ** 2 / mse)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
