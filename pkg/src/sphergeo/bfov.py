"""Field-of-view bounding boxes and their realization on the sphere.

A box ``(lon, lat, fov_h, fov_v)`` is realized as the perspective rectangle
seen from the sphere center: in the frame whose forward axis is the box
center, a direction ``(x, y, z)`` is inside iff ``z > 0`` and
``|x/z| <= tan(fov_h/2)`` and ``|y/z| <= tan(fov_v/2)``.  All four box edges
then lie on great circles.  This realization degenerates at 180 degrees,
so fields of view must be strictly below that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sphere import SphPoint, Vec3, pitch_matrix, sph_to_cart, wrap_lon, yaw_matrix

__all__ = ["FovBBox", "BoxFrame", "box_frame", "contains", "box_corners",
           "planar_area", "segment_area", "solid_angle"]

# Relative slack on the boundary comparison so that points constructed to sit
# exactly on an edge still count as inside after rounding.
_BOUNDARY_EPS = 1e-12


@dataclass(frozen=True)
class FovBBox:
    """A spherical bounding box: center lon/lat and horizontal/vertical FoV.

    All fields are degrees.  ``fov_h`` and ``fov_v`` must lie strictly in
    ``(0, 180)``; the center longitude is normalized into ``[-180, 180)``.
    """

    lon: float
    lat: float
    fov_h: float
    fov_v: float

    def __post_init__(self):
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"latitude {self.lat} outside [-90, 90]")
        if not 0.0 < self.fov_h < 180.0:
            raise ValueError(f"fov_h {self.fov_h} outside (0, 180)")
        if not 0.0 < self.fov_v < 180.0:
            raise ValueError(f"fov_v {self.fov_v} outside (0, 180)")
        object.__setattr__(self, "lon", wrap_lon(float(self.lon)))
        object.__setattr__(self, "lat", float(self.lat))
        object.__setattr__(self, "fov_h", float(self.fov_h))
        object.__setattr__(self, "fov_v", float(self.fov_v))

    @property
    def center(self) -> SphPoint:
        return SphPoint(self.lon, self.lat)

    def pole_adjacent(self) -> bool:
        """True iff the vertical extent reaches past a pole."""
        return abs(self.lat) + self.fov_v / 2.0 > 90.0


@dataclass(frozen=True)
class BoxFrame:
    """Orthonormal world-to-frame transform; forward axis = box center."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def to_frame(self, v: Vec3) -> Vec3:
        x, y, z = self.matrix @ (v.x, v.y, v.z)
        return Vec3(x, y, z)

    def from_frame(self, v: Vec3) -> Vec3:
        x, y, z = self.matrix.T @ (v.x, v.y, v.z)
        return Vec3(x, y, z)

    def to_frame_many(self, points: np.ndarray) -> np.ndarray:
        """Transform an (n, 3) array of world vectors into the frame."""
        return points @ self.matrix.T


def box_frame(b: FovBBox) -> BoxFrame:
    """World-to-frame transform mapping the box center to (0, 0, 1).

    Composition of the yaw undoing the center longitude and the pitch
    undoing the center latitude (yaw shifts longitude by its negative, so
    the undoing yaw angle is +lon while the undoing pitch angle is -lat).
    """
    return BoxFrame(pitch_matrix(-b.lat) @ yaw_matrix(b.lon))


def contains(b: FovBBox, p: SphPoint) -> bool:
    """Membership test of a sphere point in the box's perspective rectangle.

    Boundary points count as inside; a tiny relative tolerance absorbs the
    rounding of the frame transform.
    """
    v = box_frame(b).to_frame(sph_to_cart(p))
    if v.z <= 0.0:
        return False
    bx = v.z * math.tan(math.radians(b.fov_h / 2.0))
    by = v.z * math.tan(math.radians(b.fov_v / 2.0))
    return (abs(v.x) <= bx + _BOUNDARY_EPS * (abs(v.x) + bx)
            and abs(v.y) <= by + _BOUNDARY_EPS * (abs(v.y) + by))


def contains_many(b: FovBBox, points: np.ndarray) -> np.ndarray:
    """Vectorized :func:`contains` over an (n, 3) array of unit vectors."""
    f = box_frame(b).to_frame_many(points)
    ta = math.tan(math.radians(b.fov_h / 2.0))
    tb = math.tan(math.radians(b.fov_v / 2.0))
    z = f[:, 2]
    return (z > 0.0) & (np.abs(f[:, 0]) <= z * ta) & (np.abs(f[:, 1]) <= z * tb)


def box_corners(b: FovBBox) -> list[Vec3]:
    """The four corner directions, counter-clockwise seen from outside.

    In the box frame the corners are ``normalize((+-tan(a), +-tan(b), 1))``
    with ``a = fov_h/2`` and ``b = fov_v/2``.
    """
    ta = math.tan(math.radians(b.fov_h / 2.0))
    tb = math.tan(math.radians(b.fov_v / 2.0))
    frame = box_frame(b)
    signs = [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)]
    return [frame.from_frame(Vec3(sx * ta, sy * tb, 1.0).normalized())
            for sx, sy in signs]


def planar_area(b: FovBBox) -> float:
    """FoV product area in square degrees."""
    return b.fov_h * b.fov_v


def segment_area(b: FovBBox) -> float:
    """Spherical-segment proportion area, ``2 * a * sin(b/2)``, steradians."""
    return 2.0 * math.radians(b.fov_h) * math.sin(math.radians(b.fov_v) / 2.0)


def solid_angle(b: FovBBox) -> float:
    """Exact solid angle of the perspective rectangle, steradians."""
    sa = math.sin(math.radians(b.fov_h / 2.0))
    sb = math.sin(math.radians(b.fov_v / 2.0))
    return 4.0 * math.asin(sa * sb)
