"""Spherical coordinates, rotations, great-circle distance, and the
equirectangular (ERP) pixel grid.

Conventions used throughout the package:

* angles are degrees at every public boundary, radians only inside trig;
* the polar axis is ``y``: a point at longitude ``lon`` and latitude ``lat``
  maps to the unit vector ``(sin lon * cos lat, sin lat, cos lon * cos lat)``;
* yaw rotates about the ``y`` axis, pitch about the ``x`` axis;
* longitudes are normalized into ``[-180, 180)`` and longitude differences
  are wrapped before use, so the antimeridian needs no special casing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SphPoint",
    "Vec3",
    "ErpProjection",
    "RotationSpec",
    "wrap_lon",
    "sph_to_cart",
    "cart_to_sph",
    "rotate_yaw",
    "rotate_pitch",
    "yaw_matrix",
    "pitch_matrix",
    "apply_rotation",
    "apply_rotation_inverse",
    "great_circle_distance",
    "erp_project",
    "erp_pixel_to_sph",
    "sph_to_erp_pixel",
]

# Snap tolerance for latitudes that drift past +/-90 by rounding noise.
_LAT_EPS = 1e-9


def wrap_lon(lon: float) -> float:
    """Wrap a longitude (or longitude difference) into ``[-180, 180)``."""
    return (lon + 180.0) % 360.0 - 180.0


@dataclass(frozen=True)
class SphPoint:
    """A point on the unit sphere, longitude/latitude in degrees.

    Longitude is normalized into ``[-180, 180)``; latitude must lie in
    ``[-90, 90]`` (values within 1e-9 of a pole are snapped onto it).
    """

    lon: float
    lat: float

    def __post_init__(self):
        lat = float(self.lat)
        if lat > 90.0:
            if lat > 90.0 + _LAT_EPS:
                raise ValueError(f"latitude {lat} outside [-90, 90]")
            lat = 90.0
        elif lat < -90.0:
            if lat < -90.0 - _LAT_EPS:
                raise ValueError(f"latitude {lat} outside [-90, 90]")
            lat = -90.0
        object.__setattr__(self, "lon", wrap_lon(float(self.lon)))
        object.__setattr__(self, "lat", lat)


@dataclass(frozen=True)
class Vec3:
    """A Cartesian 3-vector; unit-norm when produced by :func:`sph_to_cart`."""

    x: float
    y: float
    z: float

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Vec3") -> "Vec3":
        return Vec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def normalized(self) -> "Vec3":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return Vec3(self.x / n, self.y / n, self.z / n)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


@dataclass(frozen=True)
class ErpProjection:
    """Equirectangular projection parameters.

    ``center`` is the (lon0, lat0) tangent point, ``standard_parallel`` the
    latitude with no horizontal distortion, ``radius`` the sphere radius.
    """

    center: SphPoint = SphPoint(0.0, 0.0)
    standard_parallel: float = 0.0
    radius: float = 1.0


@dataclass(frozen=True)
class RotationSpec:
    """A yaw-then-pitch sphere rotation, both angles in degrees.

    Yaw is normalized into ``[0, 360)``; pitch must lie in ``[-90, 90]``.
    The forward transform applies yaw first, then pitch; the inverse undoes
    pitch first, then yaw.
    """

    yaw: float
    pitch: float

    def __post_init__(self):
        if not -90.0 <= self.pitch <= 90.0:
            raise ValueError(f"pitch {self.pitch} outside [-90, 90]")
        object.__setattr__(self, "yaw", float(self.yaw) % 360.0)
        object.__setattr__(self, "pitch", float(self.pitch))


def sph_to_cart(p: SphPoint) -> Vec3:
    """Convert lon/lat degrees to a unit Cartesian vector (y = polar axis)."""
    lon = math.radians(p.lon)
    lat = math.radians(p.lat)
    clat = math.cos(lat)
    return Vec3(math.sin(lon) * clat, math.sin(lat), math.cos(lon) * clat)


def cart_to_sph(v: Vec3) -> SphPoint:
    """Convert a nonzero Cartesian vector to lon/lat degrees.

    At the poles (where longitude is undefined) the longitude is 0.
    """
    n = v.norm()
    if n == 0.0:
        raise ValueError("zero vector has no direction")
    y = min(1.0, max(-1.0, v.y / n))
    lat = math.degrees(math.asin(y))
    if v.x == 0.0 and v.z == 0.0:
        return SphPoint(0.0, lat)
    return SphPoint(math.degrees(math.atan2(v.x, v.z)), lat)


def rotate_yaw(v: Vec3, yaw_deg: float) -> Vec3:
    """Rotate about the polar (y) axis; latitude is unchanged."""
    a = math.radians(yaw_deg)
    c, s = math.cos(a), math.sin(a)
    return Vec3(v.x * c - v.z * s, v.y, v.x * s + v.z * c)


def rotate_pitch(v: Vec3, pitch_deg: float) -> Vec3:
    """Rotate about the x axis (moves the poles along the lon 0 meridian)."""
    a = math.radians(pitch_deg)
    c, s = math.cos(a), math.sin(a)
    return Vec3(v.x, v.y * c + v.z * s, -v.y * s + v.z * c)


def yaw_matrix(yaw_deg: float) -> np.ndarray:
    """3x3 matrix form of :func:`rotate_yaw` (acts on column vectors)."""
    a = math.radians(yaw_deg)
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, 0.0, -s], [0.0, 1.0, 0.0], [s, 0.0, c]])


def pitch_matrix(pitch_deg: float) -> np.ndarray:
    """3x3 matrix form of :func:`rotate_pitch` (acts on column vectors)."""
    a = math.radians(pitch_deg)
    c, s = math.cos(a), math.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, s], [0.0, -s, c]])


def apply_rotation(v: Vec3, spec: RotationSpec) -> Vec3:
    """Apply the forward transform of ``spec``: yaw, then pitch."""
    return rotate_pitch(rotate_yaw(v, spec.yaw), spec.pitch)


def apply_rotation_inverse(v: Vec3, spec: RotationSpec) -> Vec3:
    """Undo :func:`apply_rotation`: inverse pitch, then inverse yaw."""
    return rotate_yaw(rotate_pitch(v, -spec.pitch), -spec.yaw)


def great_circle_distance(p: SphPoint, q: SphPoint) -> float:
    """Great-circle distance in radians via the haversine formula.

    Returns a value in ``[0, pi]``; symmetric in its arguments.
    """
    lat1 = math.radians(p.lat)
    lat2 = math.radians(q.lat)
    dlat = lat2 - lat1
    dlon = math.radians(wrap_lon(q.lon - p.lon))
    h = (
        math.sin(dlat / 2.0) ** 2
        + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    )
    return 2.0 * math.asin(min(1.0, math.sqrt(h)))


def erp_project(p: SphPoint, proj: ErpProjection) -> tuple[float, float]:
    """Project a sphere point onto the equirectangular plane.

    ``x = R * (lon - lon0) * cos(standard_parallel)``, ``y = R * (lat - lat0)``
    with the longitude difference wrapped; both outputs in radians times R.
    """
    dlon = math.radians(wrap_lon(p.lon - proj.center.lon))
    dlat = math.radians(p.lat - proj.center.lat)
    x = proj.radius * dlon * math.cos(math.radians(proj.standard_parallel))
    y = proj.radius * dlat
    return x, y


def _check_erp_dims(width: int, height: int) -> None:
    if width != 2 * height or height <= 0:
        raise ValueError(f"ERP grid must be 2:1, got {width}x{height}")


def erp_pixel_to_sph(u: float, v: float, width: int, height: int) -> SphPoint:
    """Map an ERP pixel index to the lon/lat of its pixel center.

    ``u`` runs left to right over ``[0, width)``, ``v`` top to bottom over
    ``[0, height)``; row zero sits at the north edge of the image.
    """
    _check_erp_dims(width, height)
    if not (0 <= u < width and 0 <= v < height):
        raise ValueError(f"pixel ({u}, {v}) outside {width}x{height} grid")
    lon = (u + 0.5) / width * 360.0 - 180.0
    lat = 90.0 - (v + 0.5) / height * 180.0
    return SphPoint(lon, lat)


def sph_to_erp_pixel(p: SphPoint, width: int, height: int) -> tuple[float, float]:
    """Inverse of :func:`erp_pixel_to_sph`; returns continuous coordinates."""
    _check_erp_dims(width, height)
    u = (p.lon + 180.0) / 360.0 * width - 0.5
    v = (90.0 - p.lat) / 180.0 * height - 0.5
    return u, v
