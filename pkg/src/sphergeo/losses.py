"""GIoU-style losses over FoV boxes, with analytic gradients.

``loss = 1 - iou + (A(C) - A(U)) / A(C)`` where ``C`` is the smallest
planar enclosing box of the two (recentred) rectangles.  The FoV variant
recentres the detected box by the FoV distance before intersecting; the
sph variant uses raw wrapped longitude differences.

Gradients are with respect to the detected box's (lon, lat, fov_h, fov_v),
per degree.  They are produced by running the identical computation on
forward-mode dual numbers, so the value lane is bit-exact with the plain
loss.  At a min/max tie the derivative of the first argument (the
ground-truth side) is taken, and the result is flagged as sitting on a
kink; the clamp ``max(0, .)`` contributes zero gradient on the clamped
side for the same reason.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bfov import FovBBox
from .sphere import wrap_lon

__all__ = ["LossValue", "LossGradient", "fov_giou_loss", "sph_giou_loss",
           "loss_gradient"]


@dataclass(frozen=True)
class LossValue:
    """GIoU-style loss with its two components.

    ``value = 1 - iou_term + enclosure_penalty``; the penalty lies in
    ``[0, 1)`` so the loss lies in ``[0, 2)``.
    """

    value: float
    iou_term: float
    enclosure_penalty: float


@dataclass(frozen=True)
class LossGradient:
    """Partials of the loss w.r.t. the detected box, per degree."""

    d_lon: float
    d_lat: float
    d_fov_h: float
    d_fov_v: float
    at_kink: bool = False

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.d_lon, self.d_lat, self.d_fov_h, self.d_fov_v)


class _Dual:
    """Scalar with a 4-component derivative; comparisons go by value."""

    __slots__ = ("v", "g")

    def __init__(self, v, g=(0.0, 0.0, 0.0, 0.0)):
        self.v = v
        self.g = g

    def __add__(self, o):
        if isinstance(o, _Dual):
            return _Dual(self.v + o.v, tuple(a + b for a, b in zip(self.g, o.g)))
        return _Dual(self.v + o, self.g)

    __radd__ = __add__

    def __neg__(self):
        return _Dual(-self.v, tuple(-a for a in self.g))

    def __sub__(self, o):
        return self + (-o if isinstance(o, _Dual) else -o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if isinstance(o, _Dual):
            return _Dual(self.v * o.v,
                         tuple(a * o.v + self.v * b for a, b in zip(self.g, o.g)))
        return _Dual(self.v * o, tuple(a * o for a in self.g))

    __rmul__ = __mul__

    def __truediv__(self, o):
        if isinstance(o, _Dual):
            inv = 1.0 / o.v
            return _Dual(self.v * inv,
                         tuple((a - self.v * inv * b) * inv
                               for a, b in zip(self.g, o.g)))
        return _Dual(self.v / o, tuple(a / o for a in self.g))

    def __rtruediv__(self, o):
        inv = 1.0 / self.v
        return _Dual(o * inv, tuple(-o * inv * inv * a for a in self.g))

    def __lt__(self, o):
        return self.v < _val(o)

    def __gt__(self, o):
        return self.v > _val(o)


def _val(x):
    return x.v if isinstance(x, _Dual) else x


def _cosd(x):
    # cos of an angle in degrees, dual-aware.
    if isinstance(x, _Dual):
        r = math.radians(x.v)
        d = -math.sin(r) * math.pi / 180.0
        return _Dual(math.cos(r), tuple(d * a for a in x.g))
    return math.cos(math.radians(x))


def _wrapd(x):
    # wrap_lon, dual-aware; derivative 1 away from the wrap discontinuity.
    if isinstance(x, _Dual):
        return _Dual(wrap_lon(x.v), x.g)
    return wrap_lon(x)


def _mx(a, b, ties):
    if _val(a) == _val(b):
        ties.append(True)
        return a
    return a if _val(a) > _val(b) else b


def _mn(a, b, ties):
    if _val(a) == _val(b):
        ties.append(True)
        return a
    return a if _val(a) < _val(b) else b


def _giou(bg: FovBBox, theta_d, phi_d, alpha_d, beta_d, kind: str, ties: list):
    """Loss terms for either variant; inputs may be floats or duals."""
    area_g = bg.fov_h * bg.fov_v
    area_d = alpha_d * beta_d

    if kind == "fov":
        dx = _wrapd(theta_d - bg.lon) * _cosd((bg.lat + phi_d) * 0.5)
    else:
        dx = _wrapd(theta_d - bg.lon)
    dy = phi_d - bg.lat

    x_min = _mx(-bg.fov_h / 2.0, dx - alpha_d * 0.5, ties)
    x_max = _mn(bg.fov_h / 2.0, dx + alpha_d * 0.5, ties)
    y_min = _mx(-bg.fov_v / 2.0, dy - beta_d * 0.5, ties)
    y_max = _mn(bg.fov_v / 2.0, dy + beta_d * 0.5, ties)
    inter = _mx(0.0, x_max - x_min, ties) * _mx(0.0, y_max - y_min, ties)
    union = area_g + area_d - inter
    iou = inter / union

    cx_min = _mn(-bg.fov_h / 2.0, dx - alpha_d * 0.5, ties)
    cx_max = _mx(bg.fov_h / 2.0, dx + alpha_d * 0.5, ties)
    cy_min = _mn(-bg.fov_v / 2.0, dy - beta_d * 0.5, ties)
    cy_max = _mx(bg.fov_v / 2.0, dy + beta_d * 0.5, ties)
    enclosure = (cx_max - cx_min) * (cy_max - cy_min)
    penalty = (enclosure - union) / enclosure

    return 1.0 - iou + penalty, iou, penalty


def _loss(bg: FovBBox, bd: FovBBox, kind: str) -> LossValue:
    ties: list = []
    loss, iou, penalty = _giou(bg, bd.lon, bd.lat, bd.fov_h, bd.fov_v, kind, ties)
    return LossValue(loss, iou, penalty)


def fov_giou_loss(bg: FovBBox, bd: FovBBox) -> LossValue:
    """GIoU-style loss built on the FoV-distance-recentred intersection."""
    return _loss(bg, bd, "fov")


def sph_giou_loss(bg: FovBBox, bd: FovBBox) -> LossValue:
    """GIoU-style loss built on raw wrapped lon/lat extents."""
    return _loss(bg, bd, "sph")


def loss_gradient(bg: FovBBox, bd: FovBBox, loss_kind: str = "fov") -> LossGradient:
    """Gradient of the chosen loss w.r.t. the detected box fields.

    Finite for all valid inputs; at an exact min/max tie the one-sided
    derivative of the ground-truth argument is returned and ``at_kink``
    is set.
    """
    if loss_kind not in ("fov", "sph"):
        raise ValueError(f"unknown loss kind {loss_kind!r}")
    ties: list = []
    loss, _, _ = _giou(
        bg,
        _Dual(bd.lon, (1.0, 0.0, 0.0, 0.0)),
        _Dual(bd.lat, (0.0, 1.0, 0.0, 0.0)),
        _Dual(bd.fov_h, (0.0, 0.0, 1.0, 0.0)),
        _Dual(bd.fov_v, (0.0, 0.0, 0.0, 1.0)),
        loss_kind,
        ties,
    )
    g = loss.g
    return LossGradient(g[0], g[1], g[2], g[3], at_kink=bool(ties))
