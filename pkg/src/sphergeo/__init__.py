"""Field-of-view bounding-box geometry on the sphere.

Core objects and the most-used operations are re-exported here; the
submodules carry the rest:

* :mod:`sphergeo.sphere` — coordinates, rotations, great-circle distance
* :mod:`sphergeo.bfov` — the FoV box type and its spherical realization
* :mod:`sphergeo.iou` — the four IoU computations and batch matrices
* :mod:`sphergeo.losses` — differentiable GIoU-style losses
* :mod:`sphergeo.nms` — greedy non-maximum suppression
* :mod:`sphergeo.evaluation` — COCO-style mAP with bands and size buckets
* :mod:`sphergeo.augment` — spherically consistent panorama augmentation
* :mod:`sphergeo.dataio` — dataset/prediction/image files
* :mod:`sphergeo.bench` — the IoU timing harness
"""

from .augment import (AugmentConfig, ErpImage, RollAngle, augment_dataset,
                      local_roll_angle, remap_erp, transform_bbox)
from .bfov import (BoxFrame, FovBBox, box_corners, box_frame, contains,
                   planar_area, segment_area, solid_angle)
from .evaluation import EvalReport, GroundTruth, evaluate
from .iou import (EXACT, FOV, SPH, IoUMatrix, IoUMethod, exact_iou,
                  fov_distance, fov_iou, iou_matrix, mc_iou, monte_carlo,
                  pair_iou, sph_iou, spherical_polygon_area)
from .losses import (LossGradient, LossValue, fov_giou_loss, loss_gradient,
                     sph_giou_loss)
from .nms import Detection, nms
from .sphere import (ErpProjection, RotationSpec, SphPoint, Vec3, cart_to_sph,
                     erp_pixel_to_sph, erp_project, great_circle_distance,
                     rotate_pitch, rotate_yaw, sph_to_cart, sph_to_erp_pixel,
                     wrap_lon)

__version__ = "0.1.0"

__all__ = [
    "AugmentConfig", "BoxFrame", "Detection", "EXACT", "ErpImage",
    "ErpProjection", "EvalReport", "FOV", "FovBBox", "GroundTruth",
    "IoUMatrix", "IoUMethod", "LossGradient", "LossValue", "RollAngle",
    "RotationSpec", "SPH", "SphPoint", "Vec3", "augment_dataset",
    "box_corners", "box_frame", "cart_to_sph", "contains", "erp_pixel_to_sph",
    "erp_project", "evaluate", "exact_iou", "fov_distance", "fov_giou_loss",
    "fov_iou", "great_circle_distance", "iou_matrix", "local_roll_angle",
    "loss_gradient", "mc_iou", "monte_carlo", "nms", "pair_iou", "planar_area",
    "remap_erp", "rotate_pitch", "rotate_yaw", "segment_area", "solid_angle",
    "sph_giou_loss", "sph_iou", "sph_to_cart", "sph_to_erp_pixel",
    "spherical_polygon_area", "transform_bbox", "wrap_lon", "__version__",
]
