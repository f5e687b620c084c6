"""Walk the GIoU-style loss surface and sanity-check its gradient.

First slides a detected box along the line of centers to show the loss
falls monotonically even while the boxes are disjoint (the enclosure
penalty supplies the signal), then runs plain gradient descent on all four
box parameters, and finally spot-checks the analytic gradient against
central finite differences.
"""

import dataclasses

from sphergeo import FovBBox, fov_giou_loss, loss_gradient


def slide_along_centers():
    print("loss while sliding a disjoint box toward the target "
          "(equator, 20x20):")
    target = FovBBox(0, 0, 20, 20)
    for lon in range(60, 14, -5):
        v = fov_giou_loss(target, FovBBox(lon, 0, 20, 20))
        bar = "#" * int(40 * v.value / 2.0)
        print(f"  lon={lon:>3}  loss={v.value:.4f}  iou={v.iou_term:.4f}  "
              f"penalty={v.enclosure_penalty:.4f}  {bar}")


def run_descent():
    print("\nfixed-step gradient descent (step 0.05 deg per unit gradient):")
    target = FovBBox(0, 0, 40, 40)
    cur = FovBBox(20, 20, 48, 34)
    for step in range(601):
        g = loss_gradient(target, cur)
        if step % 100 == 0:
            v = fov_giou_loss(target, cur)
            print(f"  step {step:>3}: loss={v.value:.5f}  "
                  f"box=({cur.lon:.2f}, {cur.lat:.2f}, "
                  f"{cur.fov_h:.2f}, {cur.fov_v:.2f})")
        cur = FovBBox(cur.lon - 0.05 * g.d_lon, cur.lat - 0.05 * g.d_lat,
                      cur.fov_h - 0.05 * g.d_fov_h,
                      cur.fov_v - 0.05 * g.d_fov_v)


def check_gradient():
    print("\nanalytic gradient vs central differences (h = 1e-4 deg):")
    bg = FovBBox(10, 35, 40, 30)
    bd = FovBBox(25, 28, 35, 45)
    g = loss_gradient(bg, bd)
    h = 1e-4
    for name, analytic in zip(("lon", "lat", "fov_h", "fov_v"), g.as_tuple()):
        hi = dataclasses.replace(bd, **{name: getattr(bd, name) + h})
        lo = dataclasses.replace(bd, **{name: getattr(bd, name) - h})
        fd = (fov_giou_loss(bg, hi).value - fov_giou_loss(bg, lo).value) / (2 * h)
        print(f"  d/d{name:<6} analytic={analytic:+.8f}  fd={fd:+.8f}  "
              f"|diff|={abs(analytic - fd):.2e}")


if __name__ == "__main__":
    slide_along_centers()
    run_descent()
    check_gradient()
