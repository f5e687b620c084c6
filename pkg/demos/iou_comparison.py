"""Compare the four IoU computations across latitudes.

The rectangle approximations agree with the exact spherical overlap near
the equator; away from it the raw lon/lat variant collapses while the
FoV-distance variant stays close.  The Monte-Carlo column is the
independent check on the exact clipper.
"""

from sphergeo import FovBBox, exact_iou, fov_iou, mc_iou, sph_iou

PAIRS = [
    ("equator, touching", FovBBox(0, 0, 40, 40), FovBBox(25, 0, 40, 40)),
    ("mid-latitude", FovBBox(40, 50, 35, 55), FovBBox(35, 20, 37, 50)),
    ("high latitude", FovBBox(30, 60, 60, 60), FovBBox(60, 60, 60, 60)),
    ("near the pole", FovBBox(50, -78, 25, 46), FovBBox(30, -75, 26, 45)),
    ("antimeridian", FovBBox(-170, 10, 40, 40), FovBBox(175, 12, 40, 40)),
]


def main():
    header = f"{'pair':<20} {'fov':>7} {'sph':>7} {'exact':>7} {'mc (1e6)':>12}"
    print(header)
    print("-" * len(header))
    for name, bg, bd in PAIRS:
        mc = mc_iou(bg, bd, 1_000_000, seed=0)
        print(f"{name:<20} {fov_iou(bg, bd):>7.4f} {sph_iou(bg, bd):>7.4f} "
              f"{exact_iou(bg, bd):>7.4f} "
              f"{mc.value:>7.4f} ± {mc.std_error:.4f}")

    print()
    print("Same-shape boxes pulled apart along longitude at latitude 65:")
    print(f"{'offset':>7} {'fov':>8} {'sph':>8} {'exact':>8}")
    for offset in (5, 10, 20, 30, 45, 60):
        bg = FovBBox(0, 65, 40, 40)
        bd = FovBBox(offset, 65, 40, 40)
        print(f"{offset:>6}° {fov_iou(bg, bd):>8.4f} {sph_iou(bg, bd):>8.4f} "
              f"{exact_iou(bg, bd):>8.4f}")


if __name__ == "__main__":
    main()
