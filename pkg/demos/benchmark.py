"""Time the three analytic IoU kernels on a shared seeded pair stream.

The exact clipper pays for its trigonometry; the two rectangle
approximations differ only by one cosine.  Absolute numbers are
hardware-specific; the orderings are what the library guarantees.
"""

import numpy as np

from sphergeo.bench import pair_stream_checksum, random_pair_stream, run_bench


def main():
    pairs = random_pair_stream(2000, seed=0)
    print(f"pair stream checksum (seed 0): {pair_stream_checksum(pairs):#010x}")

    runs = {m: [] for m in ("sph", "fov", "exact")}
    for seed in range(3):
        for r in run_bench(["sph", "fov", "exact"], 10_000, seed=seed):
            runs[r.method].append(r)

    print(f"\n{'method':<8} {'mean':>10} {'p50':>10} {'p95':>10} "
          f"{'pairs/s':>12}")
    for method, results in runs.items():
        mean = float(np.median([r.mean_ns for r in results]))
        p50 = float(np.median([r.p50_ns for r in results]))
        p95 = float(np.median([r.p95_ns for r in results]))
        print(f"{method:<8} {mean / 1e3:>8.2f}us {p50 / 1e3:>8.2f}us "
              f"{p95 / 1e3:>8.2f}us {1e9 / mean:>12.0f}")

    med = {m: float(np.median([r.mean_ns for r in rs]))
           for m, rs in runs.items()}
    print(f"\nexact/fov ratio: {med['exact'] / med['fov']:.1f}x")
    print(f"fov/sph ratio:   {med['fov'] / med['sph']:.2f}x")


if __name__ == "__main__":
    main()
