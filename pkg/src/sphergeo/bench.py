"""Micro-benchmark harness for the IoU kernels.

Every method is fed the same seeded random pair stream.  Per-call wall
time is amortized over inner loops of 100 calls to defeat timer
granularity; a leading warmup fraction of the blocks is discarded before
aggregating.  Absolute times are hardware-specific, so consumers should
assert only orderings and ratios.
"""

from __future__ import annotations

import math
import time
import zlib
from dataclasses import dataclass

import numpy as np

from .bfov import FovBBox
from .iou import exact_iou, fov_iou, sph_iou

__all__ = ["BenchResult", "random_pair_stream", "pair_stream_checksum",
           "run_bench", "BENCH_METHODS"]

_INNER = 100

BENCH_METHODS = {
    "sph": sph_iou,
    "fov": fov_iou,
    "exact": exact_iou,
}


@dataclass(frozen=True)
class BenchResult:
    """Aggregated per-call wall times (nanoseconds) for one method."""

    method: str
    n_calls: int
    mean_ns: float
    p50_ns: float
    p95_ns: float

    @property
    def pairs_per_sec(self) -> float:
        return 1e9 / self.mean_ns


def random_pair_stream(n: int, seed: int) -> list[tuple[FovBBox, FovBBox]]:
    """Deterministic stream of mostly-overlapping random box pairs.

    The second box is a perturbation of the first so the exact clipper
    exercises its full path instead of bailing out on empty overlaps.
    """
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(n):
        lon = rng.uniform(-180.0, 180.0)
        lat = rng.uniform(-65.0, 65.0)
        fh = rng.uniform(15.0, 80.0)
        fv = rng.uniform(15.0, 80.0)
        a = FovBBox(lon, lat, fh, fv)
        b = FovBBox(lon + rng.uniform(-0.5, 0.5) * fh,
                    float(np.clip(lat + rng.uniform(-0.5, 0.5) * fv, -89.0, 89.0)),
                    float(np.clip(fh * rng.uniform(0.7, 1.3), 1.0, 179.0)),
                    float(np.clip(fv * rng.uniform(0.7, 1.3), 1.0, 179.0)))
        pairs.append((a, b))
    return pairs


def pair_stream_checksum(pairs: list[tuple[FovBBox, FovBBox]]) -> int:
    """CRC over the exact float inputs; equal seeds give equal checksums."""
    buf = np.array([(a.lon, a.lat, a.fov_h, a.fov_v,
                     b.lon, b.lat, b.fov_h, b.fov_v) for a, b in pairs])
    return zlib.crc32(buf.tobytes())


def run_bench(methods: list[str], n: int, seed: int,
              warmup_fraction: float = 0.1) -> list[BenchResult]:
    """Time ``n`` calls of each method over the same seeded pair stream."""
    if n < 1000:
        raise ValueError("benchmark needs n >= 1000 calls")
    if not 0.0 <= warmup_fraction <= 0.5:
        raise ValueError("warmup_fraction outside [0, 0.5]")
    for m in methods:
        if m not in BENCH_METHODS:
            raise ValueError(f"unknown benchmark method {m!r}")

    pairs = random_pair_stream(n, seed)
    n_blocks = math.ceil(n / _INNER)
    warmup_blocks = math.ceil(warmup_fraction * n_blocks)

    results = []
    for m in methods:
        fn = BENCH_METHODS[m]
        per_call = []
        for blk in range(n_blocks):
            chunk = pairs[blk * _INNER:(blk + 1) * _INNER]
            t0 = time.perf_counter_ns()
            for a, b in chunk:
                fn(a, b)
            t1 = time.perf_counter_ns()
            per_call.append((t1 - t0) / len(chunk))
        kept = np.array(per_call[warmup_blocks:] or per_call)
        results.append(BenchResult(
            method=m,
            n_calls=n,
            mean_ns=float(kept.mean()),
            p50_ns=float(np.percentile(kept, 50)),
            p95_ns=float(np.percentile(kept, 95)),
        ))
    return results
