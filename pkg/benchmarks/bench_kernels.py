#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Usage: python benchmarks/bench_kernels.py [--points N] [--rays N] [--repeat N]

Times the two hot paths (batch pole warp, watertight ray-hit counting) on
every importable backend, verifies they agree exactly, and prints a table
with speedups relative to the python backend.
"""

import argparse
import time

import numpy as np

from polewarp.kernels import available_backends
from polewarp.mesh import fibonacci_directions
from polewarp.shapes import icosphere


def _best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, default=1_000_000, help="warp batch size")
    parser.add_argument("--rays", type=int, default=2000, help="ray count against an icosphere")
    parser.add_argument("--repeat", type=int, default=5, help="best-of repetitions")
    args = parser.parse_args()

    backends = available_backends()
    print(f"backends: {', '.join(sorted(backends))}")

    rng = np.random.default_rng(0)
    pts = rng.normal(size=(args.points, 3))
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    mesh = icosphere(3)
    dirs = fibonacci_directions(args.rays)

    rows = []
    results = {}
    for name, mod in sorted(backends.items()):
        t_warp = _best_of(lambda: mod.warp_points(pts, 0.3), args.repeat)
        t_rays = _best_of(lambda: mod.ray_hit_counts(mesh.vertices, mesh.triangles, dirs), args.repeat)
        results[name] = (mod.warp_points(pts, 0.3), mod.ray_hit_counts(mesh.vertices, mesh.triangles, dirs))
        rows.append((name, t_warp, t_rays))

    if len(results) == 2:
        a, b = results.values()
        assert np.array_equal(a[0], b[0]), "warp outputs differ between backends"
        assert np.array_equal(a[1], b[1]), "ray counts differ between backends"
        print("backend outputs are bit-identical")

    base = dict((name, (tw, tr)) for name, tw, tr in rows)["python"]
    print(f"\nwarp_points: {args.points} points | ray_hit_counts: {args.rays} rays x {mesh.n_triangles} triangles")
    print(f"{'backend':<10} {'warp [ms]':>12} {'speedup':>9} {'rays [ms]':>12} {'speedup':>9}")
    for name, t_warp, t_rays in rows:
        print(
            f"{name:<10} {t_warp * 1e3:>12.2f} {base[0] / t_warp:>8.1f}x "
            f"{t_rays * 1e3:>12.2f} {base[1] / t_rays:>8.1f}x"
        )


if __name__ == "__main__":
    main()
