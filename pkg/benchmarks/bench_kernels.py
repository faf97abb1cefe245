"""Throughput comparison: compiled vs numpy implementation of chord thinning.

The greedy thinning pass is the hot kernel of candidate packing (it scans up
to ~10^5-10^6 direction vectors and keeps a pairwise-separated subset).  Both
implementations are exercised on identical inputs at packing scale and must
return bit-identical index sets; wall times and the speedup are printed.

Run:  python benchmarks/bench_kernels.py [--n 200000] [--dim 5] [--repeats 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from negcurve import _thin_np
from negcurve.kernels import ACTIVE_IMPL, HAVE_COMPILED
from negcurve.sampling import sphere_points

if HAVE_COMPILED:
    from negcurve import _thin


def bench(fn, pts, min_chord, repeats):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = np.asarray(fn(pts, min_chord, -1), dtype=np.int64)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200_000, help="input points")
    ap.add_argument("--dim", type=int, default=5, help="sphere dimension (ambient)")
    ap.add_argument("--repeats", type=int, default=3, help="timing repeats, best-of")
    ap.add_argument("--min-chord", type=float, default=None,
                    help="separation threshold (default: sized for ~10^3 survivors)")
    args = ap.parse_args()

    pts = np.ascontiguousarray(sphere_points(args.n, args.dim, seed=0), dtype=float)
    # default threshold: survivor count scales like chord^-(dim-1); aim ~1e3
    min_chord = args.min_chord
    if min_chord is None:
        min_chord = 2.0 * (1000.0 / args.n) ** (1.0 / max(1, args.dim - 1)) * 0.5

    print(f"points: {args.n} x {args.dim}, min_chord = {min_chord:.6g}, "
          f"best of {args.repeats}")
    print(f"active implementation at import: {ACTIVE_IMPL}")

    t_np, idx_np = bench(_thin_np.thin_chord, pts, min_chord, args.repeats)
    print(f"numpy    : {t_np * 1e3:10.2f} ms   kept {idx_np.size}")

    if not HAVE_COMPILED:
        print("compiled : unavailable (extension not built) -- nothing to compare")
        return

    t_c, idx_c = bench(_thin.thin_chord, pts, min_chord, args.repeats)
    print(f"compiled : {t_c * 1e3:10.2f} ms   kept {idx_c.size}")

    identical = np.array_equal(idx_np, idx_c)
    print(f"bit-identical index sets: {identical}")
    if not identical:
        raise SystemExit("MISMATCH between implementations")
    print(f"speedup  : {t_np / t_c:10.2f}x")


if __name__ == "__main__":
    main()
