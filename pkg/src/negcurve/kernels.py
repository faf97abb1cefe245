"""Kernel dispatch: compiled extension when available, numpy fallback otherwise.

Set NEGCURVE_PURE_PYTHON=1 to force the numpy implementation.  Both
implementations of `thin_chord` return bit-identical index sets (see the
module docstrings of `_thin_np` / `_thin.pyx`); `benchmarks/bench_kernels.py`
compares their throughput.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import ArgumentError

_FORCE_PURE = os.environ.get("NEGCURVE_PURE_PYTHON", "") not in ("", "0")

HAVE_COMPILED = False
if not _FORCE_PURE:
    try:
        from . import _thin as _impl  # type: ignore[attr-defined]

        HAVE_COMPILED = True
    except ImportError:  # extension not built
        from . import _thin_np as _impl
else:
    from . import _thin_np as _impl

ACTIVE_IMPL = "compiled" if HAVE_COMPILED else "numpy"


def thin_chord(
    points: np.ndarray, min_chord: float, count_target: int | None = None
) -> np.ndarray:
    """Greedy scan-order thinning: keep points pairwise >= min_chord apart.

    Returns the int64 indices of the accepted points, in scan order.  With a
    count_target, scanning stops as soon as that many points are accepted.
    """
    ct = -1 if count_target is None else int(count_target)
    pts = np.ascontiguousarray(points, dtype=float)
    return np.asarray(_impl.thin_chord(pts, float(min_chord), ct), dtype=np.int64)


def max_pairwise_dot(U: np.ndarray, block: int = 4096) -> float:
    """Largest dot product over distinct rows of U (blocked float64 GEMM).

    For unit rows this certifies the smallest pairwise angle.  Memory use is
    O(block^2); full float64 precision (a dot near 1 is accurate to ~1e-15,
    which bounds 1 - cos(angle) far below any separation threshold in use).
    """
    U = np.ascontiguousarray(U, dtype=float)
    if U.ndim != 2:
        raise ArgumentError(f"max_pairwise_dot: rows expected, got shape {U.shape}")
    n = U.shape[0]
    if n < 2:
        return -np.inf
    best = -np.inf
    for i0 in range(0, n, block):
        a = U[i0 : i0 + block]
        for j0 in range(i0, n, block):
            b = U[j0 : j0 + block]
            g = a @ b.T
            if i0 == j0:
                np.fill_diagonal(g, -np.inf)
            m = float(g.max())
            if m > best:
                best = m
    return best
