"""Deterministic low-discrepancy samplers (unit cube, sphere, ball).

All constructions in the library that need "random-looking" points use these
samplers; there is no hidden RNG state.  A *seed* is interpreted as an offset
into the (unscrambled) Halton sequence, so a given (dimension, seed, count)
triple yields the same points on every platform and every run.

Maps used:
  sphere:  Halton point u in (0,1)^d  ->  componentwise normal quantile
           (ndtri)  ->  normalize to the unit sphere S^{d-1}.
  ball:    sphere direction from the first d coordinates, radius from an
           extra Halton coordinate via t^(1/d) (volume-uniform).
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

from .errors import ArgumentError

# The first Halton point (all zeros offset) degenerates under ndtri; always
# skip at least one point.
_BURN = 1


def halton(n: int, dim: int, seed: int = 0) -> np.ndarray:
    """First ``n`` points of the unscrambled Halton sequence in (0,1)^dim.

    ``seed`` fast-forwards the sequence by ``seed`` points (plus a fixed
    burn-in of 1 to avoid the degenerate all-zero first point).
    """
    if n < 0 or dim < 1:
        raise ArgumentError(f"halton: need n >= 0 and dim >= 1, got n={n}, dim={dim}")
    if seed < 0:
        raise ArgumentError(f"halton: seed must be >= 0, got {seed}")
    eng = qmc.Halton(d=dim, scramble=False)
    eng.fast_forward(_BURN + seed)
    return eng.random(n)


def sphere_points(n: int, dim: int, seed: int = 0) -> np.ndarray:
    """``n`` quasi-uniform unit vectors on S^{dim-1} (shape (n, dim))."""
    if dim < 2:
        raise ArgumentError(f"sphere_points: need dim >= 2, got {dim}")
    u = halton(n, dim, seed=seed)
    g = ndtri(u)
    norms = np.linalg.norm(g, axis=1)
    # ndtri of interior Halton points is finite and nonzero-norm; guard anyway.
    bad = norms < 1e-12
    if np.any(bad):
        g[bad] = 0.0
        g[bad, 0] = 1.0
        norms[bad] = 1.0
    return g / norms[:, None]


def ball_points(n: int, dim: int, seed: int = 0) -> np.ndarray:
    """``n`` quasi-uniform points in the closed unit ball of R^dim."""
    if dim < 1:
        raise ArgumentError(f"ball_points: need dim >= 1, got {dim}")
    if dim == 1:
        u = halton(n, 1, seed=seed)[:, 0]
        return (2.0 * u - 1.0)[:, None]
    u = halton(n, dim + 1, seed=seed)
    g = ndtri(u[:, :dim])
    norms = np.linalg.norm(g, axis=1)
    bad = norms < 1e-12
    if np.any(bad):
        g[bad] = 0.0
        g[bad, 0] = 1.0
        norms[bad] = 1.0
    dirs = g / norms[:, None]
    radii = u[:, dim] ** (1.0 / dim)
    return dirs * radii[:, None]


def circle_points(n: int) -> np.ndarray:
    """``n`` exactly equally spaced unit vectors on S^1 starting at (1, 0)."""
    if n < 1:
        raise ArgumentError(f"circle_points: need n >= 1, got {n}")
    ang = 2.0 * np.pi * np.arange(n) / n
    return np.column_stack([np.cos(ang), np.sin(ang)])
