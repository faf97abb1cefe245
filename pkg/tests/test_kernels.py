"""Compiled vs numpy thinning kernels: bit-equality and contracts."""

import subprocess
import sys

import numpy as np
import pytest

from negcurve import kernels
from negcurve.kernels import max_pairwise_dot, thin_chord
from negcurve.sampling import sphere_points


def test_thin_chord_basic():
    pts = np.array([[0.0, 0.0], [10.0, 0.0], [0.1, 0.0], [5.0, 5.0]])
    idx = thin_chord(pts, 1.0)
    # scan order: keep 0, keep 1 (far), drop 2 (0.1 from point 0), keep 3
    assert idx.tolist() == [0, 1, 3]
    assert idx.dtype == np.int64


def test_thin_chord_count_target_stops_early():
    pts = sphere_points(5000, 3, seed=0)
    full = thin_chord(pts, 0.2)
    assert len(full) > 10
    capped = thin_chord(pts, 0.2, count_target=10)
    assert len(capped) == 10
    assert np.array_equal(capped, full[:10])  # same scan prefix


def test_thin_chord_separation_holds():
    pts = sphere_points(3000, 4, seed=2)
    idx = thin_chord(pts, 0.5)
    kept = pts[idx]
    d = max_pairwise_dot(kept)
    # chord^2 = 2 - 2 dot >= 0.25  <=>  dot <= 1 - 0.125
    assert d <= 1.0 - 0.5**2 / 2.0 + 1e-12


def test_implementations_bit_identical():
    from negcurve import _thin_np

    pts = np.ascontiguousarray(sphere_points(20000, 5, seed=1))
    a = np.asarray(_thin_np.thin_chord(pts, 0.3, -1), dtype=np.int64)
    if not kernels.HAVE_COMPILED:
        pytest.skip("compiled extension not built in this environment")
    from negcurve import _thin

    b = np.asarray(_thin.thin_chord(pts, 0.3, -1), dtype=np.int64)
    assert np.array_equal(a, b)


def test_pure_python_env_var_selects_numpy():
    code = (
        "import negcurve.kernels as k; "
        "print(k.ACTIVE_IMPL)"
    )
    out = subprocess.run(
        [sys.executable, "-c", code],
        env={"NEGCURVE_PURE_PYTHON": "1", "PATH": "/usr/bin:/bin"},
        capture_output=True, text=True, cwd="/root/pkg",
    )
    assert out.returncode == 0, out.stderr
    assert out.stdout.strip() == "numpy"


def test_max_pairwise_dot():
    U = np.array([[1.0, 0.0], [0.0, 1.0], [np.sqrt(0.5), np.sqrt(0.5)]])
    assert max_pairwise_dot(U) == pytest.approx(np.sqrt(0.5), rel=1e-15)
    assert max_pairwise_dot(U[:1]) == -np.inf
    # blocked path must agree with the direct computation
    V = sphere_points(1500, 3, seed=3)
    direct = -np.inf
    G = V @ V.T
    np.fill_diagonal(G, -np.inf)
    direct = float(G.max())
    assert max_pairwise_dot(V, block=256) == pytest.approx(direct, rel=0, abs=0)
