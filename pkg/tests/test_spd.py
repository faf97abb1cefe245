"""Symmetric positive-definite manifold: metric, curvature, det-one slice."""

import math

import numpy as np
import pytest

from negcurve import SPDSpace
from negcurve.spd import jacobi_eigh

SQRT2 = 1.4142135623730950  # frozen: mpmath sqrt(2)


@pytest.fixture(scope="module")
def p3():
    return SPDSpace(3, det_one=True)


def rand_sym(rng, n, traceless=False):
    X = rng.normal(size=(n, n))
    X = X + X.T
    if traceless:
        X = X - np.trace(X) / n * np.eye(n)
    return X


def test_jacobi_eigh_matches_numpy():
    rng = np.random.default_rng(0)
    for _ in range(25):
        A = rand_sym(rng, 4)
        w, V = jacobi_eigh(A)
        w_np = np.sort(np.linalg.eigvalsh(A))
        assert np.max(np.abs(np.sort(w) - w_np)) <= 1e-12 * max(1.0, np.max(np.abs(w_np)))
        # eigendecomposition reconstructs A
        assert np.max(np.abs(V @ np.diag(w) @ V.T - A)) <= 1e-12 * max(1.0, np.max(np.abs(A)))
        assert np.max(np.abs(V.T @ V - np.eye(4))) <= 1e-13


def test_exact_geodesic_distance_diagonal(p3):
    # exp(I, diag(a)) = diag(e^a); affine-invariant dist = |a|_2
    a = np.array([0.6, -0.2, -0.4])  # traceless -> stays det-one
    P = p3.exp(np.eye(3), np.diag(a))
    assert np.max(np.abs(P - np.diag(np.exp(a)))) <= 1e-14
    assert p3.dist(np.eye(3), P) == pytest.approx(float(np.linalg.norm(a)), rel=1e-14)
    assert np.linalg.det(P) == pytest.approx(1.0, rel=1e-14)


def test_exp_log_round_trip(p3):
    # tangents at P must satisfy tr(P^-1 X) = 0: build them from the frame at P
    rng = np.random.default_rng(1)
    for _ in range(30):
        X = 0.8 * rand_sym(rng, 3, traceless=True)
        P = p3.exp(np.eye(3), X)
        Y = p3.from_tangent_coords(P, 0.8 * rng.normal(size=5))
        Q = p3.exp(P, Y)
        Y2 = p3.log(P, Q)
        assert np.max(np.abs(Y2 - Y)) <= 1e-10 * max(1.0, np.max(np.abs(Y)))
        assert p3.dist(P, Q) == pytest.approx(p3.norm(P, Y), rel=1e-12)


def test_transport_isometry(p3):
    rng = np.random.default_rng(2)
    for _ in range(20):
        P = p3.exp(np.eye(3), 0.7 * rand_sym(rng, 3, traceless=True))
        Q = p3.exp(np.eye(3), 0.7 * rand_sym(rng, 3, traceless=True))
        X = p3.from_tangent_coords(P, rng.normal(size=5))
        Y = p3.from_tangent_coords(P, rng.normal(size=5))
        tX = p3.parallel_transport(P, Q, X)
        tY = p3.parallel_transport(P, Q, Y)
        assert p3.inner(Q, tX, tY) == pytest.approx(p3.inner(P, X, Y), rel=1e-11, abs=1e-11)


def test_congruence_invariance(p3):
    # dist(A P A^T, A Q A^T) = dist(P, Q) for det(A) = +-1 congruences
    rng = np.random.default_rng(3)
    P = p3.exp(np.eye(3), 0.5 * rand_sym(rng, 3, traceless=True))
    Q = p3.exp(np.eye(3), 0.5 * rand_sym(rng, 3, traceless=True))
    M = rng.normal(size=(3, 3))
    A = M / abs(np.linalg.det(M)) ** (1.0 / 3.0)
    Pa = A @ P @ A.T
    Qa = A @ Q @ A.T
    Pa = (Pa + Pa.T) / 2
    Qa = (Qa + Qa.T) / 2
    assert p3.dist(Pa, Qa) == pytest.approx(p3.dist(P, Q), rel=1e-10)


def test_sectional_curvature_range(p3):
    rng = np.random.default_rng(4)
    for _ in range(200):
        X, Y = rand_sym(rng, 3), rand_sym(rng, 3)
        sec = p3.sectional_curvature(np.eye(3), X, Y)
        assert -0.5 - 1e-9 <= sec <= 1e-9
    # commuting plane: curvature 0 (flat of diagonal matrices)
    sec0 = p3.sectional_curvature(np.eye(3), np.diag([1.0, -1.0, 0.0]),
                                  np.diag([1.0, 1.0, -2.0]))
    assert abs(sec0) <= 1e-12


def test_bordered_plane_curvature(p3):
    # planes of bordered tangents realize the lower bound region -1/8 .. -1/2
    X = np.zeros((3, 3)); X[0, 2] = X[2, 0] = 1.0
    Y = np.zeros((3, 3)); Y[1, 2] = Y[2, 1] = 1.0
    assert p3.sectional_curvature(np.eye(3), X, Y) == pytest.approx(-0.125, abs=1e-12)
    # the off-diagonal/diagonal pair attains -1/2 exactly
    Xd = np.diag([1.0, -1.0, 0.0]) / math.sqrt(2.0)
    Xo = np.zeros((3, 3)); Xo[0, 1] = Xo[1, 0] = 1.0 / math.sqrt(2.0)
    assert p3.sectional_curvature(np.eye(3), Xd, Xo) == pytest.approx(-0.5, abs=1e-12)


def test_hyperbolic_slice_isometry(p3):
    hyp, K = p3.hyperbolic_slice()
    assert K == -0.125 and hyp.dim == 2
    o_h = hyp.origin()
    rng = np.random.default_rng(5)
    for _ in range(20):
        c1, c2 = rng.normal(size=2) * 2.0, rng.normal(size=2) * 2.0
        z1 = hyp.exp(o_h, hyp.from_tangent_coords(o_h, c1))
        z2 = hyp.exp(o_h, hyp.from_tangent_coords(o_h, c2))
        Q1 = p3.exp(np.eye(3), p3._slice_tangent_at_identity(c1))
        Q2 = p3.exp(np.eye(3), p3._slice_tangent_at_identity(c2))
        # the slice map is isometric: ambient distance == model distance
        assert p3.dist(Q1, Q2) == pytest.approx(hyp.dist(z1, z2), rel=1e-9, abs=1e-9)
        assert np.linalg.det(Q1) == pytest.approx(1.0, rel=1e-12)


def test_slice_totally_geodesic(p3):
    # ambient geodesic between two slice points stays in the slice
    c1, c2 = np.array([1.2, -0.4]), np.array([-0.8, 0.9])
    Q1 = p3.exp(np.eye(3), p3._slice_tangent_at_identity(c1))
    Q2 = p3.exp(np.eye(3), p3._slice_tangent_at_identity(c2))
    mid_ambient = p3.exp(Q1, 0.5 * p3.log(Q1, Q2))
    # slice midpoint, pushed forward
    hyp, _ = p3.hyperbolic_slice()
    o_h = hyp.origin()
    z1 = hyp.exp(o_h, hyp.from_tangent_coords(o_h, c1))
    z2 = hyp.exp(o_h, hyp.from_tangent_coords(o_h, c2))
    zm = hyp.exp(z1, 0.5 * hyp.log(z1, z2))
    cm = hyp.to_tangent_coords(o_h, hyp.log(o_h, zm))
    Qm = p3.exp(np.eye(3), p3._slice_tangent_at_identity(cm))
    assert p3.dist(mid_ambient, Qm) <= 1e-8


def test_spd2_is_curvature_half(p3=None):
    p2 = SPDSpace(2, det_one=True)
    hyp, K = p2.hyperbolic_slice()
    assert K == -0.5
    rng = np.random.default_rng(6)
    for _ in range(50):
        X, Y = rand_sym(rng, 2, traceless=True), rand_sym(rng, 2, traceless=True)
        if abs(X[0, 0] * Y[0, 1] - Y[0, 0] * X[0, 1]) < 1e-6:
            continue
        assert p2.sectional_curvature(np.eye(2), X, Y) == pytest.approx(-0.5, abs=1e-10)


def test_ball_packing_spd(p3):
    r = 8.0 / p3.sqrt_mK  # r sqrt(-K) = 8
    pts = p3.ball_packing(p3.origin(), r, count_cap=12, seed=0)
    assert len(pts) == 12
    for i in range(len(pts)):
        assert p3.dist(p3.origin(), pts[i]) <= 0.75 * r * (1 + 1e-9)
        assert np.linalg.det(pts[i]) == pytest.approx(1.0, rel=1e-10)
        for j in range(i + 1, len(pts)):
            assert p3.dist(pts[i], pts[j]) >= 0.5 * r * (1 - 1e-9)


def test_sqrt_mK_ambient(p3):
    assert p3.sqrt_mK == pytest.approx(SQRT2 / 2.0, rel=1e-15)  # sqrt(1/2)


def test_serialization(p3):
    P = p3.exp(np.eye(3), 0.4 * np.diag([1.0, 0.0, -1.0]))
    data = p3.serialize_point(P)
    assert len(data) == 9
    assert np.array_equal(p3.deserialize_point(data), P)


def test_det_one_validation(p3):
    with pytest.raises(Exception):
        p3.validate_point(2.0 * np.eye(3))  # det 8, not on the slice
    with pytest.raises(Exception):
        p3.validate_point(np.diag([1.0, 1.0, -1.0]))  # not positive definite
