"""Hyperbolic and flat space kernels: identities, round trips, divergence."""

import math

import numpy as np
import pytest

from negcurve import (
    ConfigError,
    FlatSpace,
    HyperbolicSpace,
    InvariantError,
    hyperbolic_law_of_cosines,
)
from negcurve.sampling import sphere_points

COSH_1 = 1.5430806348152437  # frozen: mpmath cosh(1)


@pytest.fixture(scope="module")
def h2():
    return HyperbolicSpace(2, -1.0)


def test_constructor_validation():
    with pytest.raises(ConfigError):
        HyperbolicSpace(0, -1.0)
    with pytest.raises(ConfigError):
        HyperbolicSpace(2, 0.0)
    with pytest.raises(ConfigError):
        HyperbolicSpace(2, 1.0)


def test_origin_and_validate(h2):
    o = h2.origin()
    assert o.shape == (3,)
    h2.validate_point(o)
    with pytest.raises(InvariantError):
        h2.validate_point(np.array([0.0, 0.0, 1.0]))  # lower sheet / not on sheet
    v = h2.from_tangent_coords(o, np.array([1.0, 0.0]))
    h2.validate_tangent(o, v)
    with pytest.raises(InvariantError):
        h2.validate_tangent(o, o)  # not Minkowski-orthogonal to o


def test_exact_radial_distances(h2):
    # moving distance s along a unit direction lands at distance s (exact identity)
    o = h2.origin()
    for s in (0.5, 1.0, 3.0, 10.0, 100.0, 600.0):
        x = h2.exp(o, h2.from_tangent_coords(o, np.array([s, 0.0])))
        assert h2.dist(o, x) == pytest.approx(s, rel=1e-14, abs=0.0)
    # antipodal directions: dist = 2s (triangle degenerates to a geodesic)
    for s in (1.0, 5.0, 50.0):
        xp = h2.exp(o, h2.from_tangent_coords(o, np.array([s, 0.0])))
        xm = h2.exp(o, h2.from_tangent_coords(o, np.array([-s, 0.0])))
        assert h2.dist(xp, xm) == pytest.approx(2.0 * s, rel=1e-13)


def test_cosh_identity_against_frozen_value(h2):
    # point at distance 1: time coordinate is cosh(1) (hyperboloid definition)
    o = h2.origin()
    x = h2.exp(o, h2.from_tangent_coords(o, np.array([1.0, 0.0])))
    assert x[0] == pytest.approx(COSH_1, rel=5e-16)


def test_curvature_scaling():
    # H^2 with K = -1/4 is H^2(-1) with all lengths doubled
    a, b = HyperbolicSpace(2, -1.0), HyperbolicSpace(2, -0.25)
    oa, ob = a.origin(), b.origin()
    ya = a.exp(oa, a.from_tangent_coords(oa, np.array([1.3, 0.7])))
    yb = b.exp(ob, b.from_tangent_coords(ob, np.array([2.6, 1.4])))
    assert b.dist(ob, yb) == pytest.approx(2.0 * a.dist(oa, ya), rel=1e-14)


def test_right_angle_law_of_cosines_matches_acosh(h2):
    # independent route: hyperbolic Pythagoras cosh(a) = cosh(b) cosh(c)
    for b, c in ((0.5, 0.8), (2.0, 3.0), (7.0, 1.0)):
        got = hyperbolic_law_of_cosines(h2, b, c, math.pi / 2.0)
        want = math.acosh(math.cosh(b) * math.cosh(c))
        assert got == pytest.approx(want, rel=1e-12)
    # degenerate angles: alpha=0 -> |b-c|, alpha=pi -> b+c
    assert hyperbolic_law_of_cosines(h2, 2.0, 5.0, 0.0) == pytest.approx(3.0, rel=1e-9)
    assert hyperbolic_law_of_cosines(h2, 2.0, 5.0, math.pi) == pytest.approx(7.0, rel=1e-12)


def test_law_of_cosines_against_direct_distance(h2):
    o = h2.origin()
    rng = np.random.default_rng(5)
    for _ in range(300):
        b = float(rng.uniform(0.1, 9.0))
        c = float(rng.uniform(0.1, 9.0))
        alpha = float(rng.uniform(0.05, math.pi - 0.05))
        y = h2.exp(o, h2.from_tangent_coords(o, np.array([b, 0.0])))
        z = h2.exp(o, h2.from_tangent_coords(
            o, c * np.array([math.cos(alpha), math.sin(alpha)])))
        assert hyperbolic_law_of_cosines(h2, b, c, alpha) == pytest.approx(
            h2.dist(y, z), rel=1e-9, abs=1e-9)


def test_exp_log_round_trips(h2):
    o = h2.origin()
    rng = np.random.default_rng(0)
    for _ in range(200):
        cx = rng.normal(size=2) * 3.0
        x = h2.exp(o, h2.from_tangent_coords(o, cx))
        cv = rng.normal(size=2) * 2.0
        v = h2.from_tangent_coords(x, cv)
        y = h2.exp(x, v)
        v2 = h2.log(x, y)
        assert h2.norm(x, v2 - v) <= 1e-9 * max(1.0, h2.norm(x, v))
        # and exp(log) round trip
        y2 = h2.exp(x, h2.log(x, y))
        assert h2.dist(y, y2) <= 1e-9


def test_parallel_transport_is_isometric(h2):
    o = h2.origin()
    rng = np.random.default_rng(1)
    for _ in range(100):
        x = h2.exp(o, h2.from_tangent_coords(o, rng.normal(size=2) * 2.0))
        y = h2.exp(o, h2.from_tangent_coords(o, rng.normal(size=2) * 2.0))
        u = h2.from_tangent_coords(x, rng.normal(size=2))
        v = h2.from_tangent_coords(x, rng.normal(size=2))
        tu, tv = h2.parallel_transport(x, y, u), h2.parallel_transport(x, y, v)
        h2.validate_tangent(y, tu, tol=1e-7)
        assert h2.inner(y, tu, tv) == pytest.approx(h2.inner(x, u, v), rel=1e-8, abs=1e-8)
    # transporting log(x->y) gives -log(y->x) (geodesic symmetry)
    x = h2.exp(o, h2.from_tangent_coords(o, np.array([1.0, 2.0])))
    y = h2.exp(o, h2.from_tangent_coords(o, np.array([-0.5, 0.4])))
    t = h2.parallel_transport(x, y, h2.log(x, y))
    assert h2.norm(y, t + h2.log(y, x)) <= 1e-12 * h2.dist(x, y)


def test_dist_many_and_exp_many_match_scalar(h2):
    o = h2.origin()
    rng = np.random.default_rng(2)
    Z = np.stack([h2.exp(o, h2.from_tangent_coords(o, rng.normal(size=2) * 4.0))
                  for _ in range(32)])
    x = h2.exp(o, h2.from_tangent_coords(o, np.array([0.3, -1.1])))
    many = h2.dist_many(x, Z)
    for i in range(32):
        assert many[i] == pytest.approx(h2.dist(x, Z[i]), rel=1e-13, abs=1e-13)
    V = np.stack([h2.from_tangent_coords(x, rng.normal(size=2)) for _ in range(16)])
    E = h2.exp_many(x, V)
    for i in range(16):
        assert h2.dist(E[i], h2.exp(x, V[i])) <= 1e-13


def test_project_ball(h2):
    o = h2.origin()
    far = h2.exp(o, h2.from_tangent_coords(o, np.array([9.0, 0.0])))
    p = h2.project_ball(o, 2.0, far)
    assert h2.dist(o, p) <= 2.0 * (1.0 + 1e-12)
    assert h2.dist(o, p) == pytest.approx(2.0, rel=1e-12)
    near = h2.exp(o, h2.from_tangent_coords(o, np.array([1.0, 0.5])))
    assert h2.point_equal(h2.project_ball(o, 2.0, near), near)  # inside: unchanged


def test_geodesics_diverge_frozen_values(h2):
    # frozen: mpmath endpoint distances at the default angle e^{1 - 2s/3}
    frozen = {3.0: 2.7320519087375869, 6.0: 4.6330324277633957,
              9.0: 6.6163801506708654, 12.0: 8.6140686700783604}
    o = h2.origin()
    for s, want in frozen.items():
        gap = h2.geodesics_diverge_gap(o, s)
        assert gap == pytest.approx(want, rel=1e-12)
        assert gap >= (2.0 / 3.0) * s
    with pytest.raises(Exception):
        h2.geodesics_diverge_gap(o, 2.0)  # below the s sqrt(-K) >= 3 floor


def test_ball_packing_contract(h2):
    o = h2.origin()
    r = 8.0
    pts = h2.ball_packing(o, r, count_cap=40, seed=0)
    assert len(pts) == 40  # e^{2 * 8/8} = e^2 ... cap binds only if supply suffices
    for i in range(len(pts)):
        assert h2.dist(o, pts[i]) <= 0.75 * r * (1 + 1e-12)
        for j in range(i + 1, len(pts)):
            assert h2.dist(pts[i], pts[j]) >= 0.5 * r * (1 - 1e-12)
    # determinism
    pts2 = h2.ball_packing(o, r, count_cap=40, seed=0)
    assert np.array_equal(pts, pts2)


def test_serialization_round_trip(h2):
    o = h2.origin()
    x = h2.exp(o, h2.from_tangent_coords(o, np.array([1.234567890123456, -0.9876])))
    data = h2.serialize_point(x)
    assert isinstance(data, list)
    back = h2.deserialize_point(data)
    assert np.array_equal(x, back)  # bitwise
    v = h2.from_tangent_coords(x, np.array([0.25, -1.5]))
    assert np.array_equal(v, h2.deserialize_tangent(h2.serialize_tangent(v)))


def test_overflow_guard(h2):
    o = h2.origin()
    from negcurve import OverflowRangeError
    with pytest.raises(OverflowRangeError):
        h2.exp(o, h2.from_tangent_coords(o, np.array([800.0, 0.0])))


def test_flat_space_basics():
    f = FlatSpace(3)
    o = f.origin()
    assert np.array_equal(o, np.zeros(3))
    x = np.array([1.0, 2.0, 2.0])
    assert f.dist(o, x) == 3.0
    assert np.array_equal(f.exp(o, x), x)
    assert np.array_equal(f.log(o, x), x)
    assert np.array_equal(f.parallel_transport(o, x, x), x)
    p = f.project_ball(o, 1.5, x)
    assert f.dist(o, p) == pytest.approx(1.5, rel=1e-15)
    assert f.sqrt_mK == 0.0
    assert np.array_equal(f.deserialize_point(f.serialize_point(x)), x)


def test_sphere_points_are_unit():
    for dim in (2, 3, 5):
        U = sphere_points(100, dim, seed=1)
        assert U.shape == (100, dim)
        assert np.max(np.abs(np.linalg.norm(U, axis=1) - 1.0)) <= 1e-12
