"""Function construction: squared distance, bumps, profiles, step, extension.

Expected values marked "frozen" were computed independently with mpmath at
50 digits and pasted as literals; tests compare at stated tolerances.
"""

import math

import numpy as np
import pytest

from negcurve import (
    ArgumentError,
    EmpiricalProfile,
    ExtensionSpec,
    FlatSpace,
    HardFunction,
    HyperbolicSpace,
    InvariantError,
    PaperProfile,
    bump_from_gradient,
    bump_grad,
    bump_value,
    combined_bump,
    fd_check,
    g_norm,
    g_norm_inv,
    g_norm_sup,
    geodesic_second_diff,
    gradient_bump_center_value,
    hardfn_from_jsonable,
    hardfn_to_jsonable,
    make_profile,
    smooth_extension_grad,
    smooth_extension_value,
    smooth_step_derivs,
    smooth_step_t,
    space_from_descriptor,
    sqdist_grad,
    sqdist_smoothness,
    sqdist_value,
    t_inequality_check,
    value_bump,
)
from negcurve.functions import a_of, phi, phi_d1, phi_d2

E_M13 = 0.7165313105737893  # frozen: mpmath exp(-1/3)


@pytest.fixture(scope="module")
def h2():
    return HyperbolicSpace(2, -1.0)


# ------------------------------------------------------------ squared distance


def test_sqdist_basics(h2):
    o = h2.origin()
    z = h2.exp(o, h2.from_tangent_coords(o, np.array([2.0, 0.0])))
    assert sqdist_value(h2, z, z) == 0.0
    assert sqdist_value(h2, z, o) == pytest.approx(2.0, rel=1e-14)  # d^2/2
    g = sqdist_grad(h2, z, o)
    # gradient of d(z,.)^2/2 at x is -log_x(z); length = distance
    assert h2.norm(o, g) == pytest.approx(2.0, rel=1e-12)
    assert h2.norm(o, g + h2.log(o, z)) <= 1e-12


def test_sqdist_fd(h2):
    o = h2.origin()
    z = h2.exp(o, h2.from_tangent_coords(o, np.array([1.3, -0.4])))
    x = h2.exp(o, h2.from_tangent_coords(o, np.array([-0.5, 2.0])))
    err = fd_check(h2, lambda y: sqdist_value(h2, z, y),
                   lambda y: sqdist_grad(h2, z, y), x)
    assert err <= 1e-7


def test_sqdist_smoothness_formula():
    # L(r) = r sqrt(-K) / tanh(r sqrt(-K)); exact at the identity limits
    assert sqdist_smoothness(0.0, 1.0) == 1.0
    assert sqdist_smoothness(1.0, 1.0) == pytest.approx(1.0 / math.tanh(1.0), rel=1e-15)
    assert sqdist_smoothness(3.0, 2.0) == pytest.approx(6.0 / math.tanh(6.0), rel=1e-15)
    # flat limit
    assert sqdist_smoothness(5.0, 0.0) == 1.0


def test_sqdist_second_diff_strong_convexity(h2):
    # second differences along geodesics are >= 1 (and equal L at the center)
    o = h2.origin()
    z = h2.exp(o, h2.from_tangent_coords(o, np.array([3.0, 0.0])))
    for cx in ([0.0, 0.0], [1.0, 1.0], [-2.0, 0.5]):
        x = h2.exp(o, h2.from_tangent_coords(o, np.array(cx)))
        for v in h2.tangent_basis(x):
            sd = geodesic_second_diff(h2, lambda y: sqdist_value(h2, z, y), x, v, 1e-3)
            assert sd >= 1.0 - 1e-5


# ----------------------------------------------------------------- bump pieces


def test_phi_frozen_values():
    # frozen: phi_R(R^2/8) = exp(-1/3), phi_R'(R^2/8) = -(32/9) exp(-1/3) / R^2
    for R in (0.5, 1.0, 4.0):
        t = R * R / 8.0
        assert phi(R, t) == pytest.approx(E_M13, rel=5e-16)
        assert phi_d1(R, t) == pytest.approx(-(32.0 / 9.0) * E_M13 / (R * R), rel=1e-14)
    assert phi(1.0, 0.0) == 1.0
    assert phi(1.0, 0.5) == 0.0  # support boundary t = R^2/2
    assert phi(1.0, 0.7) == 0.0
    assert phi_d1(1.0, 0.5) == 0.0 and phi_d2(1.0, 0.5) == 0.0
    with pytest.raises(ArgumentError):
        phi(0.0, 0.1)


def test_phi_derivatives_fd():
    # mpmath-grade check is frozen above; here verify d1, d2 are consistent
    R = 1.7
    for t in np.linspace(0.01, 0.45 * R * R, 23):
        h = 1e-5 * R * R
        d1 = (phi(R, t + h) - phi(R, t - h)) / (2 * h)
        assert phi_d1(R, t) == pytest.approx(d1, rel=5e-6, abs=1e-12)
        d2 = (phi(R, t + h) - 2 * phi(R, t) + phi(R, t - h)) / (h * h)
        assert phi_d2(R, t) == pytest.approx(d2, rel=5e-3, abs=1e-7)


def test_a_of_budget_identity():
    # frozen algebra: (4 sqrt(-K)/R + 55/R^2) a(R) = 1/4 exactly
    for R in (0.2, 1.0, 3.0, 10.0):
        for sk in (0.5, 1.0, 2.0):
            assert (4.0 * sk / R + 55.0 / (R * R)) * a_of(R, sk) == pytest.approx(
                0.25, rel=1e-15)
    assert a_of(1.0, 1.0) == pytest.approx(1.0 / 236.0, rel=1e-15)  # frozen


def test_g_norm_frozen_and_inverse():
    # frozen: g_norm(1, 1) = 8/(e^{1/3} * 1557)
    assert g_norm(1.0, 1.0) == pytest.approx(0.003681599540520433, rel=5e-16)
    assert g_norm_sup(1.0) == pytest.approx(0.07961459006375436, rel=5e-16)
    for y in (1e-6, 1e-3, 0.01, 0.07):
        S = g_norm_inv(y, 1.0)
        assert g_norm(S, 1.0) == pytest.approx(y, rel=1e-12)
    with pytest.raises(ArgumentError):
        g_norm_inv(0.08, 1.0)  # above the sup
    with pytest.raises(ArgumentError):
        g_norm_inv(-1e-9, 1.0)


def test_gradient_bump_reproduces_gradient(h2):
    o = h2.origin()
    rng = np.random.default_rng(0)
    for trial in range(20):
        x = h2.exp(o, h2.from_tangent_coords(o, rng.normal(size=2)))
        r_ball = float(rng.uniform(0.3, 3.0))
        w = float(rng.uniform(1.0, 20.0))
        cap = g_norm(r_ball, 1.0) / w
        gc = rng.normal(size=2)
        gc *= rng.uniform(0.05, 0.97) * cap / np.linalg.norm(gc)
        g = h2.from_tangent_coords(x, gc)
        b = bump_from_gradient(h2, x, r_ball, w, g)
        got = bump_grad(h2, b, x)
        assert h2.norm(x, got - g) <= 1e-12 * max(1e-300, h2.norm(x, g))
        # support is contained in the requested ball
        assert h2.dist(x, b.anchor) + b.support <= r_ball * (1 + 1e-9)
        # value at the query point matches the closed form
        gn = h2.norm(x, g)
        want = gradient_bump_center_value(gn, w, 1.0)
        assert bump_value(h2, b, x) == pytest.approx(want, rel=1e-12)


def test_bump_zero_outside_support(h2):
    o = h2.origin()
    g = h2.from_tangent_coords(o, np.array([1e-4, 0.0]))
    b = bump_from_gradient(h2, o, 1.0, 2.0, g)
    u = h2.from_tangent_coords(b.anchor, np.array([0.0, 1.0]))
    y = h2.exp(b.anchor, (b.support * 1.0001) * u / h2.norm(b.anchor, u))
    assert bump_value(h2, b, y) == 0.0
    assert np.all(bump_grad(h2, b, y) == 0.0)
    y_in = h2.exp(b.anchor, (b.support * 0.9) * u / h2.norm(b.anchor, u))
    assert bump_value(h2, b, y_in) != 0.0


def test_bump_over_budget_raises(h2):
    o = h2.origin()
    cap = g_norm(1.0, 1.0) / 2.0
    g = h2.from_tangent_coords(o, np.array([cap * 1.01, 0.0]))
    with pytest.raises(ArgumentError):
        bump_from_gradient(h2, o, 1.0, 2.0, g)


def test_zero_gradient_gives_zero_bump(h2):
    o = h2.origin()
    b = bump_from_gradient(h2, o, 1.0, 2.0, h2.zero_tangent(o))
    assert b.kind == "zero"
    assert bump_value(h2, b, o) == 0.0


def test_gradient_budget_and_hessian_budget(h2):
    # per-bump budgets: |grad| <= 1/(4 w sqrt(-K)), |second diff| <= 1/(4w)
    o = h2.origin()
    rng = np.random.default_rng(3)
    for trial in range(5):
        r_ball, w = float(rng.uniform(0.5, 2.0)), float(rng.uniform(1.0, 8.0))
        cap = g_norm(r_ball, 1.0) / w
        g = h2.from_tangent_coords(o, np.array([0.9 * cap, 0.0]))
        b = bump_from_gradient(h2, o, r_ball, w, g)
        from negcurve.sampling import ball_points
        for p in ball_points(40, 2, seed=trial):
            y = h2.exp(b.anchor, h2.from_tangent_coords(b.anchor, p * b.support))
            assert h2.norm(y, bump_grad(h2, b, y)) <= 1.0 / (4.0 * w) + 1e-10
            for v in h2.tangent_basis(y):
                sd = geodesic_second_diff(h2, lambda q: bump_value(h2, b, q), y, v,
                                          1e-2 * b.support)
                assert abs(sd) <= 1.0 / (4.0 * w) + 1e-6


def test_value_bump_and_combined(h2):
    o = h2.origin()
    r_ball, w = 1.0, 3.0
    amp_cap = a_of(r_ball, 1.0) / w
    vb = value_bump(h2, o, r_ball, w, 0.5 * amp_cap)
    assert bump_value(h2, vb, o) == pytest.approx(0.5 * amp_cap, rel=1e-15)
    with pytest.raises(ArgumentError):
        value_bump(h2, o, r_ball, w, 1.1 * amp_cap)
    # combined: desired value + desired gradient at the anchor point
    cap = g_norm(r_ball, 1.0) / w
    g = h2.from_tangent_coords(o, np.array([0.0, 0.4 * cap]))
    f_lo = -amp_cap + 0.375 * h2.norm(o, g) * g_norm_inv(w * h2.norm(o, g), 1.0)
    f_hat = 0.5 * (f_lo + amp_cap)
    bumps = combined_bump(h2, o, r_ball, w, f_hat, g)
    v = sum(bump_value(h2, b, o) for b in bumps)
    gg = sum(np.asarray(bump_grad(h2, b, o)) for b in bumps)
    assert v == pytest.approx(f_hat, rel=1e-12)
    assert h2.norm(o, gg - g) <= 1e-12 * max(1e-300, h2.norm(o, g))


def test_profiles(h2):
    paper = make_profile("paper", 1.0)
    emp = make_profile("empirical", 1.0)
    assert isinstance(paper, PaperProfile) and isinstance(emp, EmpiricalProfile)
    from negcurve import ConfigError
    with pytest.raises(ConfigError):
        make_profile("bogus", 1.0)
    # empirical admits at least the paper amplitudes (it measures, paper bounds)
    for R in (0.5, 1.0, 2.0):
        assert emp.a_of(R) >= a_of(R, 1.0)
        S = 1.5 * R
        assert emp.g_norm(S) >= g_norm(S, 1.0)
    # empirical bumps still reproduce gradients
    o = h2.origin()
    cap = emp.g_norm(1.0) / 2.0
    g = h2.from_tangent_coords(o, np.array([0.5 * cap, 0.0]))
    b = bump_from_gradient(h2, o, 1.0, 2.0, g, profile=emp)
    assert h2.norm(o, bump_grad(h2, b, o) - g) <= 1e-10 * cap


# ------------------------------------------------------------------ smooth step


def test_smooth_step_exact_properties():
    assert smooth_step_t(0.0) == 1.0
    assert smooth_step_t(-3.0) == 1.0
    assert smooth_step_t(1.0) == 0.0
    assert smooth_step_t(2.0) == 0.0
    t, d1, d2 = smooth_step_derivs(0.5)
    assert t == 0.5 and d1 == -2.0  # exact midpoint values
    for tau in np.linspace(0.01, 0.99, 37):
        t, d1, d2 = smooth_step_derivs(float(tau))
        assert 0.0 <= t <= 1.0 and d1 <= 0.0  # saturates to exactly 0/1 near edges
        assert abs(d2) <= 16.0
    # derivative consistency by finite differences
    for tau in (0.2, 0.5, 0.8):
        h = 1e-6
        fd1 = (smooth_step_t(tau + h) - smooth_step_t(tau - h)) / (2 * h)
        assert smooth_step_derivs(tau)[1] == pytest.approx(fd1, rel=1e-8)


def test_t_inequality_margins():
    for c in (9.0, 25.0, 100.0, 1e4):
        margin, bound = t_inequality_check(c)
        assert margin >= bound
        assert bound == pytest.approx(-2.0 * math.exp(-math.sqrt(c / 2.0)) - 1e-12)
    with pytest.raises(ArgumentError):
        t_inequality_check(4.0)


# -------------------------------------------------------------------- extension


def test_extension_identities_and_convexity(h2):
    o = h2.origin()
    r, r_out = 0.01, 2.0**11 * 0.01
    ext = ExtensionSpec(o, r, r_out)
    inner_v = lambda y: sqdist_value(h2, o, y)
    # inside: exact identity with the inner function
    x_in = h2.exp(o, h2.from_tangent_coords(o, np.array([0.4 * r, 0.1 * r])))
    assert smooth_extension_value(h2, ext, inner_v, x_in) == inner_v(x_in)
    # far outside: exact d(x_ref,.)^2/2
    x_out = h2.exp(o, h2.from_tangent_coords(o, np.array([1.2 * r_out, 0.0])))
    d = h2.dist(o, x_out)
    assert smooth_extension_value(h2, ext, inner_v, x_out) == pytest.approx(
        0.5 * d * d, rel=1e-15)
    # gradient consistency across the band
    inner_g = lambda y: sqdist_grad(h2, o, y)
    for rho in (2.0 * r, 0.1 * r_out, 0.7 * r_out):
        x = h2.exp(o, h2.from_tangent_coords(o, np.array([rho, 0.3 * rho])))
        err = fd_check(h2, lambda y: smooth_extension_value(h2, ext, inner_v, y),
                       lambda y: smooth_extension_grad(h2, ext, inner_v, inner_g, y),
                       x, length_scale=min(1.0, rho))
        assert err <= 1e-6


def test_extension_param_check():
    from negcurve.functions import check_extension_params

    check_extension_params(1.0, 2.0**11)  # boundary is admissible
    with pytest.raises(ArgumentError):
        check_extension_params(1.0, 100.0)  # below 2^11 r
    with pytest.raises(ArgumentError):
        check_extension_params(0.0, 2.0**11)


# ------------------------------------------------------------ hard function i/o


def test_hardfn_serialization_bitwise(h2):
    o = h2.origin()
    cap = g_norm(0.5, 1.0) / 2.0
    g = h2.from_tangent_coords(o, np.array([0.3 * cap, 0.1 * cap]))
    b = bump_from_gradient(h2, o, 0.5, 2.0, g)
    h = HardFunction(h2, h2.exp(o, h2.from_tangent_coords(o, np.array([2.0, 1.0]))),
                     [b], ExtensionSpec(o, 8.0, 8.0 * 2**11))
    data = hardfn_to_jsonable(h)
    h2_back = hardfn_from_jsonable(data)
    x = h2.exp(o, h2.from_tangent_coords(o, np.array([0.2, -0.1])))
    assert h2_back.value(x) == h.value(x)  # bitwise identical evaluation
    assert np.array_equal(h2_back.grad(x), h.grad(x))
    assert h2_back.space.descriptor() == h2.descriptor()


def test_space_from_descriptor_round_trip():
    for sp in (HyperbolicSpace(3, -0.25), FlatSpace(4)):
        sp2 = space_from_descriptor(sp.descriptor())
        assert sp2.descriptor() == sp.descriptor()
    from negcurve import SPDSpace
    sp = SPDSpace(3, det_one=True)
    assert space_from_descriptor(sp.descriptor()).descriptor() == sp.descriptor()
