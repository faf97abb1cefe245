"""Optimizer baselines: step rules, momentum, oracle-driven runs."""

import math

import numpy as np
import pytest

from negcurve import (
    ArgumentError,
    FlatSpace,
    HyperbolicSpace,
    OracleConfig,
    ProjectedRGD,
    RGDUnconstrained,
    TangentNAG,
    oracle_init,
    run_against,
)


def test_constructor_validation():
    with pytest.raises(ArgumentError):
        RGDUnconstrained(0.0)
    with pytest.raises(ArgumentError):
        RGDUnconstrained(-1.0)
    fl = FlatSpace(2)
    with pytest.raises(ArgumentError):
        TangentNAG(1.0, 2.0, fl.origin())  # needs L >= mu
    with pytest.raises(ArgumentError):
        TangentNAG(1.0, 0.0, fl.origin())


def test_rgd_flat_quadratic_converges():
    fl = FlatSpace(2)
    z = np.array([3.0, -1.0])
    alg = RGDUnconstrained(step=1.0)  # f = |x-z|^2/2, L = 1: one-step exact
    x = alg.reset(fl, fl.origin())
    x = alg.update(x, None, x - z)
    assert np.allclose(x, z, atol=1e-15)


def test_projected_rgd_respects_ball():
    fl = FlatSpace(2)
    center = fl.origin()
    alg = ProjectedRGD(L=1.0, center=center, radius=1.0)
    x = alg.reset(fl, np.array([5.0, 0.0]))  # reset projects into the ball
    assert np.linalg.norm(x) <= 1.0 + 1e-12
    x = alg.update(x, None, np.array([-10.0, 0.0]))  # step would exit the ball
    assert np.linalg.norm(x) <= 1.0 + 1e-12


def test_tangent_nag_matches_classical_nag_flat():
    # on flat space the tangent-launch scheme IS Nesterov's method
    fl = FlatSpace(2)
    A = np.diag([100.0, 1.0])
    z = np.array([1.0, 1.0])
    grad = lambda x: A @ (x - z)
    L, mu = 100.0, 1.0
    alg = TangentNAG(L, mu, fl.origin())
    x = alg.reset(fl, fl.origin())
    beta = (math.sqrt(L / mu) - 1.0) / (math.sqrt(L / mu) + 1.0)
    xs, ys = np.zeros(2), np.zeros(2)
    for _ in range(240):
        x = alg.update(x, None, grad(x))
        xn = ys - grad(ys) / L
        ys = xn + beta * (xn - xs)
        xs = xn
        assert np.allclose(x, ys, atol=1e-10)  # tracks the classical y-iterate
    # and it converges fast on the ill-conditioned quadratic
    assert np.linalg.norm(xs - z) <= 1e-8
    # while plain gradient descent is nowhere close at the same budget
    xg = np.zeros(2)
    for _ in range(240):
        xg = xg - grad(xg) / L
    assert np.linalg.norm(xg - z) > 1e-2


def test_zero_momentum_nag_is_gd():
    fl = FlatSpace(2)
    grad = lambda x: x - np.array([2.0, 0.0])
    nag = TangentNAG(1.0, 1.0, fl.origin())  # kappa = 1 -> beta = 0
    gd = RGDUnconstrained(1.0)
    xn = nag.reset(fl, fl.origin())
    xg = gd.reset(fl, fl.origin())
    for _ in range(5):
        xn = nag.update(xn, None, grad(xn))
        xg = gd.update(xg, None, grad(xg))
        assert np.array_equal(xn, xg)


def test_run_against_contract():
    h2 = HyperbolicSpace(2, -1.0)
    o = h2.origin()
    cands = h2.ball_packing(o, 10.0, count_cap=8, seed=0)
    cfg = OracleConfig(h2, o, 10.0, 10.0, 2.0, list(cands))
    st = oracle_init(cfg)
    alg = ProjectedRGD(L=2.0 * 10.0 + 1.5, center=o, radius=10.0)
    res = run_against(alg, st, 16)
    assert res.n_queries == 16
    assert len(res.transcript.records) == 16
    assert res.verify["ok"]
    assert all(a >= 1 for a in res.active_sizes)
    assert res.first_hit is None or 0 <= res.first_hit < 16
    with pytest.raises(ArgumentError):
        run_against(alg, st, 0)


def test_rgd_descends_hyperbolic_sqdist():
    h2 = HyperbolicSpace(2, -1.0)
    o = h2.origin()
    z = h2.exp(o, h2.from_tangent_coords(o, np.array([2.0, 1.0])))
    L = 4.0 / math.tanh(4.0)  # smoothness over the relevant ball
    alg = RGDUnconstrained(1.0 / L)
    x = alg.reset(h2, o)
    for _ in range(200):
        x = alg.update(x, None, -h2.log(x, z))
    assert h2.dist(x, z) <= 1e-6
