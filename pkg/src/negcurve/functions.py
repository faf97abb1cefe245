r"""Smooth geodesically convex building blocks and perturbation bumps.

This module provides the function-construction layer used by the resisting
oracle:

- squared-distance base objective  D_z(x) = dist(x, z)^2 / 2  (1-strongly
  geodesically convex; smoothness grows linearly with distance times
  sqrt(-K));
- compactly supported radial bumps built from the cutoff
  phi_R(t) = exp(2t / (2t - R^2)) for t < R^2/2 (0 beyond): "gradient" bumps
  prescribe an exact gradient at a probe point, "value" bumps prescribe an
  exact value with zero gradient, combined bumps prescribe both;
- amplitude/gradient budget constants a(R), g(R) and the inverse of g;
- a C^2 monotone step t(tau) and the induced radial smooth extension that
  equals an inner function inside radius r and the pure squared distance
  outside radius R_out >= 2^11 r, preserving uniform convexity in between;
- HardFunction: squared distance + bump list (+ optional extension), with
  exact evaluation, gradients, bit-exact serialization;
- finite-difference and second-difference verification utilities.

Curvature enters only through sqrt(-K_lo) of the space (`space.sqrt_mK`),
the pessimistic constant-curvature comparison value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .errors import ArgumentError, ConfigError, InvariantError
from .flat import FlatSpace
from .hyperbolic import HyperbolicSpace
from .spd import SPDSpace

_E_THIRD = math.exp(-1.0 / 3.0)  # phi_R at the probe offset t = R^2/8


def space_from_descriptor(d: dict):
    """Rebuild a manifold object from its descriptor() dict."""
    kind = d.get("kind")
    if kind == "hyperbolic":
        return HyperbolicSpace(int(d["dim"]), float(d["K"]))
    if kind == "spd":
        return SPDSpace(int(d["n"]), bool(d["det_one"]))
    if kind == "flat":
        return FlatSpace(int(d["dim"]))
    raise ConfigError(f"unknown manifold descriptor {d!r}")


# ----------------------------------------------------------- base objective


def sqdist_value(space, z, x) -> float:
    """D_z(x) = dist(x, z)^2 / 2."""
    d = space.dist(x, z)
    return 0.5 * d * d


def sqdist_grad(space, z, x):
    """grad D_z(x) = -log_x(z)."""
    return -space.log(x, z)


def sqdist_smoothness(r: float, sqrt_mK: float) -> float:
    """Largest Hessian eigenvalue of D_z over B(z, r): r sqrt(-K) coth(r sqrt(-K))."""
    t = r * sqrt_mK
    if t == 0.0:
        return 1.0
    if t < 1e-8:
        return 1.0 + t * t / 3.0
    return t / math.tanh(t)


# ------------------------------------------------------------------- cutoff


def phi(R: float, t: float) -> float:
    """phi_R(t) = exp(2t / (2t - R^2)) for t < R^2/2, else 0."""
    if not (R > 0.0):
        raise ArgumentError(f"phi: R must be > 0, got {R}")
    if t >= 0.5 * R * R:
        return 0.0
    if t <= 0.0:
        return 1.0 if t == 0.0 else math.exp(2.0 * t / (2.0 * t - R * R))
    return math.exp(2.0 * t / (2.0 * t - R * R))


def phi_d1(R: float, t: float) -> float:
    """d/dt phi_R(t) = -phi_R(t) * 2 R^2 / (R^2 - 2t)^2."""
    if not (R > 0.0):
        raise ArgumentError(f"phi_d1: R must be > 0, got {R}")
    if t >= 0.5 * R * R:
        return 0.0
    den = R * R - 2.0 * t
    return -phi(R, t) * 2.0 * R * R / (den * den)


def phi_d2(R: float, t: float) -> float:
    """Second derivative of phi_R: (u'' + u'^2) phi with u = 2t/(2t - R^2)."""
    if not (R > 0.0):
        raise ArgumentError(f"phi_d2: R must be > 0, got {R}")
    if t >= 0.5 * R * R:
        return 0.0
    den = 2.0 * t - R * R  # negative on the support
    u1 = -2.0 * R * R / (den * den)
    u2 = 8.0 * R * R / (den * den * den)
    return (u2 + u1 * u1) * phi(R, t)


# ------------------------------------------------------- budget constants


def a_of(R: float, sqrt_mK: float) -> float:
    """Value-amplitude budget a(R) = R / (4 (4 sqrt(-K) + 55/R))."""
    if not (R > 0.0):
        raise ArgumentError(f"a_of: R must be > 0, got {R}")
    return R / (4.0 * (4.0 * sqrt_mK + 55.0 / R))


def g_norm(R: float, sqrt_mK: float) -> float:
    """Gradient budget g(R) = 8 R / (e^{1/3} (1485 + 72 R sqrt(-K)))."""
    if not (R > 0.0):
        raise ArgumentError(f"g_norm: R must be > 0, got {R}")
    return 8.0 * R / (math.exp(1.0 / 3.0) * (1485.0 + 72.0 * R * sqrt_mK))


def g_norm_sup(sqrt_mK: float) -> float:
    """sup_R g(R) = 1 / (9 e^{1/3} sqrt(-K)) (approached as R -> inf)."""
    return 1.0 / (9.0 * math.exp(1.0 / 3.0) * sqrt_mK)


def g_norm_inv(y: float, sqrt_mK: float) -> float:
    """Inverse of g_norm: the unique R with g_norm(R) = y.

    g_norm is a monotone Moebius function of R, so the inverse is closed-form:
    R = 1485 y e^{1/3} / (8 - 72 sqrt(-K) y e^{1/3}).  This meets (and exceeds)
    a bisection on [0, 1e6/sqrt(-K)] to absolute tolerance 1e-14 of the scale.
    Raises ArgumentError for y outside [0, sup g) -- at or above the sup there
    is no finite preimage.
    """
    if y < 0.0 or not math.isfinite(y):
        raise ArgumentError(f"g_norm_inv: need y >= 0 and finite, got {y}")
    if y == 0.0:
        return 0.0
    ye = y * math.exp(1.0 / 3.0)
    den = 8.0 - 72.0 * sqrt_mK * ye
    if den <= 0.0:
        raise ArgumentError(
            f"g_norm_inv: y = {y} is at or above sup g = {g_norm_sup(sqrt_mK)}"
        )
    return 1485.0 * ye / den


# ------------------------------------------------------------------- bumps


@dataclass
class BumpSpec:
    """One radial bump A * phi_S(dist(x, anchor)^2 / 2), support radius S.

    kind 'gradient': anchor offset from the probe point, prescribes the probe
    gradient; kind 'value': anchored at the probe, prescribes the probe value
    with zero gradient; kind 'zero': identically zero (bookkeeping rounds).
    r_ball/w record the budget context the bump was issued under.
    """

    kind: str
    anchor: object
    support: float
    amplitude: float
    r_ball: float
    w: float
    payload: dict = field(default_factory=dict)


def bump_value(space, bump: BumpSpec, x) -> float:
    if bump.kind == "zero" or bump.amplitude == 0.0:
        return 0.0
    d = space.dist(x, bump.anchor)
    if d >= bump.support:
        return 0.0
    return bump.amplitude * phi(bump.support, 0.5 * d * d)


def bump_grad(space, bump: BumpSpec, x):
    if bump.kind == "zero" or bump.amplitude == 0.0:
        return space.zero_tangent(x)
    d = space.dist(x, bump.anchor)
    if d >= bump.support:
        return space.zero_tangent(x)
    dphi = phi_d1(bump.support, 0.5 * d * d)
    if dphi == 0.0:
        return space.zero_tangent(x)
    return (bump.amplitude * dphi) * (-space.log(x, bump.anchor))


def bump_from_gradient(space, x_k, r_ball: float, w: float, g, profile=None) -> BumpSpec:
    """Bump with support in B(x_k, r_ball) whose gradient at x_k is exactly g.

    Requires |g| <= g(r_ball)/w.  The support radius solves (3/2) R =
    g_inv(w |g|); the anchor sits at exp(x_k, (R/2) g^); the amplitude is the
    budget value a(R)/w, which reproduces g exactly at x_k (closed-form
    identity) and keeps gradient/Hessian within the per-query budgets
    1/(4 w sqrt(-K)) and 1/(4 w).
    """
    prof = profile if profile is not None else PaperProfile(space.sqrt_mK)
    if not (w >= 1.0):
        raise ArgumentError(f"bump_from_gradient: need w >= 1, got {w}")
    if not (r_ball > 0.0):
        raise ArgumentError(f"bump_from_gradient: need r_ball > 0, got {r_ball}")
    gn = space.norm(x_k, g)
    if gn == 0.0:
        return BumpSpec("zero", np.array(x_k, dtype=float), 0.0, 0.0, r_ball, w)
    limit = prof.g_norm(r_ball) / w
    if gn > limit * (1.0 + 1e-12):
        raise ArgumentError(
            f"bump_from_gradient: |g| = {gn} exceeds g(r_ball)/w = {limit}"
        )
    s_val = prof.g_norm_inv(w * gn)  # = (3/2) R
    R = (2.0 / 3.0) * s_val
    if not (R <= (2.0 / 3.0) * r_ball * (1.0 + 1e-12)):
        raise InvariantError(f"bump support {R} exceeds 2 r_ball/3 = {2*r_ball/3}")
    anchor = space.exp(x_k, (0.5 * R / gn) * np.asarray(g, float))
    amplitude = prof.a_of(R) / w
    return BumpSpec(
        "gradient",
        anchor,
        R,
        amplitude,
        r_ball,
        w,
        payload={"g": space.serialize_tangent(np.asarray(g, float)), "probe": space.serialize_point(x_k)},
    )


def gradient_bump_center_value(gn: float, w: float, sqrt_mK: float, profile=None) -> float:
    """Value of the gradient bump at its probe point: (3/8) |g| g_inv(w |g|)."""
    if gn == 0.0:
        return 0.0
    prof = profile if profile is not None else PaperProfile(sqrt_mK)
    return 0.375 * gn * prof.g_norm_inv(w * gn)


def value_bump(space, x_k, r_ball: float, w: float, fhat: float, profile=None) -> BumpSpec:
    """Bump anchored at x_k with value fhat and zero gradient at x_k.

    Requires |fhat| <= a(r_ball)/w; the bump is
    (fhat) * phi_{r_ball}(dist(x_k, .)^2 / 2)  (phi(0) = 1, phi'(0) finite and
    multiplied by the zero log at x_k, so the gradient vanishes there).
    """
    prof = profile if profile is not None else PaperProfile(space.sqrt_mK)
    if not (w >= 1.0):
        raise ArgumentError(f"value_bump: need w >= 1, got {w}")
    cap = prof.a_of(r_ball) / w
    if abs(fhat) > cap * (1.0 + 1e-12):
        raise ArgumentError(f"value_bump: |fhat| = {abs(fhat)} exceeds a(r_ball)/w = {cap}")
    return BumpSpec(
        "value",
        np.array(x_k, dtype=float),
        r_ball,
        float(fhat),
        r_ball,
        w,
        payload={"fhat": float(fhat)},
    )


def combined_bump(space, x_k, r_ball: float, w: float, f: float, g, profile=None) -> list[BumpSpec]:
    """Bumps prescribing value f and gradient g at x_k (value mode).

    Splits f into the gradient bump's own probe value plus a value bump:
    h = value_bump(f - (3/8)|g| g_inv(w|g|)) + gradient_bump(g).  Feasible f
    range: [-a(r_ball)/w + (3/8) r_ball g(r_ball)/w, a(r_ball)/w]; the
    leftover always fits the value budget on that range.
    """
    prof = profile if profile is not None else PaperProfile(space.sqrt_mK)
    gn = space.norm(x_k, g)
    lo = -prof.a_of(r_ball) / w + 0.375 * r_ball * prof.g_norm(r_ball) / w
    hi = prof.a_of(r_ball) / w
    if not (lo - 1e-12 * max(1.0, abs(lo)) <= f <= hi * (1.0 + 1e-12)):
        raise ArgumentError(f"combined_bump: f = {f} outside feasible [{lo}, {hi}]")
    gb = bump_from_gradient(space, x_k, r_ball, w, g, profile=prof)
    leftover = f - gradient_bump_center_value(gn, w, space.sqrt_mK, profile=prof)
    vb = value_bump(space, x_k, r_ball, w, leftover, profile=prof)
    return [vb, gb]


# -------------------------------------------------------- constants profiles


class PaperProfile:
    """Worst-case budget constants in closed form."""

    name = "paper"

    def __init__(self, sqrt_mK: float):
        self.sqrt_mK = float(sqrt_mK)

    def a_of(self, R: float) -> float:
        return a_of(R, self.sqrt_mK)

    def g_norm(self, R: float) -> float:
        return g_norm(R, self.sqrt_mK)

    def g_norm_inv(self, y: float) -> float:
        return g_norm_inv(y, self.sqrt_mK)


class EmpiricalProfile:
    """Per-radius budgets from 1-d envelope scans of the actual bump shape.

    For the unit-amplitude radial bump psi(rho) = phi_R(rho^2/2) the gradient
    envelope is max |psi'| and the Hessian envelope is
    max(|psi''|, |psi'| sqrt(-K) coth(sqrt(-K) rho)) (radial and tangential
    Hessian eigenvalues of a radial function on a K-curved space).  The
    admissible amplitude for weight w is the largest one keeping those under
    1/(4 w) and the gradient under 1/(4 w sqrt(-K)); the resulting prescribed
    gradient at the probe offset R/2 defines g_emp(R), which is larger than
    the closed-form worst-case constant (verified monotone on a log grid, and
    inverted by bisection).  Budgets are certified a posteriori by the
    verification suites, as this profile trades proofs for measurements.
    """

    name = "empirical"

    def __init__(self, sqrt_mK: float, n_scan: int = 2048):
        self.sqrt_mK = float(sqrt_mK)
        self.n_scan = int(n_scan)
        self._cache: dict[float, tuple[float, float, float]] = {}

    def _envelopes(self, R: float) -> tuple[float, float, float]:
        """(E_grad, E_hess, G_probe) of the unit-amplitude bump of support R."""
        got = self._cache.get(R)
        if got is not None:
            return got
        k = self.sqrt_mK
        rho = np.linspace(0.0, R, self.n_scan, endpoint=False)[1:]
        t = 0.5 * rho * rho
        p1 = np.array([phi_d1(R, ti) for ti in t])
        p2 = np.array([phi_d2(R, ti) for ti in t])
        psi1 = p1 * rho
        psi2 = p2 * rho * rho + p1
        coth = np.where(rho * k < 1e-8, 1.0 / np.maximum(rho * k, 1e-300),
                        1.0 / np.tanh(np.maximum(rho * k, 1e-300)))
        tangential = np.abs(psi1) * k * coth
        e_grad = float(np.max(np.abs(psi1)))
        e_hess = float(np.max(np.maximum(np.abs(psi2), tangential)))
        g_probe = float(abs(phi_d1(R, R * R / 8.0) * (R / 2.0)))
        out = (e_grad, e_hess, g_probe)
        self._cache[R] = out
        return out

    def a_of(self, R: float) -> float:
        """Largest admissible amplitude at w = 1 for a bump of support R."""
        e_grad, e_hess, _ = self._envelopes(R)
        return min(0.25 / e_hess, 0.25 / (self.sqrt_mK * e_grad))

    def g_norm(self, S: float) -> float:
        """Largest prescribable gradient (w = 1) staying inside a ball of
        radius S around the probe point (support 2S/3, anchor offset S/3)."""
        R = (2.0 / 3.0) * S
        _, _, g_probe = self._envelopes(R)
        return self.a_of(R) * g_probe

    def g_norm_inv(self, y: float) -> float:
        if y < 0.0 or not math.isfinite(y):
            raise ArgumentError(f"g_norm_inv: need y >= 0 and finite, got {y}")
        if y == 0.0:
            return 0.0
        lo, hi = 1e-9 / self.sqrt_mK, 1e6 / self.sqrt_mK
        if self.g_norm(hi) < y:
            raise ArgumentError(f"g_norm_inv: y = {y} above the empirical envelope range")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self.g_norm(mid) < y:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-15 * hi:
                break
        return 0.5 * (lo + hi)


def make_profile(name: str, sqrt_mK: float):
    if name == "paper":
        return PaperProfile(sqrt_mK)
    if name == "empirical":
        return EmpiricalProfile(sqrt_mK)
    raise ConfigError(f"unknown constants profile {name!r}")


# ----------------------------------------------------------- smooth step t


def _z_of(tau: float) -> tuple[float, float, float]:
    den = tau - tau * tau  # tau (1 - tau)
    z = (2.0 * tau - 1.0) / den
    z1 = (2.0 * tau * tau - 2.0 * tau + 1.0) / (den * den)
    z2 = 2.0 * (2.0 * tau - 1.0) * (tau * tau - tau + 1.0) / (den * den * den)
    return z, z1, z2


def smooth_step_t(tau: float) -> float:
    """C^2 step: 1 for tau <= 0, 0 for tau >= 1, t(tau) + t(1-tau) = 1.

    t(tau) = e^{-1/(1-tau)} / (e^{-1/(1-tau)} + e^{-1/tau}) evaluated stably
    as expit(-z) with z = (2 tau - 1)/(tau (1 - tau)).
    """
    if tau <= 0.0:
        return 1.0
    if tau >= 1.0:
        return 0.0
    z, _, _ = _z_of(tau)
    return float(expit(-z))


def smooth_step_derivs(tau: float) -> tuple[float, float, float]:
    """(t, t', t'') of the smooth step; t' in [-2, 0], |t''| <= 16."""
    if tau <= 0.0:
        return 1.0, 0.0, 0.0
    if tau >= 1.0:
        return 0.0, 0.0, 0.0
    z, z1, z2 = _z_of(tau)
    t = float(expit(-z))
    base = t * (1.0 - t)
    t1 = -base * z1
    t2 = -t1 * (1.0 - 2.0 * t) * z1 - base * z2
    return t, t1, t2


def t_inequality_check(c: float, n_grid: int = 100000):
    """min over a tau-grid in (0, 1/2) of 1 - t - |t'|/c, with its bound.

    The inequality 1 - t(tau) >= |t'(tau)|/c - 2 e^{-sqrt(c/2)} must hold for
    every c >= 9; returns (min_value, bound) with bound =
    -2 e^{-sqrt(c/2)} - 1e-12.  Raises ArgumentError for c < 9.
    """
    if not (c >= 9.0):
        raise ArgumentError(f"t_inequality_check: need c >= 9, got {c}")
    taus = np.linspace(0.0, 0.5, n_grid + 2)[1:-1]
    worst = math.inf
    for tau in taus:
        t, t1, _ = smooth_step_derivs(float(tau))
        worst = min(worst, 1.0 - t - abs(t1) / c)
    bound = -2.0 * math.exp(-math.sqrt(c / 2.0)) - 1e-12
    return worst, bound


# ------------------------------------------------------- smooth extension


@dataclass
class ExtensionSpec:
    """Radial blend: inner function inside r, squared distance outside R_out."""

    x_ref: object
    r: float
    r_out: float


def _extension_weights(space, ext: ExtensionSpec, x) -> tuple[float, float, float]:
    """(s, ds/dD, D) at x, where D = dist(x, x_ref)^2/2 and s = t(tau)."""
    dist = space.dist(x, ext.x_ref)
    D = 0.5 * dist * dist
    lo = 0.5 * ext.r * ext.r
    hi = 0.5 * ext.r_out * ext.r_out
    tau = (D - lo) / (hi - lo)
    t, t1, _ = smooth_step_derivs(tau)
    return t, t1 / (hi - lo), D


def check_extension_params(r: float, r_out: float) -> None:
    if not (r > 0.0):
        raise ArgumentError(f"smooth extension: need r > 0, got {r}")
    if r_out < 2.0 ** 11 * r:
        raise ArgumentError(
            f"smooth extension: need R_out >= 2^11 r = {2.0 ** 11 * r}, got {r_out}"
        )


def smooth_extension_value(space, ext: ExtensionSpec, value_fn, x) -> float:
    """F(x) = s f(x) + (1 - s) D(x); equals f inside r, D outside R_out."""
    s, _, D = _extension_weights(space, ext, x)
    if s == 0.0:
        return D
    f = value_fn(x)
    if s == 1.0:
        return f
    return s * f + (1.0 - s) * D


def smooth_extension_grad(space, ext: ExtensionSpec, value_fn, grad_fn, x):
    """grad F = s' (f - D) grad D + s grad f + (1 - s) grad D."""
    s, s1, D = _extension_weights(space, ext, x)
    grad_D = -space.log(x, ext.x_ref)
    if s == 0.0:
        return grad_D
    f = value_fn(x)
    g = grad_fn(x)
    if s == 1.0 and s1 == 0.0:
        return g
    return s1 * (f - D) * grad_D + s * np.asarray(g, float) + (1.0 - s) * grad_D


# ------------------------------------------------------------ hard function


@dataclass
class HardFunction:
    """Squared distance to a minimizer plus compact bumps (+ extension)."""

    space: object
    minimizer: object
    bumps: list
    extension: ExtensionSpec | None = None

    def _inner_value(self, x) -> float:
        v = sqdist_value(self.space, self.minimizer, x)
        for b in self.bumps:
            v += bump_value(self.space, b, x)
        return v

    def _inner_grad(self, x):
        g = np.asarray(sqdist_grad(self.space, self.minimizer, x), float)
        for b in self.bumps:
            g = g + bump_grad(self.space, b, x)
        return g

    def value(self, x) -> float:
        if self.extension is None:
            return self._inner_value(x)
        return smooth_extension_value(self.space, self.extension, self._inner_value, x)

    def grad(self, x):
        if self.extension is None:
            return self._inner_grad(x)
        return smooth_extension_grad(
            self.space, self.extension, self._inner_value, self._inner_grad, x
        )


def hard_value(h: HardFunction, x) -> float:
    return h.value(x)


def hard_grad(h: HardFunction, x):
    return h.grad(x)


def hardfn_to_jsonable(h: HardFunction) -> dict:
    """Serialize with full float64 fidelity (17 significant digits downstream)."""
    out = {
        "manifold": h.space.descriptor(),
        "minimizer": h.space.serialize_point(h.minimizer),
        "bumps": [
            {
                "kind": b.kind,
                "anchor": h.space.serialize_point(b.anchor) if b.kind != "zero"
                else h.space.serialize_point(np.asarray(b.anchor)),
                "support": float(b.support),
                "amplitude": float(b.amplitude),
                "r_ball": float(b.r_ball),
                "w": float(b.w),
                "payload": b.payload,
            }
            for b in h.bumps
        ],
    }
    if h.extension is not None:
        out["extension"] = {
            "x_ref": h.space.serialize_point(h.extension.x_ref),
            "r": float(h.extension.r),
            "r_out": float(h.extension.r_out),
        }
    return out


def hardfn_from_jsonable(data: dict) -> HardFunction:
    space = space_from_descriptor(data["manifold"])
    minimizer = np.asarray(data["minimizer"], float)
    if hasattr(space, "n"):
        minimizer = minimizer.reshape(space.n, space.n)
    bumps = []
    for b in data["bumps"]:
        anchor = np.asarray(b["anchor"], float)
        if hasattr(space, "n"):
            anchor = anchor.reshape(space.n, space.n)
        bumps.append(
            BumpSpec(
                b["kind"], anchor, float(b["support"]), float(b["amplitude"]),
                float(b["r_ball"]), float(b["w"]), dict(b.get("payload", {})),
            )
        )
    ext = None
    if "extension" in data:
        e = data["extension"]
        x_ref = np.asarray(e["x_ref"], float)
        if hasattr(space, "n"):
            x_ref = x_ref.reshape(space.n, space.n)
        ext = ExtensionSpec(x_ref, float(e["r"]), float(e["r_out"]))
    return HardFunction(space, minimizer, bumps, ext)


# ----------------------------------------------------------- verification


def fd_check(space, value_fn, grad_fn, x, directions=None, length_scale: float = 1.0,
             steps=(1e-3, 5e-4, 2.5e-4)) -> float:
    """Worst relative error of grad_fn against Richardson-extrapolated
    central geodesic differences of value_fn at x.

    Directional derivative along v:  (f(exp(x, h v)) - f(exp(x, -h v)))/(2h),
    extrapolated over the three dyadic steps (error O(h^4) after two levels).
    """
    if directions is None:
        directions = space.tangent_basis(x)
    g = np.asarray(grad_fn(x), float)
    worst = 0.0
    h0, h1, h2 = (s * length_scale for s in steps)
    for v in directions:
        v = np.asarray(v, float)
        nv = space.norm(x, v)
        if nv == 0.0:
            continue
        v = v / nv

        def central(h, v=v):
            return (value_fn(space.exp(x, h * v)) - value_fn(space.exp(x, -h * v))) / (2.0 * h)

        d0, d1, d2 = central(h0), central(h1), central(h2)
        r1 = (4.0 * d1 - d0) / 3.0
        r2 = (4.0 * d2 - d1) / 3.0
        extrap = (16.0 * r2 - r1) / 15.0
        target = space.inner(x, g, v)
        worst = max(worst, abs(extrap - target) / max(1.0, abs(target)))
    return worst


def geodesic_second_diff(space, value_fn, x, v, h: float) -> float:
    """[f(exp(x, h v)) - 2 f(x) + f(exp(x, -h v))]/h^2 for unit v."""
    return (value_fn(space.exp(x, h * v)) - 2.0 * value_fn(x)
            + value_fn(space.exp(x, -h * v))) / (h * h)
