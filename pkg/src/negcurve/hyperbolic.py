r"""Hyperboloid model of the d-dimensional hyperbolic space of curvature K < 0.

Model
-----
Points live on the upper sheet of the hyperboloid embedded in Minkowski space
R^{d,1} with inner product

    <u, v>_M = -u_0 v_0 + sum_{i>=1} u_i v_i ,

normalized so that <x, x>_M = 1/K with x_0 > 0.  A point is represented by its
(d+1,) float64 coordinate array; a tangent vector at x is a (d+1,) array v
with <x, v>_M = 0 (the base point is always passed explicitly alongside).

Distances satisfy cosh(dist * sqrt(-K)) = K * <x, y>_M.

Numerical strategy
------------------
Naive Minkowski products between far-from-origin points lose all precision
(the terms grow like e^{2 rho} and cancel).  Every pairwise operation here is
therefore computed in polar/difference form.  Writing a~ = asinh(|x_s| sqrt(-K))
(the scaled radius, obtained without ever touching x_0) and u^ = x_s/|x_s|,

    cosh(d~) - 1 = [cosh(a~ - b~) - 1] + sinh(a~) sinh(b~) |u^ - v^|^2 / 2 ,

a sum of two nonnegative terms with no cancellation; the arccosh is then
evaluated in log-domain so that no intermediate ever overflows even when the
result d~ is far beyond 700.

Hard range policy: any cosh/sinh *argument* beyond 700 raises
:class:`~negcurve.errors.OverflowRangeError` (the representable regime is
surfaced explicitly, it is never silently clamped).

Tangential resolution: at radius rho~ from the coordinate origin, ambient
float64 coordinates carry the direction of a point to absolute angular
precision ~1e-16, so the tangential component of a computed tangent vector is
meaningful only while it exceeds ~eps * e^{rho~} * scale.  Beyond that floor
the decomposition helpers snap the perpendicular part to zero (the correct
rounding of the true geometry); all norms/inner products/tangent coordinates
at large radius go through this stable radial/perpendicular decomposition.
"""

from __future__ import annotations

import math

import numpy as np

from . import kernels, sampling
from .errors import (
    ArgumentError,
    ConfigError,
    InvariantError,
    OverflowRangeError,
    ResourceError,
    VerificationError,
)

# Hard cutoff for cosh/sinh arguments (spec'd overflow policy).
TRIG_ARG_LIMIT = 700.0

# Radius (in curvature-scaled units) up to which the radial coefficient of a
# tangent is read off with the naive Minkowski product (best at small radius);
# beyond it the ratio form v_0/sinh(a~) is used (stable at large radius).
_NAIVE_RADIUS = 6.0

_LN2 = math.log(2.0)


def _safe_norm(v: np.ndarray) -> float:
    """Euclidean norm robust to entries beyond 1e154 (scaled internally)."""
    m = float(np.max(np.abs(v))) if v.size else 0.0
    if m == 0.0 or not math.isfinite(m):
        return m
    if m < 1e150:
        return float(math.sqrt(float(np.dot(v, v))))
    w = v / m
    return m * float(math.sqrt(float(np.dot(w, w))))


def _logsinh(t: float) -> float:
    """log(sinh(t)) for t > 0, stable for all magnitudes; -inf at t = 0."""
    if t <= 0.0:
        return -math.inf
    if t < 1.0:
        return math.log(math.sinh(t))
    return t + math.log1p(-math.exp(-2.0 * t)) - _LN2


def _arccosh1p_from_log(log_a: float) -> float:
    """arccosh(1 + A) given log(A); exact for A in [0, inf), never overflows."""
    if log_a == -math.inf:
        return 0.0
    if log_a > 700.0:
        return log_a + _LN2
    if log_a < -700.0:
        return math.sqrt(2.0) * math.exp(0.5 * log_a)
    a = math.exp(log_a)
    return math.log1p(a + math.sqrt(a) * math.sqrt(a + 2.0))


def _sinhc(t: float) -> float:
    """sinh(t)/t with the removable singularity filled in."""
    if abs(t) < 1e-8:
        return 1.0 + t * t / 6.0
    return math.sinh(t) / t


def _row_norms(M: np.ndarray) -> np.ndarray:
    """Euclidean norms of the rows, robust to entries beyond 1e154."""
    m = np.max(np.abs(M), axis=1)
    safe = np.where(m > 0.0, m, 1.0)
    scaled = M / safe[:, None]
    return safe * np.sqrt(np.einsum("ij,ij->i", scaled, scaled))


def _logsinh_vec(t: np.ndarray) -> np.ndarray:
    """Vectorized log(sinh(t)) for t >= 0; -inf at 0."""
    t = np.asarray(t, float)
    out = np.empty_like(t)
    small = t < 1.0
    with np.errstate(divide="ignore"):
        out[small] = np.log(np.sinh(t[small]))
    big = ~small
    out[big] = t[big] + np.log1p(-np.exp(-2.0 * t[big])) - _LN2
    return out


def _arccosh1p_from_log_vec(log_a: np.ndarray) -> np.ndarray:
    """Vectorized arccosh(1 + e^{log_a}), same branches as the scalar form."""
    la = np.asarray(log_a, float)
    out = np.empty_like(la)
    hi = la > 700.0
    lo = la < -700.0
    mid = ~(hi | lo)
    out[hi] = la[hi] + _LN2
    with np.errstate(divide="ignore"):
        out[lo] = math.sqrt(2.0) * np.exp(0.5 * la[lo])
        a = np.exp(la[mid])
        out[mid] = np.log1p(a + np.sqrt(a) * np.sqrt(a + 2.0))
    return out


class HyperbolicSpace:
    """The hyperbolic space H^d of constant sectional curvature K < 0."""

    def __init__(self, dim: int, K: float):
        if dim < 2:
            raise ConfigError(f"HyperbolicSpace: dim must be >= 2, got {dim}")
        if not (K < 0.0) or not math.isfinite(K):
            raise ConfigError(f"HyperbolicSpace: curvature must be finite and < 0, got {K}")
        self.dim = int(dim)
        self.K = float(K)
        self.sqrt_mK = math.sqrt(-self.K)
        # Constant curvature: lower and upper bounds coincide.
        self.curv_lo = self.K
        self.curv_up = self.K

    # ------------------------------------------------------------------ basics

    def __repr__(self) -> str:
        return f"HyperbolicSpace(dim={self.dim}, K={self.K})"

    def descriptor(self) -> dict:
        return {"kind": "hyperbolic", "dim": self.dim, "K": self.K}

    def origin(self) -> np.ndarray:
        x = np.zeros(self.dim + 1)
        x[0] = 1.0 / self.sqrt_mK
        x.flags.writeable = False
        return x

    def minkowski(self, u: np.ndarray, v: np.ndarray) -> float:
        """Naive Minkowski product; fine at moderate radius, see module notes."""
        return float(np.dot(u[1:], v[1:]) - u[0] * v[0])

    def point_equal(self, x: np.ndarray, y: np.ndarray) -> bool:
        return np.array_equal(x, y)

    # ------------------------------------------------------- radial structure

    def _radial(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        """Scaled radius a~ = asinh(|x_s| sqrt(-K)) and unit direction u^.

        Never reads x_0, so it is exact at any representable radius.  At the
        origin the direction is the zero vector.
        """
        xs = x[1:]
        ns = _safe_norm(xs)
        if ns == 0.0:
            return 0.0, np.zeros(self.dim)
        return math.asinh(ns * self.sqrt_mK), xs / ns

    def renormalize(self, x: np.ndarray) -> np.ndarray:
        """Project back onto the sheet by recomputing x_0 from the spatial part."""
        out = np.array(x, dtype=float)
        out[0] = math.hypot(1.0 / self.sqrt_mK, _safe_norm(out[1:]))
        return out

    def validate_point(self, x: np.ndarray, tol: float = 1e-9) -> None:
        x = np.asarray(x)
        if x.shape != (self.dim + 1,):
            raise InvariantError(
                f"point shape {x.shape} != ({self.dim + 1},) for {self!r}"
            )
        if not np.all(np.isfinite(x)):
            raise InvariantError("point has non-finite coordinates")
        if x[0] <= 0.0:
            raise InvariantError("point has non-positive first coordinate")
        x0 = math.hypot(1.0 / self.sqrt_mK, _safe_norm(np.asarray(x[1:], float)))
        if not (abs(float(x[0]) - x0) <= tol * x0):
            raise InvariantError(
                f"point off the hyperboloid: x_0={x[0]!r} vs sqrt(1/(-K)+|x_s|^2)={x0!r}"
            )

    def validate_tangent(self, x: np.ndarray, v: np.ndarray, tol: float = 1e-12) -> None:
        v = np.asarray(v)
        if v.shape != (self.dim + 1,):
            raise InvariantError(f"tangent shape {v.shape} != ({self.dim + 1},)")
        if not np.all(np.isfinite(v)):
            raise InvariantError("tangent has non-finite coordinates")
        a, u = self._radial(x)
        if a > TRIG_ARG_LIMIT:
            return  # beyond reconstructible radius; orthogonality unresolvable
        # <x, v>_M = 0 normalized by cosh(a~):  proj*tanh(a~) - v_0 = 0 exactly
        # for tangents (proj = v_s . u^), with no e^{2a~} cancellation.
        proj = float(np.dot(np.asarray(v[1:], float), u)) if a > 0.0 else 0.0
        viol = abs(proj * math.tanh(a) - float(v[0]))
        scale = max(abs(float(v[0])), abs(proj), self.norm(x, v))
        if viol > tol * max(scale, 1e-300):
            raise InvariantError(
                f"tangent not orthogonal to base point (violation {viol!r}, scale {scale!r})"
            )

    # ------------------------------------------------- tangent decompositions

    def _tangent_decomp(self, x: np.ndarray, v: np.ndarray) -> tuple[float, np.ndarray]:
        """Split tangent v at x into (radial coefficient, perpendicular spatial part).

        The radial unit tangent at x is b_r = (sinh a~, cosh a~ u^).  Its
        coefficient is the Minkowski product <v, b_r>_M, evaluated in the form
        best conditioned for the radius: naive at a~ <= 6 (error ~ eps e^{a~}),
        the ratio v_0/sinh(a~) beyond (error ~ eps, no e^{2a~} cancellation).
        The perpendicular part lives purely in the spatial slice orthogonal to
        u^; it is snapped to zero when below the ambient rounding noise (it is
        then genuinely unresolvable -- see module docstring).
        """
        a, u = self._radial(x)
        if a == 0.0:
            return 0.0, np.array(v[1:], dtype=float)
        vs = np.asarray(v[1:], dtype=float)
        proj = float(np.dot(vs, u))
        if a <= _NAIVE_RADIUS:
            c_r = -float(v[0]) * math.sinh(a) + proj * math.cosh(a)
        elif a < TRIG_ARG_LIMIT:
            c_r = float(v[0]) / math.sinh(a)
        else:
            # v_0 = c_r sinh(a~): recover c_r in log domain.
            s = math.copysign(1.0, float(v[0]))
            la = math.log(abs(float(v[0]))) if v[0] != 0.0 else -math.inf
            c_r = s * math.exp(la - _logsinh(a)) if la != -math.inf else 0.0
        v_perp = vs - proj * u
        noise = 64.0 * np.finfo(float).eps * float(np.max(np.abs(vs), initial=0.0))
        if _safe_norm(v_perp) <= noise * math.sqrt(self.dim):
            v_perp = np.zeros(self.dim)
        return c_r, v_perp

    def _radial_tangent(self, x: np.ndarray) -> np.ndarray:
        """Unit tangent at x pointing away from the coordinate origin."""
        a, u = self._radial(x)
        b = np.empty(self.dim + 1)
        if a == 0.0:
            b[:] = 0.0
            b[1] = 1.0
            return b
        if a > TRIG_ARG_LIMIT:
            raise OverflowRangeError(f"radial tangent: cosh argument {a} > {TRIG_ARG_LIMIT}")
        # Unit-speed radial velocity: d/ds (cosh(s~)/sqrt(-K), sinh(s~)/sqrt(-K) u^).
        b[0] = math.sinh(a)
        b[1:] = math.cosh(a) * u
        return b

    def inner(self, x: np.ndarray, u: np.ndarray, v: np.ndarray) -> float:
        cu, pu = self._tangent_decomp(x, u)
        cv, pv = self._tangent_decomp(x, v)
        return cu * cv + float(np.dot(pu, pv))

    def norm(self, x: np.ndarray, v: np.ndarray) -> float:
        c_r, v_perp = self._tangent_decomp(x, v)
        return math.hypot(c_r, _safe_norm(v_perp))

    def zero_tangent(self, x: np.ndarray) -> np.ndarray:
        return np.zeros(self.dim + 1)

    # ---------------------------------------------------------------- distance

    def _log_gap(self, ax: float, ux: np.ndarray, ay: float, uy: np.ndarray) -> float:
        """log(cosh(d~) - 1) for the two polar decompositions; -inf when equal."""
        diff = abs(ax - ay)
        t1 = -math.inf if diff == 0.0 else _LN2 + 2.0 * _logsinh(0.5 * diff)
        if ax == 0.0 or ay == 0.0:
            ssq = 1.0  # |u^ - 0|^2 with one direction undefined: handled by sinh(0)=0
            t2 = -math.inf
        else:
            d = ux - uy
            ssq = float(np.dot(d, d))
            t2 = -math.inf if ssq == 0.0 else _logsinh(ax) + _logsinh(ay) + math.log(0.5 * ssq)
        if t1 == -math.inf:
            return t2
        if t2 == -math.inf:
            return t1
        return float(np.logaddexp(t1, t2))

    def dist(self, x: np.ndarray, y: np.ndarray) -> float:
        ax, ux = self._radial(x)
        ay, uy = self._radial(y)
        # Literal model-invariant check in the regime where the naive product
        # resolves it (its rounding noise is ~eps e^{a~x + a~y}): the arccosh
        # argument K<x,y>_M must be >= 1 - 1e-9.
        if ax + ay < 12.0:
            arg = self.K * self.minkowski(x, y)
            if arg < 1.0 - 1e-9:
                raise InvariantError(
                    f"arccosh argument {arg!r} < 1 - 1e-9: off-model points"
                )
        d_tilde = _arccosh1p_from_log(self._log_gap(ax, ux, ay, uy))
        return d_tilde / self.sqrt_mK

    def dist_many(self, x: np.ndarray, Z: np.ndarray) -> np.ndarray:
        """Distances from x to each row of Z (vectorized, same stable path)."""
        Z = np.asarray(Z, float)
        if Z.size == 0:
            return np.zeros(0)
        ax, ux = self._radial(x)
        ns = _row_norms(Z[:, 1:])
        az = np.arcsinh(ns * self.sqrt_mK)
        safe = np.where(ns > 0.0, ns, 1.0)
        uz = Z[:, 1:] / safe[:, None]
        with np.errstate(divide="ignore"):
            diff = np.abs(ax - az)
            t1 = np.where(diff > 0.0, _LN2 + 2.0 * _logsinh_vec(0.5 * diff), -np.inf)
            if ax == 0.0:
                t2 = np.full(Z.shape[0], -np.inf)
            else:
                d = uz - ux[None, :]
                ssq = np.einsum("ij,ij->i", d, d)
                t2 = np.where(
                    (ssq > 0.0) & (az > 0.0),
                    _logsinh_vec(np.maximum(az, 1e-300)) + _logsinh(ax)
                    + np.log(np.maximum(0.5 * ssq, 1e-300)),
                    -np.inf,
                )
            la = np.logaddexp(t1, t2)
        return _arccosh1p_from_log_vec(la) / self.sqrt_mK

    def exp_many(self, x: np.ndarray, V: np.ndarray) -> np.ndarray:
        """exp(x, v) for each row v of V (vectorized, same formulas as exp)."""
        V = np.asarray(V, float)
        if V.size == 0:
            return np.zeros((0, self.dim + 1))
        norms = self.norm_many(x, V)
        alpha = norms * self.sqrt_mK
        if float(np.max(alpha, initial=0.0)) > TRIG_ARG_LIMIT:
            raise OverflowRangeError(
                f"exp_many: |v|*sqrt(-K) = {np.max(alpha)} exceeds {TRIG_ARG_LIMIT}"
            )
        shc = np.where(
            alpha < 1e-8, 1.0 + alpha * alpha / 6.0,
            np.sinh(np.maximum(alpha, 1e-300)) / np.maximum(alpha, 1e-300),
        )
        out = np.cosh(alpha)[:, None] * np.asarray(x, float)[None, :] + shc[:, None] * V
        if not np.all(np.isfinite(out)):
            raise OverflowRangeError("exp_many: result leaves the representable range")
        out[:, 0] = np.hypot(1.0 / self.sqrt_mK, _row_norms(out[:, 1:]))
        return out

    def norm_many(self, x: np.ndarray, V: np.ndarray) -> np.ndarray:
        """Tangent norms of the rows of V at x (same decomposition as norm)."""
        V = np.asarray(V, float)
        if V.size == 0:
            return np.zeros(0)
        a, u = self._radial(x)
        if a == 0.0:
            return _row_norms(V[:, 1:])
        proj = V[:, 1:] @ u
        if a <= _NAIVE_RADIUS:
            c_r = -V[:, 0] * math.sinh(a) + proj * math.cosh(a)
        else:
            c_r = V[:, 0] / math.sinh(a) if a < TRIG_ARG_LIMIT else np.zeros(V.shape[0])
        perp = V[:, 1:] - proj[:, None] * u[None, :]
        pn = _row_norms(perp)
        noise = 64.0 * np.finfo(float).eps * np.max(np.abs(V[:, 1:]), axis=1, initial=0.0)
        pn = np.where(pn <= noise * math.sqrt(self.dim), 0.0, pn)
        return np.hypot(c_r, pn)

    # ------------------------------------------------------------- exp/log map

    def exp(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        nv = self.norm(x, v)
        alpha = nv * self.sqrt_mK
        if alpha == 0.0:
            return np.array(x, dtype=float)
        if alpha > TRIG_ARG_LIMIT:
            raise OverflowRangeError(
                f"exp: |v|*sqrt(-K) = {alpha} exceeds {TRIG_ARG_LIMIT}"
            )
        # exp_x(v) = cosh(alpha) x + (sinh(alpha)/alpha) v with alpha = |v| sqrt(-K)
        out = math.cosh(alpha) * np.asarray(x, float) + _sinhc(alpha) * np.asarray(v, float)
        if not np.all(np.isfinite(out)):
            raise OverflowRangeError("exp: result leaves the representable coordinate range")
        return self.renormalize(out)

    def log(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        d = self.dist(x, y)
        d_tilde = d * self.sqrt_mK
        if d_tilde == 0.0:
            return np.zeros(self.dim + 1)
        # v = (d~/sinh d~) (y - x) - d~ tanh(d~/2) x, all factors bounded.
        if d_tilde < 1e-8:
            ratio = 1.0
        elif d_tilde < TRIG_ARG_LIMIT:
            ratio = d_tilde / math.sinh(d_tilde)
        else:
            ratio = 2.0 * d_tilde * math.exp(-d_tilde)  # underflows to 0 harmlessly
        # v = (d~/sinh d~)(y - x) - d~ tanh(d~/2) x solves y = exp_x(v), |v| = d.
        v = ratio * (np.asarray(y, float) - np.asarray(x, float)) \
            - (d_tilde * math.tanh(0.5 * d_tilde)) * np.asarray(x, float)
        if not np.all(np.isfinite(v)):
            raise OverflowRangeError("log: intermediate overflow at extreme radius")
        # Beyond the naive radius, rebuild v from its stable decomposition
        # (cleans the e^{a~}-scale rounding noise in the ambient formula) and
        # rescale to exact length d.
        a, _u = self._radial(x)
        if _NAIVE_RADIUS < a <= TRIG_ARG_LIMIT:
            c_r, v_perp = self._tangent_decomp(x, v)
            v = c_r * self._radial_tangent(x)
            if _safe_norm(v_perp) > 0.0:
                v = v + np.concatenate(([0.0], v_perp))
        n = self.norm(x, v)
        if n > 0.0:
            v *= d / n
        return v

    def parallel_transport(self, x: np.ndarray, y: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Transport tangent v along the geodesic from x to y.

        Transport fixes the Minkowski-orthogonal complement of the geodesic
        2-plane pointwise and maps the geodesic direction at x to the
        continuing direction at y, so with u_x = log_x(y)/d and
        u_y = -log_y(x)/d the image of v is v + <v,u_x>(u_y - u_x).  Both
        directions come from log, so the error stays at the log noise floor
        instead of growing like e^d (the one-endpoint closed form
        sqrt(-K) sinh(d~) x + cosh(d~) u_x cancels catastrophically for
        far pairs).
        """
        d = self.dist(x, y)
        d_tilde = d * self.sqrt_mK
        if d_tilde == 0.0:
            return np.array(v, dtype=float)
        if d_tilde > TRIG_ARG_LIMIT:
            raise OverflowRangeError(
                f"parallel_transport: distance {d_tilde} exceeds {TRIG_ARG_LIMIT}"
            )
        u_x = self.log(x, y) / d
        u_y = self.log(y, x) / (-d)
        c = self.inner(x, v, u_x)
        out = np.asarray(v, float) + c * (u_y - u_x)
        if not np.all(np.isfinite(out)):
            raise OverflowRangeError("parallel_transport: result overflow")
        return out

    # ----------------------------------------------------------- ball geometry

    def project_ball(self, center: np.ndarray, radius: float, y: np.ndarray) -> np.ndarray:
        if not (radius > 0.0):
            raise ArgumentError(f"project_ball: radius must be > 0, got {radius}")
        d = self.dist(center, y)
        if d <= radius * (1.0 + 1e-12):
            return np.array(y, dtype=float)
        return self.exp(center, (radius / d) * self.log(center, y))

    def geodesic(self, x: np.ndarray, v: np.ndarray, ts: np.ndarray) -> np.ndarray:
        return np.stack([self.exp(x, float(t) * v) for t in np.atleast_1d(ts)])

    # --------------------------------------------------------- tangent frames

    def tangent_basis(self, x: np.ndarray) -> np.ndarray:
        """Minkowski-orthonormal basis of T_x, rows (dim, dim+1).

        Row 0 is the radial direction (away from the coordinate origin); the
        remaining rows are purely spatial directions perpendicular to the
        point's spatial direction, obtained from a deterministic Householder
        frame.  At the origin the frame is the spatial coordinate frame.
        """
        a, u = self._radial(x)
        out = np.zeros((self.dim, self.dim + 1))
        if a == 0.0:
            for i in range(self.dim):
                out[i, i + 1] = 1.0
            return out
        out[0] = self._radial_tangent(x)
        perp = _householder_perp(u)
        out[1:, 1:] = perp
        return out

    def to_tangent_coords(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Coordinates of tangent v in the tangent_basis frame (stable)."""
        a, u = self._radial(x)
        if a == 0.0:
            return np.array(v[1:], dtype=float)
        c_r, v_perp = self._tangent_decomp(x, v)
        perp = _householder_perp(u)
        return np.concatenate(([c_r], perp @ v_perp))

    def from_tangent_coords(self, x: np.ndarray, c: np.ndarray) -> np.ndarray:
        return np.asarray(c, float) @ self.tangent_basis(x)

    # --------------------------------------------------------- nets & packings

    def sphere_net(
        self,
        x: np.ndarray,
        s: float,
        theta: float,
        count_target: int | None = None,
        seed: int = 0,
    ) -> np.ndarray:
        """Tangent directions at x of norm s with pairwise angles >= theta.

        Returns a (count, dim+1) array of tangent vectors.  Without a
        count_target the net is maximal over the deterministic low-discrepancy
        pool and the count bound ceil(theta^{-(d-1)}) is verified (loud
        failure).  With a count_target the scan stops as soon as the target is
        reached (used by ball_packing, where the maximal net is astronomically
        large); the separation guarantee is identical.
        """
        if not (0.0 < theta <= math.pi / 2.0):
            raise ArgumentError(f"sphere_net: theta must be in (0, pi/2], got {theta}")
        if not (s > 0.0):
            raise ArgumentError(f"sphere_net: s must be > 0, got {s}")
        d = self.dim
        dirs = _unit_sphere_net(d, theta, count_target=count_target, seed=seed)
        if count_target is None:
            need = math.ceil(theta ** (-(d - 1)))
            if dirs.shape[0] < need:
                raise VerificationError(
                    f"sphere_net: count {dirs.shape[0]} misses the bound {need} "
                    f"(theta={theta}, d={d})"
                )
        basis = self.tangent_basis(x)
        return s * (dirs @ basis)

    def ball_packing(
        self,
        x_ref: np.ndarray,
        r: float,
        count_cap: int | None = None,
        seed: int = 0,
        max_points: int = 2 ** 21,
    ) -> np.ndarray:
        """Separated point family in B(x_ref, 3r/4): pairwise distances >= r/2.

        Points are exp(x_ref, v) over a sphere net at radius s = 3r/4 with
        angular separation theta = e^{1 - (2/3) s sqrt(-K)}.  Without a cap the
        count bound ceil(e^{(d/8) r sqrt(-K)}) is enforced (verified on the
        returned set, loud failure); count_cap trades the count bound for
        feasibility at large r sqrt(-K) (separation/containment still verified).
        """
        if not (r >= 4.0 / self.sqrt_mK):
            raise ArgumentError(
                f"ball_packing: need r >= 4/sqrt(-K) = {4.0 / self.sqrt_mK}, got {r}"
            )
        s = 0.75 * r
        s_tilde = s * self.sqrt_mK
        theta = math.exp(1.0 - (2.0 / 3.0) * s_tilde)
        exponent = (self.dim / 8.0) * r * self.sqrt_mK
        if count_cap is not None:
            target = int(count_cap)
        else:
            if exponent > math.log(max_points):
                raise ResourceError(
                    f"ball_packing: count floor e^{exponent:.3g} exceeds max_points="
                    f"{max_points}; pass count_cap to run a capped packing"
                )
            target = math.ceil(math.exp(exponent))
        tangents = self.sphere_net(x_ref, s, theta, count_target=target, seed=seed)
        n = tangents.shape[0]
        if count_cap is None and n < target:
            raise VerificationError(
                f"ball_packing: built {n} points, count bound requires {target}"
            )
        points = self.exp_many(x_ref, tangents)
        # Containment: dist(x_ref, z_j) = s by construction; verify anyway.
        dists = self.dist_many(x_ref, points)
        if not np.all(dists <= 0.75 * r * (1.0 + 1e-9)):
            raise VerificationError("ball_packing: containment in B(x_ref, 3r/4) failed")
        # Separation certificate: by the same-radius law of cosines, pairwise
        # distance >= r/2 is equivalent to a chord bound on the unit direction
        # vectors.  Verify it with a grid pass: re-thinning at the required
        # chord must accept every direction (every pair is then certified).
        if n >= 2:
            basis = self.tangent_basis(x_ref)
            dirs = (tangents @ _mink_flip(self.dim)) @ basis.T / s  # unit rows
            dirs /= np.linalg.norm(dirs, axis=1)[:, None]
            # 1 - cos(gamma_req) = (cosh(r~/2) - 1)/sinh^2(s~), in log domain;
            # chord_req^2 = 2 (1 - cos(gamma_req)).
            log_omc = _LN2 + 2.0 * _logsinh(0.25 * r * self.sqrt_mK) - 2.0 * _logsinh(s_tilde)
            chord_req = math.exp(0.5 * (_LN2 + log_omc))
            if n <= 2048:
                # Direct pairwise certificate.  The cell-grid pass cannot
                # represent chord_req at large r sqrt(-K) (cells per axis
                # ~ 1/chord_req overflows); differences of unit vectors stay
                # exact where dot products round to 1.
                worst_chord = math.inf
                for i in range(n - 1):
                    gaps = dirs[i + 1 :] - dirs[i]
                    worst_chord = min(worst_chord, math.sqrt(float(np.min(np.sum(gaps * gaps, axis=1)))))
                if not (worst_chord >= chord_req):
                    raise VerificationError(
                        f"ball_packing: separation certificate failed "
                        f"(min direction chord {worst_chord} < required {chord_req})"
                    )
            else:
                kept = kernels.thin_chord(dirs, chord_req)
                if kept.shape[0] != n:
                    raise VerificationError(
                        f"ball_packing: separation certificate failed "
                        f"({n - kept.shape[0]} of {n} directions violate the r/2 bound)"
                    )
        return points

    def geodesics_diverge_gap(self, x: np.ndarray, s: float, angle: float | None = None) -> float:
        """Distance between exp(x, s v1) and exp(x, s v2), angle(v1,v2)=theta.

        theta defaults to e^{1 - (2/3) s sqrt(-K)}; the contract is a gap of at
        least (2/3) s.  Requires s sqrt(-K) >= 3 (so theta <= pi/2).
        """
        s_tilde = s * self.sqrt_mK
        if s_tilde < 3.0:
            raise ArgumentError(f"geodesics_diverge_gap: need s*sqrt(-K) >= 3, got {s_tilde}")
        theta = math.exp(1.0 - (2.0 / 3.0) * s_tilde) if angle is None else float(angle)
        basis = self.tangent_basis(x)
        v1 = s * basis[0]
        v2 = s * (math.cos(theta) * basis[0] + math.sin(theta) * basis[1])
        return self.dist(self.exp(x, v1), self.exp(x, v2))

    # ------------------------------------------------------------ serialization

    def serialize_point(self, x: np.ndarray) -> list:
        return [float(c) for c in np.asarray(x, float)]

    def deserialize_point(self, data) -> np.ndarray:
        x = np.asarray(data, dtype=float)
        self.validate_point(x)
        return x

    serialize_tangent = serialize_point

    def deserialize_tangent(self, data) -> np.ndarray:
        return np.asarray(data, dtype=float)


def hyperbolic_law_of_cosines(space: HyperbolicSpace, b: float, c: float, alpha: float) -> float:
    """Side a of a geodesic triangle with sides b, c and included angle alpha.

    Uses cosh(a~) - 1 = [cosh(b~ - c~) - 1] + sinh(b~) sinh(c~) (1 - cos alpha)
    in log domain (exact on constant curvature).
    """
    sk = space.sqrt_mK
    bt, ct = b * sk, c * sk
    diff = abs(bt - ct)
    t1 = -math.inf if diff == 0.0 else _LN2 + 2.0 * _logsinh(0.5 * diff)
    omc = 2.0 * math.sin(0.5 * alpha) ** 2  # 1 - cos(alpha), cancellation-free
    t2 = -math.inf if (omc == 0.0 or bt == 0.0 or ct == 0.0) else \
        _logsinh(bt) + _logsinh(ct) + math.log(omc)
    if t1 == -math.inf and t2 == -math.inf:
        return 0.0
    la = t2 if t1 == -math.inf else (t1 if t2 == -math.inf else float(np.logaddexp(t1, t2)))
    return _arccosh1p_from_log(la) / sk


def _mink_flip(dim: int) -> np.ndarray:
    """Diagonal Minkowski metric matrix J = diag(-1, 1, ..., 1)."""
    j = np.eye(dim + 1)
    j[0, 0] = -1.0
    return j


def _householder_perp(u: np.ndarray) -> np.ndarray:
    """Rows: an orthonormal basis of the complement of unit vector u in R^d.

    Columns 2..d of the Householder reflection H mapping e_1 to u (H = I when
    u ~ e_1).  Deterministic and stable for every u.
    """
    d = u.shape[0]
    e1 = np.zeros(d)
    e1[0] = 1.0
    w = e1 - u
    nw = np.linalg.norm(w)
    if nw < 1e-12:
        h = np.eye(d)
    else:
        q = w / nw
        h = np.eye(d) - 2.0 * np.outer(q, q)
    return h[:, 1:].T


def _unit_sphere_net(d: int, theta: float, count_target: int | None, seed: int) -> np.ndarray:
    """Unit vectors in R^d with pairwise angles >= theta (greedy scan thinning).

    d = 2 uses the closed-form equally spaced circle net (floor(2 pi / theta)
    points).  d >= 3 thins a deterministic low-discrepancy pool; the pool is
    200 * ceil(theta^{-(d-1)}) points in maximal mode, or target-driven with
    retry-doubling when an early-stop count_target is given.
    """
    if d == 2:
        # The full circle has floor(2 pi / theta) slots, which overflows any
        # array for tiny theta (the count grows like e^{(2/3) s sqrt(-K)}).
        # Materialize only the first count_target slots of that same circle:
        # identical angles 2 pi k / m, never the whole net.
        m_f = max(math.floor(2.0 * math.pi / theta), 1.0)
        if count_target is not None and m_f > count_target:
            ang = 2.0 * np.pi * np.arange(int(count_target)) / m_f
            return np.column_stack([np.cos(ang), np.sin(ang)])
        if m_f > 2 ** 24:
            raise ResourceError(
                f"sphere_net: full circle net has {m_f:.3g} slots; "
                "pass a count_target (capped construction) or a larger theta"
            )
        return sampling.circle_points(int(m_f))
    # Thinning below ~2^-18 chords overflows the cell grid; a larger chord
    # only strengthens the separation (the count is recovered by the
    # retry-doubling below, and ball_packing re-certifies the true bound).
    min_chord = max(2.0 * math.sin(0.5 * theta), 2.0 ** -18)
    if count_target is None:
        pool_n = 200 * math.ceil(theta ** (-(d - 1)))
        if pool_n > 2 ** 24:
            raise ResourceError(
                f"sphere_net: pool of {pool_n} sample directions is not representable; "
                "use a count_target (capped construction) or a larger theta"
            )
        pool = sampling.sphere_points(pool_n, d, seed=seed)
        idx = kernels.thin_chord(pool, min_chord)
        return pool[idx]
    pool_n = max(4 * count_target, 4096)
    for _ in range(6):
        pool = sampling.sphere_points(pool_n, d, seed=seed)
        idx = kernels.thin_chord(pool, min_chord, count_target=count_target)
        if idx.shape[0] >= count_target:
            return pool[idx]
        pool_n *= 2
        if pool_n > 2 ** 24:
            break
    raise VerificationError(
        f"sphere_net: could not reach count_target={count_target} at theta={theta}, d={d}"
    )
