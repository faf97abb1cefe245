r"""Symmetric positive definite matrices with the affine-invariant metric.

P_n = {symmetric positive definite n x n} with <X, Y>_P = Tr(P^{-1} X P^{-1} Y)
is a nonpositively curved symmetric space with sectional curvature in
[-1/2, 0].  The determinant-one slice SLP_n (det P = 1) is totally geodesic,
removes the flat R direction, and for n = 2 is exactly the hyperbolic plane of
constant curvature -1/2.

Key curvature facts realized (and unit-tested) here:

- curvature tensor  Rm_P(W, X, Y, Z) = -1/4 Tr([P^{-1}W, P^{-1}X] [P^{-1}Y, P^{-1}Z]);
- sectional curvature of every tangent plane lies in [-1/2, 0];
- the "bordered" tangents X_s = [[0, s], [s^T, 0]] at the identity span a
  totally geodesic hyperbolic submanifold H^{n-1} of constant curvature -1/8
  (isometric image of the hyperboloid model via w |-> X_{w/sqrt(2)}), which is
  how separated candidate families (ball packings) are constructed on P_n.

All eigendecompositions use a hand-rolled cyclic Jacobi iteration: bitwise
deterministic across BLAS/LAPACK builds, which the replayable-oracle contract
requires.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import (
    ArgumentError,
    ConfigError,
    InvariantError,
    NumericError,
    OverflowRangeError,
)
from .hyperbolic import TRIG_ARG_LIMIT, HyperbolicSpace


# --------------------------------------------------------------- eigensolver


def jacobi_eigh(A: np.ndarray, tol: float = 1e-14, max_sweeps: int = 50):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns (w, V) with A = V diag(w) V^T, eigenvalues ascending, V orthogonal.
    Deterministic (fixed sweep order, no pivot search randomness).  Raises
    NumericError if the off-diagonal mass has not converged after max_sweeps.
    """
    A = np.array(A, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ArgumentError(f"jacobi_eigh: square matrix expected, got {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ArgumentError("jacobi_eigh: non-finite entries")
    V = np.eye(n)
    scale = float(np.max(np.abs(A), initial=0.0))
    if scale == 0.0:
        return np.zeros(n), V
    for _ in range(max_sweeps):
        off = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                off = max(off, abs(A[i, j]))
        if off <= tol * scale:
            break
        for i in range(n - 1):
            for j in range(i + 1, n):
                apq = A[i, j]
                if abs(apq) <= 1e-300:
                    continue
                tau = (A[j, j] - A[i, i]) / (2.0 * apq)
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                # rotate rows/cols i, j of A
                row_i = A[i, :].copy()
                row_j = A[j, :].copy()
                A[i, :] = c * row_i - s * row_j
                A[j, :] = s * row_i + c * row_j
                col_i = A[:, i].copy()
                col_j = A[:, j].copy()
                A[:, i] = c * col_i - s * col_j
                A[:, j] = s * col_i + c * col_j
                vc_i = V[:, i].copy()
                vc_j = V[:, j].copy()
                V[:, i] = c * vc_i - s * vc_j
                V[:, j] = s * vc_i + c * vc_j
    else:
        raise NumericError(f"jacobi_eigh: no convergence after {max_sweeps} sweeps")
    w = np.diag(A).copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def _sym(A: np.ndarray) -> np.ndarray:
    return 0.5 * (A + A.T)


def _spd_power(P: np.ndarray, p: float) -> np.ndarray:
    """P^p for symmetric positive definite P via Jacobi eigendecomposition."""
    w, V = jacobi_eigh(P)
    if w[0] <= 0.0:
        raise InvariantError(f"matrix not positive definite (min eigenvalue {w[0]!r})")
    return _sym(V @ np.diag(w ** p) @ V.T)


def _expm_sym(M: np.ndarray) -> np.ndarray:
    w, V = jacobi_eigh(M)
    if float(np.max(np.abs(w))) > TRIG_ARG_LIMIT:
        raise OverflowRangeError(
            f"matrix exponential argument {np.max(np.abs(w))} exceeds {TRIG_ARG_LIMIT}"
        )
    return _sym(V @ np.diag(np.exp(w)) @ V.T)


def _logm_spd(M: np.ndarray) -> np.ndarray:
    w, V = jacobi_eigh(M)
    if w[0] <= 0.0:
        raise InvariantError(f"matrix logarithm of non-SPD matrix (min eig {w[0]!r})")
    return _sym(V @ np.diag(np.log(w)) @ V.T)


# ------------------------------------------------------------------ the space


class SPDSpace:
    """P_n (or its determinant-one slice) with the affine-invariant metric."""

    def __init__(self, n: int, det_one: bool = False):
        if n < 2:
            raise ConfigError(f"SPDSpace: n must be >= 2, got {n}")
        self.n = int(n)
        self.det_one = bool(det_one)
        self.dim = n * (n + 1) // 2 - (1 if det_one else 0)
        # Sectional curvature bounds of the affine-invariant metric.
        self.curv_lo = -0.5
        self.curv_up = 0.0
        self.K = self.curv_lo  # pessimistic constant-curvature comparison value
        self.sqrt_mK = math.sqrt(0.5)
        self._basis = _sym_basis(self.n, traceless=self.det_one)

    def __repr__(self) -> str:
        return f"SPDSpace(n={self.n}, det_one={self.det_one})"

    def descriptor(self) -> dict:
        return {"kind": "spd", "n": self.n, "det_one": self.det_one}

    def origin(self) -> np.ndarray:
        x = np.eye(self.n)
        x.flags.writeable = False
        return x

    # ----------------------------------------------------------------- checks

    def validate_point(self, P: np.ndarray, tol: float = 1e-9) -> None:
        P = np.asarray(P)
        if P.shape != (self.n, self.n):
            raise InvariantError(f"point shape {P.shape} != ({self.n}, {self.n})")
        if not np.all(np.isfinite(P)):
            raise InvariantError("point has non-finite entries")
        scale = float(np.max(np.abs(P)))
        if float(np.max(np.abs(P - P.T))) > tol * max(scale, 1e-300):
            raise InvariantError("point is not symmetric")
        w, _ = jacobi_eigh(np.asarray(P, float))
        if w[0] <= 0.0:
            raise InvariantError(f"point is not positive definite (min eig {w[0]!r})")
        if self.det_one:
            logdet = float(np.sum(np.log(w)))
            if abs(logdet) > self.n * tol:
                raise InvariantError(f"point off the det=1 slice (log det {logdet!r})")

    def validate_tangent(self, P: np.ndarray, X: np.ndarray, tol: float = 1e-9) -> None:
        X = np.asarray(X)
        if X.shape != (self.n, self.n):
            raise InvariantError(f"tangent shape {X.shape} != ({self.n}, {self.n})")
        if not np.all(np.isfinite(X)):
            raise InvariantError("tangent has non-finite entries")
        scale = max(float(np.max(np.abs(X))), 1e-300)
        if float(np.max(np.abs(X - X.T))) > tol * scale:
            raise InvariantError("tangent is not symmetric")
        if self.det_one:
            # tangent to the slice: Tr(P^{-1} X) = 0
            s_inv = _spd_power(np.asarray(P, float), -0.5)
            tr = float(np.trace(s_inv @ X @ s_inv))
            if abs(tr) > self.n * tol * max(1.0, self.norm(P, X)):
                raise InvariantError(f"tangent off the det=1 slice (Tr P^-1 X = {tr!r})")

    def point_equal(self, x: np.ndarray, y: np.ndarray) -> bool:
        return np.array_equal(x, y)

    # ----------------------------------------------------------------- metric

    def inner(self, P: np.ndarray, X: np.ndarray, Y: np.ndarray) -> float:
        s_inv = _spd_power(np.asarray(P, float), -0.5)
        A = s_inv @ np.asarray(X, float) @ s_inv
        B = s_inv @ np.asarray(Y, float) @ s_inv
        return float(np.sum(A * B))

    def norm(self, P: np.ndarray, X: np.ndarray) -> float:
        s_inv = _spd_power(np.asarray(P, float), -0.5)
        A = s_inv @ np.asarray(X, float) @ s_inv
        return float(np.sqrt(np.sum(A * A)))

    def zero_tangent(self, P: np.ndarray) -> np.ndarray:
        return np.zeros((self.n, self.n))

    def dist(self, P: np.ndarray, Q: np.ndarray) -> float:
        s_inv = _spd_power(np.asarray(P, float), -0.5)
        M = _sym(s_inv @ np.asarray(Q, float) @ s_inv)
        w, _ = jacobi_eigh(M)
        if w[0] <= 0.0:
            raise InvariantError("dist: second argument not positive definite")
        lw = np.log(w)
        return float(np.sqrt(np.sum(lw * lw)))

    def dist_many(self, P: np.ndarray, Zs: np.ndarray) -> np.ndarray:
        return np.array([self.dist(P, Z) for Z in Zs])

    # ------------------------------------------------------------ exp/log map

    def exp(self, P: np.ndarray, X: np.ndarray) -> np.ndarray:
        P = np.asarray(P, float)
        s = _spd_power(P, 0.5)
        s_inv = _spd_power(P, -0.5)
        M = _sym(s_inv @ np.asarray(X, float) @ s_inv)
        out = _sym(s @ _expm_sym(M) @ s)
        if self.det_one:
            out = self._renorm_det(out)
        return out

    def exp_many(self, P: np.ndarray, Vs: np.ndarray) -> np.ndarray:
        return np.stack([self.exp(P, V) for V in Vs]) if len(Vs) else np.zeros((0, self.n, self.n))

    def log(self, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
        P = np.asarray(P, float)
        s = _spd_power(P, 0.5)
        s_inv = _spd_power(P, -0.5)
        M = _sym(s_inv @ np.asarray(Q, float) @ s_inv)
        return _sym(s @ _logm_spd(M) @ s)

    def parallel_transport(self, P: np.ndarray, Q: np.ndarray, X: np.ndarray) -> np.ndarray:
        """Transport along the geodesic: X -> E X E^T, E = (Q P^{-1})^{1/2}.

        E is computed as P^{1/2} (P^{-1/2} Q P^{-1/2})^{1/2} P^{-1/2}, which is
        exact on the geodesic and an isometry of the affine-invariant metric.
        """
        P = np.asarray(P, float)
        s = _spd_power(P, 0.5)
        s_inv = _spd_power(P, -0.5)
        M = _sym(s_inv @ np.asarray(Q, float) @ s_inv)
        E = s @ _spd_power(M, 0.5) @ s_inv
        return _sym(E @ np.asarray(X, float) @ E.T)

    def project_ball(self, center: np.ndarray, radius: float, y: np.ndarray) -> np.ndarray:
        if not (radius > 0.0):
            raise ArgumentError(f"project_ball: radius must be > 0, got {radius}")
        d = self.dist(center, y)
        if d <= radius * (1.0 + 1e-12):
            return np.array(y, dtype=float)
        return self.exp(center, (radius / d) * self.log(center, y))

    def geodesic(self, x: np.ndarray, v: np.ndarray, ts: np.ndarray) -> np.ndarray:
        return np.stack([self.exp(x, float(t) * v) for t in np.atleast_1d(ts)])

    def _renorm_det(self, Q: np.ndarray) -> np.ndarray:
        w, _ = jacobi_eigh(Q)
        if w[0] <= 0.0:
            raise InvariantError("det renormalization of non-SPD matrix")
        logdet = float(np.sum(np.log(w)))
        return Q * math.exp(-logdet / self.n)

    # -------------------------------------------------------------- curvature

    def curvature_tensor(
        self, P: np.ndarray, W: np.ndarray, X: np.ndarray, Y: np.ndarray, Z: np.ndarray
    ) -> float:
        """Rm_P(W, X, Y, Z) = -1/4 Tr([P~W, P~X][P~Y, P~Z]), P~ = P^{-1} act.

        Evaluated in the P^{-1/2}-conjugated frame where the metric is the
        Frobenius one.
        """
        s_inv = _spd_power(np.asarray(P, float), -0.5)
        a = s_inv @ np.asarray(W, float) @ s_inv
        b = s_inv @ np.asarray(X, float) @ s_inv
        c = s_inv @ np.asarray(Y, float) @ s_inv
        d = s_inv @ np.asarray(Z, float) @ s_inv
        c1 = a @ b - b @ a
        c2 = c @ d - d @ c
        return -0.25 * float(np.sum(c1 * c2.T))

    def sectional_curvature(self, P: np.ndarray, X: np.ndarray, Y: np.ndarray) -> float:
        g_xx = self.inner(P, X, X)
        g_yy = self.inner(P, Y, Y)
        g_xy = self.inner(P, X, Y)
        denom = g_xx * g_yy - g_xy * g_xy
        if denom <= 0.0:
            raise ArgumentError("sectional_curvature: degenerate tangent plane")
        return self.curvature_tensor(P, X, Y, Y, X) / denom

    # --------------------------------------------------- tangent coordinates

    def tangent_basis(self, P: np.ndarray) -> np.ndarray:
        """Orthonormal tangent frame at P, rows flattened (dim, n*n)."""
        s = _spd_power(np.asarray(P, float), 0.5)
        return np.stack([(s @ B @ s).reshape(-1) for B in self._basis])

    def to_tangent_coords(self, P: np.ndarray, X: np.ndarray) -> np.ndarray:
        s_inv = _spd_power(np.asarray(P, float), -0.5)
        A = _sym(s_inv @ np.asarray(X, float) @ s_inv)
        return np.array([float(np.sum(A * B)) for B in self._basis])

    def from_tangent_coords(self, P: np.ndarray, c: np.ndarray) -> np.ndarray:
        s = _spd_power(np.asarray(P, float), 0.5)
        A = np.zeros((self.n, self.n))
        for coef, B in zip(np.asarray(c, float), self._basis):
            A += coef * B
        return _sym(s @ A @ s)

    # ------------------------------------------- separated candidate families

    def hyperbolic_slice(self) -> tuple["HyperbolicSpace", float]:
        """The model hyperbolic space isometric to the packing slice at I.

        n = 2 (det-one): the whole manifold is H^2 of curvature -1/2.
        n >= 3: bordered tangents give a totally geodesic H^{n-1} of curvature
        -1/8.  Returns (model space, curvature K_slice).
        """
        if self.n == 2:
            return HyperbolicSpace(2, -0.5), -0.5
        return HyperbolicSpace(self.n - 1, -0.125), -0.125

    def _slice_tangent_at_identity(self, coords: np.ndarray) -> np.ndarray:
        """Isometric map from model-space tangent coords to a tangent at I."""
        n = self.n
        X = np.zeros((n, n))
        if n == 2:
            # orthonormal traceless frame: E1 = diag(1,-1)/sqrt2, E2 = offdiag/sqrt2
            e1 = np.array([[1.0, 0.0], [0.0, -1.0]]) / math.sqrt(2.0)
            e2 = np.array([[0.0, 1.0], [1.0, 0.0]]) / math.sqrt(2.0)
            X = coords[0] * e1 + coords[1] * e2
        else:
            s = np.asarray(coords, float) / math.sqrt(2.0)
            X[:-1, -1] = s
            X[-1, :-1] = s
        return X

    def ball_packing(
        self,
        x_ref: np.ndarray,
        r: float,
        count_cap: int | None = None,
        seed: int = 0,
    ) -> np.ndarray:
        """Separated family in B(x_ref, 3r/4) with pairwise distances >= r/2.

        Built in the totally geodesic hyperbolic slice through x_ref (see
        hyperbolic_slice) and pushed forward by the isometry Q -> A Q A^T with
        A = x_ref^{1/2}; containment and separation are inherited exactly from
        the slice and re-verified on the output.
        """
        hyp, _K = self.hyperbolic_slice()
        pts_h = hyp.ball_packing(hyp.origin(), r, count_cap=count_cap, seed=seed)
        o_h = hyp.origin()
        A = _spd_power(np.asarray(x_ref, float), 0.5)
        out = []
        for z in pts_h:
            coords = hyp.to_tangent_coords(o_h, hyp.log(o_h, z))
            X = self._slice_tangent_at_identity(coords)
            Q = self.exp(self.origin(), X)
            out.append(_sym(A @ Q @ A.T))
        pts = np.stack(out)
        # spot re-verification in the ambient metric (full check when small)
        m = pts.shape[0]
        dref = self.dist_many(x_ref, pts)
        if not np.all(dref <= 0.75 * r * (1.0 + 1e-9)):
            raise InvariantError("spd ball_packing: containment failed")
        if m <= 256:
            for i in range(m):
                for j in range(i + 1, m):
                    if self.dist(pts[i], pts[j]) < 0.5 * r * (1.0 - 1e-9):
                        raise InvariantError("spd ball_packing: separation failed")
        return pts

    # ------------------------------------------------------------ serialization

    def serialize_point(self, P: np.ndarray) -> list:
        return [float(c) for c in np.asarray(P, float).reshape(-1)]

    def deserialize_point(self, data) -> np.ndarray:
        P = np.asarray(data, dtype=float).reshape(self.n, self.n)
        self.validate_point(P)
        return P

    def serialize_tangent(self, X: np.ndarray) -> list:
        return [float(c) for c in np.asarray(X, float).reshape(-1)]

    def deserialize_tangent(self, data) -> np.ndarray:
        return np.asarray(data, dtype=float).reshape(self.n, self.n)


def _sym_basis(n: int, traceless: bool) -> list[np.ndarray]:
    """Orthonormal (Frobenius) basis of symmetric n x n matrices.

    Diagonal part: either all diag(e_i) or, for the traceless slice, the n-1
    ascending-support combinations diag(1, ..., 1, -k, 0, ...)/sqrt(k(k+1)).
    Off-diagonal part: (E_ij + E_ji)/sqrt(2), i < j, row-major order.
    """
    basis: list[np.ndarray] = []
    if traceless:
        for k in range(1, n):
            d = np.zeros(n)
            d[:k] = 1.0
            d[k] = -float(k)
            basis.append(np.diag(d / math.sqrt(k * (k + 1.0))))
    else:
        for i in range(n):
            b = np.zeros((n, n))
            b[i, i] = 1.0
            basis.append(b)
    for i in range(n):
        for j in range(i + 1, n):
            b = np.zeros((n, n))
            b[i, j] = b[j, i] = 1.0 / math.sqrt(2.0)
            basis.append(b)
    return basis
