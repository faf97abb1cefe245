"""Euclidean space with the manifold protocol (curvature-zero reference).

Used as the flat limit for optimizer reductions (momentum methods on a flat
space must reproduce their textbook Euclidean form) and as a protocol sanity
baseline in tests.  Points and tangents are plain (dim,) float64 arrays.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ArgumentError, ConfigError, InvariantError


class FlatSpace:
    """R^d with the standard metric."""

    def __init__(self, dim: int):
        if dim < 1:
            raise ConfigError(f"FlatSpace: dim must be >= 1, got {dim}")
        self.dim = int(dim)
        self.K = 0.0
        self.curv_lo = 0.0
        self.curv_up = 0.0
        self.sqrt_mK = 0.0

    def __repr__(self) -> str:
        return f"FlatSpace(dim={self.dim})"

    def descriptor(self) -> dict:
        return {"kind": "flat", "dim": self.dim}

    def origin(self) -> np.ndarray:
        x = np.zeros(self.dim)
        x.flags.writeable = False
        return x

    def validate_point(self, x: np.ndarray, tol: float = 1e-9) -> None:
        x = np.asarray(x)
        if x.shape != (self.dim,):
            raise InvariantError(f"point shape {x.shape} != ({self.dim},)")
        if not np.all(np.isfinite(x)):
            raise InvariantError("point has non-finite coordinates")

    def validate_tangent(self, x: np.ndarray, v: np.ndarray, tol: float = 1e-12) -> None:
        v = np.asarray(v)
        if v.shape != (self.dim,):
            raise InvariantError(f"tangent shape {v.shape} != ({self.dim},)")
        if not np.all(np.isfinite(v)):
            raise InvariantError("tangent has non-finite coordinates")

    def point_equal(self, x: np.ndarray, y: np.ndarray) -> bool:
        return np.array_equal(x, y)

    def dist(self, x: np.ndarray, y: np.ndarray) -> float:
        return float(np.linalg.norm(np.asarray(y, float) - np.asarray(x, float)))

    def dist_many(self, x: np.ndarray, Z: np.ndarray) -> np.ndarray:
        Z = np.asarray(Z, float)
        if Z.size == 0:
            return np.zeros(0)
        return np.linalg.norm(Z - np.asarray(x, float)[None, :], axis=1)

    def exp(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        out = np.asarray(x, float) + np.asarray(v, float)
        if not np.all(np.isfinite(out)):
            raise InvariantError("exp: non-finite result")
        return out

    def exp_many(self, x: np.ndarray, V: np.ndarray) -> np.ndarray:
        return np.asarray(x, float)[None, :] + np.asarray(V, float)

    def log(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.asarray(y, float) - np.asarray(x, float)

    def parallel_transport(self, x: np.ndarray, y: np.ndarray, v: np.ndarray) -> np.ndarray:
        return np.array(v, dtype=float)

    def inner(self, x: np.ndarray, u: np.ndarray, v: np.ndarray) -> float:
        return float(np.dot(u, v))

    def norm(self, x: np.ndarray, v: np.ndarray) -> float:
        return float(np.linalg.norm(v))

    def norm_many(self, x: np.ndarray, V: np.ndarray) -> np.ndarray:
        return np.linalg.norm(np.asarray(V, float), axis=1)

    def zero_tangent(self, x: np.ndarray) -> np.ndarray:
        return np.zeros(self.dim)

    def project_ball(self, center: np.ndarray, radius: float, y: np.ndarray) -> np.ndarray:
        if not (radius > 0.0):
            raise ArgumentError(f"project_ball: radius must be > 0, got {radius}")
        d = self.dist(center, y)
        if d <= radius * (1.0 + 1e-12):
            return np.array(y, dtype=float)
        return self.exp(center, (radius / d) * self.log(center, y))

    def tangent_basis(self, x: np.ndarray) -> np.ndarray:
        return np.eye(self.dim)

    def to_tangent_coords(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        return np.array(v, dtype=float)

    def from_tangent_coords(self, x: np.ndarray, c: np.ndarray) -> np.ndarray:
        return np.array(c, dtype=float)

    def serialize_point(self, x: np.ndarray) -> list:
        return [float(c) for c in np.asarray(x, float)]

    def deserialize_point(self, data) -> np.ndarray:
        x = np.asarray(data, dtype=float)
        self.validate_point(x)
        return x

    serialize_tangent = serialize_point

    def deserialize_tangent(self, data) -> np.ndarray:
        return np.asarray(data, dtype=float)

    def geodesic(self, x: np.ndarray, v: np.ndarray, ts: np.ndarray) -> np.ndarray:
        return np.asarray(x, float)[None, :] + np.atleast_1d(ts)[:, None] * np.asarray(v, float)[None, :]
