r"""First-order optimizers driven against the resisting oracle.

Three reference methods, all using only exp/log/parallel transport:

- rgd_unconstrained: x_{k+1} = exp_{x_k}(-step * g_k);
- projected_rgd: the same step followed by the metric projection onto a
  closed geodesic ball.  Caveat carried with the method on purpose: the
  descent-lemma proof of the unconstrained rate does not work in the
  constrained case, so projected runs are demonstrations rather than
  certified-rate executions;
- tangent_nag: Nesterov's accelerated method run in the fixed tangent space
  at a reference point.  Query points are exp of the tangent iterates;
  gradients are parallel-transported back to the reference tangent space.
  On a flat space this is bit-for-bit classical NAG, and with zero momentum
  its first query/step pair coincides with gradient descent.

run_against feeds an algorithm's queries to a resisting oracle, finalizes
the oracle, and reports the transcript together with the first query index
that landed within stop_radius of the finalized minimizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError
from .oracle import OracleState, oracle_answer, oracle_finalize, verify_transcript


class RGDUnconstrained:
    """Fixed-step Riemannian gradient descent."""

    name = "rgd"

    def __init__(self, step: float):
        if not (step > 0.0):
            raise ArgumentError(f"rgd: step must be > 0, got {step}")
        self.step = step

    def reset(self, space, x0):
        self.space = space
        return np.array(x0, copy=True)

    def update(self, x, f, g):
        return self.space.exp(x, -self.step * np.asarray(g, float))


class ProjectedRGD:
    """Gradient step followed by projection onto the ball B(center, radius).

    The unconstrained descent analysis does not work in the constrained
    case; the projection keeps iterates inside the oracle domain but the
    method's rate here is observational only.
    """

    name = "projected-rgd"

    def __init__(self, L: float, center, radius: float):
        if not (L > 0.0) or not (radius > 0.0):
            raise ArgumentError(f"projected_rgd: need L > 0 and radius > 0, got {L}, {radius}")
        self.L = L
        self.center = center
        self.radius = radius

    def reset(self, space, x0):
        self.space = space
        return space.project_ball(self.center, self.radius, np.array(x0, copy=True))

    def update(self, x, f, g):
        y = self.space.exp(x, (-1.0 / self.L) * np.asarray(g, float))
        return self.space.project_ball(self.center, self.radius, y)


class TangentNAG:
    """Accelerated gradient method in the tangent space at x_ref.

    Maintains tangent-coordinate iterates (y = lookahead, x = main); each
    query point is exp_{x_ref}(y); the returned gradient is parallel-
    transported from the query point to x_ref before the classical update
      x+ = y - (1/L) g~,   y+ = x+ + beta (x+ - x),
    with beta = (sqrt(kappa) - 1)/(sqrt(kappa) + 1), kappa = L/mu.
    """

    name = "tangent-nag"

    def __init__(self, L: float, mu: float, x_ref):
        if not (L > 0.0) or not (mu > 0.0) or L < mu:
            raise ArgumentError(f"tangent_nag: need L >= mu > 0, got L={L}, mu={mu}")
        self.L = L
        self.mu = mu
        kappa = L / mu
        self.beta = (math.sqrt(kappa) - 1.0) / (math.sqrt(kappa) + 1.0)
        self.x_ref = x_ref

    def reset(self, space, x0):
        self.space = space
        self.y = space.to_tangent_coords(self.x_ref, space.log(self.x_ref, x0))
        self.x = self.y.copy()
        return space.exp(self.x_ref, space.from_tangent_coords(self.x_ref, self.y))

    def update(self, q, f, g):
        sp = self.space
        g_back = sp.parallel_transport(q, self.x_ref, np.asarray(g, float))
        g_co = sp.to_tangent_coords(self.x_ref, g_back)
        x_next = self.y - (1.0 / self.L) * g_co
        self.y = x_next + self.beta * (x_next - self.x)
        self.x = x_next
        return sp.exp(self.x_ref, sp.from_tangent_coords(self.x_ref, self.y))


@dataclass
class RunResult:
    transcript: object
    hardfn: object
    first_hit: int | None
    active_sizes: list
    verify: dict
    n_queries: int


def run_against(algorithm, state: OracleState, max_queries: int,
                stop_radius: float | None = None) -> RunResult:
    """Drive `algorithm` against the oracle for max_queries queries.

    first_hit is the earliest transcript index whose query point lies within
    stop_radius (default r/4) of the *finalized* minimizer, or None if no
    query ever does.  The oracle is finalized and the transcript replayed
    against the finalized function before returning.
    """
    if max_queries < 1:
        raise ArgumentError(f"run_against: need max_queries >= 1, got {max_queries}")
    cfg = state.config
    sp = cfg.space
    if stop_radius is None:
        stop_radius = 0.25 * cfg.r
    x = algorithm.reset(sp, cfg.x_ref)
    for _ in range(max_queries):
        f, g = oracle_answer(state, x)
        x = algorithm.update(x, f, g)
    h = oracle_finalize(state)
    t = state.transcript()
    first_hit = None
    for idx, rec in enumerate(t.records):
        if sp.dist(rec.x, h.minimizer) < stop_radius:
            first_hit = idx
            break
    report = verify_transcript(t, h)
    return RunResult(
        transcript=t,
        hardfn=h,
        first_hit=first_hit,
        active_sizes=[rec.n_active for rec in t.records],
        verify=report,
        n_queries=len(t.records),
    )
