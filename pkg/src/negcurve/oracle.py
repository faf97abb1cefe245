r"""Resisting first-order oracle on negatively curved spaces.

The oracle maintains a finite set of candidate minimizers z_1..z_N inside
B(x_ref, 3r/4), pairwise r/2-separated, and for each an explicit smooth,
strongly geodesically convex "hard function" f_j = dist(., z_j)^2/2 plus a
list of compactly supported bumps.  Each query x_k is answered with a
gradient (and, in value mode, a value) that *every surviving candidate
function can be made to reproduce exactly* by appending one more bump within
fixed gradient/Hessian budgets, so the answers carry no information about
which candidate is real.  Survivors are the candidates whose feasible-answer
ball (and value interval) contains the chosen answer; a packing argument
keeps many candidates alive for a number of rounds proportional to the
budget w.  After the bump budget is exhausted the oracle answers truthfully
from the lowest-index survivor forever.

Geometry of one resisting round at query x_k:

- R_ball = r/8 for the first distinct query, else
  min(dist(x_k, nearest previous query)/4, r/8): bumps appended now can
  never touch any earlier query point, so past answers are frozen.
- compatible set: survivors at distance >= r/4 from x_k (at most one
  candidate can be closer, by separation).
- feasible ball of candidate j: center grad f_j(x_k) (tangent coordinates),
  radius g(R_ball)/w.
- all feasible balls provably lie in one enclosing ball: either centered at
  -log_{x_k}(x_ref) with radius 2r (far/first queries) or at the parallel
  transport of the previous answer gradient with radius
  (3 R_out sqrt(-K) + 2) dist(x_k, x_prev) (near queries); this is what the
  counting/volume argument runs on.
- the answer maximizes, over a deterministic candidate list, the number of
  feasible balls containing it; in value mode the value answer additionally
  stabs the deepest segment of the per-survivor feasible value intervals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import (
    ArgumentError,
    ConfigError,
    InvariantError,
    ResourceError,
    StateError,
)
from .functions import (
    BumpSpec,
    ExtensionSpec,
    HardFunction,
    bump_from_gradient,
    bump_grad,
    bump_value,
    combined_bump,
    fd_check,
    geodesic_second_diff,
    make_profile,
    smooth_extension_grad,
    smooth_extension_value,
    sqdist_grad,
    sqdist_value,
)
from .sampling import ball_points

MODE_GRADIENT = "gradient-only"
MODE_VALUE = "value-and-gradient"
DOMAIN_BOUNDED = "bounded"
DOMAIN_UNBOUNDED = "unbounded"

CASE_REPEAT = "repeat"
CASE_FAR = "case1"
CASE_NEAR = "case2"
CASE_OUTSIDE = "outside-R"
CASE_TRUTHFUL = "truthful"


# ------------------------------------------------------------ configuration


@dataclass
class OracleConfig:
    """Immutable description of one resisting-oracle instance.

    r_out is the domain radius: equal to r is typical for bounded runs; at
    least 2^11 r for unbounded runs (where it is also the radius beyond
    which the finalized function is exactly dist(., x_ref)^2/2).
    """

    space: object
    x_ref: object
    r: float
    r_out: float
    w: float
    candidates: list
    mode: str = MODE_GRADIENT
    query_domain: str = DOMAIN_BOUNDED
    constants_profile: str = "paper"

    def validate(self) -> None:
        sp = self.space
        if self.mode not in (MODE_GRADIENT, MODE_VALUE):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.query_domain not in (DOMAIN_BOUNDED, DOMAIN_UNBOUNDED):
            raise ConfigError(f"unknown query_domain {self.query_domain!r}")
        if self.constants_profile not in ("paper", "empirical"):
            raise ConfigError(f"unknown constants_profile {self.constants_profile!r}")
        if not (self.w >= 1.0):
            raise ConfigError(f"need w >= 1, got {self.w}")
        if not (self.r > 0.0) or not (self.r * sp.sqrt_mK >= 8.0):
            raise ConfigError(
                f"need r sqrt(-K) >= 8, got {self.r * sp.sqrt_mK}"
            )
        if self.query_domain == DOMAIN_BOUNDED:
            if self.r_out < self.r:
                raise ConfigError(f"bounded domain needs r_out >= r, got {self.r_out} < {self.r}")
        else:
            if self.r_out < 2.0 ** 11 * self.r:
                raise ConfigError(
                    f"unbounded domain needs r_out >= 2^11 r = {2.0**11 * self.r}, got {self.r_out}"
                )
            if self.mode != MODE_VALUE:
                raise ConfigError("unbounded domain requires value-and-gradient mode")
        if len(self.candidates) < 1:
            raise ConfigError("need at least one candidate")
        n = len(self.candidates)
        for i, z in enumerate(self.candidates):
            d = sp.dist(z, self.x_ref)
            if d > 0.75 * self.r * (1.0 + 1e-12):
                raise ConfigError(
                    f"candidate {i} at distance {d} from x_ref violates containment 3r/4 = {0.75*self.r}"
                )
        for i in range(n):
            for j in range(i + 1, n):
                d = sp.dist(self.candidates[i], self.candidates[j])
                if d < 0.5 * self.r * (1.0 - 1e-12):
                    raise ConfigError(
                        f"candidates {i},{j} at distance {d} violate separation r/2 = {0.5*self.r}"
                    )


# -------------------------------------------------------------- transcripts


@dataclass
class TranscriptRecord:
    """One answered query, as the querying algorithm saw it.

    f is None in gradient-only mode; r_ball is None on outside-domain rows
    (no bump geometry involved).  n_compat = |compatible set| before the
    round, n_active = |survivor set| after it.
    """

    k: int
    x: object
    f: float | None
    g: object
    r_ball: float | None
    case: str
    n_compat: int
    n_active: int


@dataclass
class Transcript:
    header: dict
    records: list


def transcript_to_jsonable(t: Transcript, space) -> dict:
    return {
        "header": t.header,
        "records": [
            {
                "k": rec.k,
                "x": space.serialize_point(rec.x),
                "f": rec.f,
                "g": space.serialize_tangent(rec.g),
                "r_ball": rec.r_ball,
                "case": rec.case,
                "n_compat": rec.n_compat,
                "n_active": rec.n_active,
            }
            for rec in t.records
        ],
    }


def transcript_from_jsonable(data: dict, space) -> Transcript:
    records = []
    for rec in data["records"]:
        records.append(
            TranscriptRecord(
                int(rec["k"]),
                space.deserialize_point(rec["x"]),
                None if rec["f"] is None else float(rec["f"]),
                space.deserialize_tangent(rec["g"]),
                None if rec["r_ball"] is None else float(rec["r_ball"]),
                str(rec["case"]),
                int(rec["n_compat"]),
                int(rec["n_active"]),
            )
        )
    return Transcript(dict(data["header"]), records)


# -------------------------------------------------------------------- state


@dataclass
class _HistoryEntry:
    x: object
    f_out: float | None
    g_out: object
    f_in: float | None
    g_in: object
    r_ball: float | None
    consumed: bool  # True iff the adversary state evolved (non-repeat, in-domain)


@dataclass
class OracleState:
    config: OracleConfig
    profile: object
    alive: list  # sorted candidate indices, the current survivor set A_k
    rounds: dict  # candidate index -> list of bump rounds (list[list[BumpSpec]])
    history: list = field(default_factory=list)
    records: list = field(default_factory=list)
    phase: str = "resisting"
    bump_rounds: int = 0
    budget: int = 0
    floor_log: list = field(default_factory=list)
    finalized: bool = False
    certificate: dict | None = None

    def transcript(self) -> Transcript:
        cfg = self.config
        header = {
            "manifold": cfg.space.descriptor(),
            "x_ref": cfg.space.serialize_point(cfg.x_ref),
            "r": cfg.r,
            "r_out": cfg.r_out,
            "w": cfg.w,
            "mode": cfg.mode,
            "query_domain": cfg.query_domain,
            "constants_profile": cfg.constants_profile,
            "n_candidates": len(cfg.candidates),
        }
        return Transcript(header, list(self.records))


def oracle_init(config: OracleConfig) -> OracleState:
    """Validate the configuration and start with every candidate alive."""
    config.validate()
    profile = make_profile(config.constants_profile, config.space.sqrt_mK)
    budget = (
        int(math.floor(2.0 * config.w))
        if config.mode == MODE_GRADIENT
        else int(math.floor(config.w))
    )
    return OracleState(
        config=config,
        profile=profile,
        alive=list(range(len(config.candidates))),
        rounds={j: [] for j in range(len(config.candidates))},
        budget=budget,
    )


# ----------------------------------------------------- candidate evaluation


def _candidate_fn(state: OracleState, j: int) -> HardFunction:
    """Current inner hard function of candidate j (no domain extension)."""
    bumps = [b for rnd in state.rounds[j] for b in rnd]
    return HardFunction(state.config.space, state.config.candidates[j], bumps, None)


def _inner_value(state: OracleState, j: int, x) -> float:
    sp = state.config.space
    v = sqdist_value(sp, state.config.candidates[j], x)
    for rnd in state.rounds[j]:
        for b in rnd:
            v += bump_value(sp, b, x)
    return v


def _inner_grad(state: OracleState, j: int, x):
    sp = state.config.space
    g = np.asarray(sqdist_grad(sp, state.config.candidates[j], x), float)
    for rnd in state.rounds[j]:
        for b in rnd:
            g = g + bump_grad(sp, b, x)
    return g


# ------------------------------------------------------------ ball argmax


class Selection(NamedTuple):
    """Result of candidate_argmax: the chosen point (ball coordinates), how
    many balls contain it, which ball indices those are, and the stabbed
    value when intervals were supplied."""

    point: object
    count: int
    members: tuple
    value: float | None


def _stab_intervals(intervals: list[tuple[float, float]], members: list[int]):
    """Deepest-point stab over the members' closed intervals.

    Evaluates the depth at every endpoint, takes the lowest endpoint
    attaining maximal depth, and stabs the midpoint between it and the
    smallest right end among the intervals active there (the first maximal
    segment).  Exact 1-d computation, no tolerance.
    """
    los = np.array([intervals[m][0] for m in members])
    his = np.array([intervals[m][1] for m in members])
    pts = np.concatenate([los, his])
    order = np.argsort(pts, kind="stable")
    best_depth = -1
    best_x = None
    for idx in order:
        x = pts[idx]
        depth = int(np.sum((los <= x) & (x <= his)))
        if depth > best_depth:
            best_depth = depth
            best_x = x
    active = (los <= best_x) & (best_x <= his)
    seg_hi = float(np.min(his[active]))
    stab = 0.5 * (float(best_x) + seg_hi)
    final = [m for m, a in zip(members, active) if a]
    return stab, best_depth, final


def candidate_argmax(
    balls: list,
    intervals: list | None = None,
    n_samples: int = 4096,
    seed: int = 0,
    dense_pitch: float | None = None,
) -> Selection:
    """Point covered by the most balls, over a deterministic candidate list.

    Candidates: all ball centers, all pairwise center midpoints, and
    n_samples low-discrepancy points of a ball enclosing the input balls
    (plus, when dense_pitch is given and the dimension is at most 3, a
    regular grid at that pitch -- the verification path for the covering
    count lower bound).  Ties resolve to the earliest candidate, so the
    result is bitwise deterministic.  The count is always >= 1 because each
    center lies in its own ball.  When intervals are given the stab value
    refines the membership set to the deepest value segment.
    """
    if len(balls) == 0:
        raise ArgumentError("candidate_argmax: need at least one ball")
    centers = np.array([np.asarray(c, float) for c, _ in balls])
    radii = np.array([float(r) for _, r in balls])
    if np.any(radii < 0.0):
        raise ArgumentError("candidate_argmax: negative radius")
    n, d = centers.shape

    c_e = centers.mean(axis=0)
    r_e = float(np.max(np.linalg.norm(centers - c_e, axis=1) + radii))

    blocks = [centers]
    if n >= 2:
        iu, ju = np.triu_indices(n, k=1)
        blocks.append(0.5 * (centers[iu] + centers[ju]))
    if r_e > 0.0 and n_samples > 0:
        blocks.append(c_e + r_e * ball_points(n_samples, d, seed=seed))
    cand = np.concatenate(blocks, axis=0)

    def counts_of(points):
        diff = points[:, None, :] - centers[None, :, :]
        dist2 = np.einsum("ijk,ijk->ij", diff, diff)
        inside = dist2 <= (radii * (1.0 + 1e-12)) ** 2
        return inside.sum(axis=1), inside

    counts, inside = counts_of(cand)
    best = int(np.argmax(counts))
    best_point = cand[best].copy()
    best_count = int(counts[best])
    best_inside = inside[best]

    if dense_pitch is not None:
        if d > 3:
            raise ArgumentError("dense grid refinement only supported for dimension <= 3")
        if not (dense_pitch > 0.0):
            raise ArgumentError(f"dense_pitch must be > 0, got {dense_pitch}")
        n_axis = int(math.floor(2.0 * r_e / dense_pitch)) + 1
        if n_axis**d > 2**22:
            raise ResourceError(f"dense grid of {n_axis}^{d} points exceeds the 2^22 cap")
        axes = [c_e[i] - r_e + dense_pitch * np.arange(n_axis) for i in range(d)]
        mesh = np.meshgrid(*axes, indexing="ij")
        grid = np.stack([m.ravel() for m in mesh], axis=1)
        keep = np.linalg.norm(grid - c_e, axis=1) <= r_e
        grid = grid[keep]
        if grid.shape[0] > 0:
            gcounts, ginside = counts_of(grid)
            gbest = int(np.argmax(gcounts))
            if int(gcounts[gbest]) > best_count:
                best_point = grid[gbest].copy()
                best_count = int(gcounts[gbest])
                best_inside = ginside[gbest]

    members = [int(i) for i in np.nonzero(best_inside)[0]]
    value = None
    if intervals is not None:
        if len(intervals) != n:
            raise ArgumentError("candidate_argmax: need one interval per ball")
        value, _, members = _stab_intervals(intervals, members)
    return Selection(best_point, best_count, tuple(members), value)


# ----------------------------------------------------------- enclosing ball


class EnclosingBall(NamedTuple):
    center: object
    radius: float
    case: str


def _nearest_prev(state: OracleState, x):
    """Nearest previous consumed query (lowest index on ties);
    None if there is none."""
    sp = state.config.space
    best = None
    best_d = math.inf
    for h in state.history:
        if not h.consumed:
            continue
        d = sp.dist(x, h.x)
        if d < best_d:
            best_d = d
            best = h
    return best, best_d


def enclosing_ball(state: OracleState, x_k, compat: list, grads=None) -> EnclosingBall:
    """Ball (tangent coordinates at x_k) provably containing every
    compatible candidate's feasible-answer ball.

    Far/first case: center -log_{x_k}(x_ref), radius 2r (logs are
    tangentially contracting, so candidate gradients sit within 3r/4 of the
    center, plus bump slack under r/2 for r sqrt(-K) >= 8).  Near case:
    center = parallel transport of the previous answered gradient, radius
    (3 r_out sqrt(-K) + 2) dist -- gradient drift along the connecting path
    is at most (2 r_out sqrt(-K) + 2) dist plus bump slack.
    """
    cfg = state.config
    sp = cfg.space
    prev, prev_d = _nearest_prev(state, x_k)
    if prev is None or sp.sqrt_mK * prev_d > 4.0:
        center_vec = -sp.log(x_k, cfg.x_ref)
        radius = 2.0 * cfg.r
        case = CASE_FAR
    else:
        transported = sp.parallel_transport(prev.x, x_k, prev.g_in)
        center_vec = transported
        radius = (3.0 * cfg.r_out * sp.sqrt_mK + 2.0) * prev_d
        case = CASE_NEAR
    center = sp.to_tangent_coords(x_k, center_vec)
    if grads is not None:
        r_ball_rad = grads["radius"]
        for c in grads["centers"]:
            gap = float(np.linalg.norm(np.asarray(c) - center)) + r_ball_rad
            if gap > radius / (1.0 - 1e-10):
                raise InvariantError(
                    f"feasible ball escapes the enclosing ball: {gap} > {radius} ({case})"
                )
    return EnclosingBall(center, radius, case)


# ------------------------------------------------------------------ answers


def _unbounded_wrap_answer(space, ext: ExtensionSpec, x, inner):
    """Generic domain wrapper: queries beyond r_out get the pure squared
    distance to x_ref (no inner call); queries inside get the inner answer
    pushed through the radial blend.  Returns (f, g, consumed_inner, tag)."""
    d_ref = space.dist(x, ext.x_ref)
    if d_ref > ext.r_out:
        f = 0.5 * d_ref * d_ref
        g = -space.log(x, ext.x_ref)
        return f, g, False, CASE_OUTSIDE
    f_in, g_in = inner()
    f = smooth_extension_value(space, ext, lambda _: f_in, x)
    g = smooth_extension_grad(space, ext, lambda _: f_in, lambda _: g_in, x)
    return f, g, True, None


def unbounded_wrap_answer(space, ext: ExtensionSpec, x, inner):
    """Public alias of the domain wrapper (inner: () -> (f, g))."""
    return _unbounded_wrap_answer(space, ext, x, inner)


def _append_record(state: OracleState, x, f_out, g_out, r_ball, case, n_compat):
    rec = TranscriptRecord(
        k=len(state.records),
        x=np.array(x, dtype=float, copy=True),
        f=f_out,
        g=np.array(g_out, dtype=float, copy=True),
        r_ball=r_ball,
        case=case,
        n_compat=n_compat,
        n_active=len(state.alive),
    )
    state.records.append(rec)
    return rec


def _truthful_round(state: OracleState, x, base: list, r_ball: float):
    """Answer exactly from the lowest-index candidate in `base`; keep the
    candidates whose answers match bitwise; append zero-bump rounds."""
    cfg = state.config
    sp = cfg.space
    j_star = base[0]
    g_star = _inner_grad(state, j_star, x)
    f_star = _inner_value(state, j_star, x) if cfg.mode == MODE_VALUE else None
    survivors = []
    for j in base:
        if j == j_star:
            survivors.append(j)
            continue
        gj = _inner_grad(state, j, x)
        if not np.array_equal(gj, g_star):
            continue
        if cfg.mode == MODE_VALUE and _inner_value(state, j, x) != f_star:
            continue
        survivors.append(j)
    zero = BumpSpec("zero", np.array(x, dtype=float, copy=True), 0.0, 0.0, r_ball, cfg.w)
    for j in survivors:
        state.rounds[j].append([zero])
    state.alive = survivors
    return f_star, g_star


def _resisting_round(state: OracleState, x, compat: list, r_ball: float):
    cfg = state.config
    sp = cfg.space
    prof = state.profile
    n_before = len(state.alive)

    grads = {j: _inner_grad(state, j, x) for j in compat}
    centers = [sp.to_tangent_coords(x, grads[j]) for j in compat]
    radius = prof.g_norm(r_ball) / cfg.w
    balls = [(c, radius) for c in centers]

    enc = enclosing_ball(state, x, compat, grads={"centers": centers, "radius": radius})

    intervals = None
    values = None
    if cfg.mode == MODE_VALUE:
        lo_off = -prof.a_of(r_ball) / cfg.w + 0.375 * r_ball * prof.g_norm(r_ball) / cfg.w
        hi_off = prof.a_of(r_ball) / cfg.w
        values = {j: _inner_value(state, j, x) for j in compat}
        intervals = [(values[j] + lo_off, values[j] + hi_off) for j in compat]

    sel = candidate_argmax(balls, intervals=intervals)
    if sel.count < 1 or len(sel.members) < 1:
        raise InvariantError("selection covered no feasible ball")

    g_ans = sp.from_tangent_coords(x, np.asarray(sel.point, float))
    f_ans = sel.value if cfg.mode == MODE_VALUE else None

    survivors = [compat[m] for m in sel.members]
    for j in survivors:
        delta = g_ans - grads[j]
        if cfg.mode == MODE_VALUE:
            rnd = combined_bump(sp, x, r_ball, cfg.w, f_ans - values[j], delta, profile=prof)
        else:
            rnd = [bump_from_gradient(sp, x, r_ball, cfg.w, delta, profile=prof)]
        state.rounds[j].append(rnd)
    state.alive = survivors
    state.bump_rounds += 1
    if state.bump_rounds >= state.budget:
        state.phase = "truthful"

    if cfg.constants_profile == "paper":
        denom = (2000.0 * cfg.w * (3.0 * cfg.r_out * sp.sqrt_mK + 2.0)) ** sp.dim
        state.floor_log.append(
            {"k": len(state.records), "floor": (n_before - 1) / denom}
        )
    return f_ans, g_ans, enc.case


def oracle_answer(state: OracleState, x):
    """Answer one query; returns (f, g) with f None in gradient-only mode."""
    cfg = state.config
    sp = cfg.space
    if state.finalized:
        raise StateError("oracle already finalized")
    x = np.asarray(x, float)
    sp.validate_point(x)

    # exact repeats reproduce the cached answer with no state evolution
    for h in state.history:
        if sp.point_equal(x, h.x):
            _append_record(state, x, h.f_out, h.g_out, h.r_ball, CASE_REPEAT,
                           n_compat=len(state.alive))
            state.history.append(
                _HistoryEntry(np.array(x, copy=True), h.f_out, h.g_out, h.f_in,
                              h.g_in, h.r_ball, consumed=False)
            )
            return h.f_out, np.array(h.g_out, copy=True)

    d_ref = sp.dist(x, cfg.x_ref)
    if cfg.query_domain == DOMAIN_UNBOUNDED and d_ref > cfg.r_out:
        f_out = 0.5 * d_ref * d_ref
        g_out = -sp.log(x, cfg.x_ref)
        _append_record(state, x, f_out, g_out, None, CASE_OUTSIDE,
                       n_compat=len(state.alive))
        state.history.append(
            _HistoryEntry(np.array(x, copy=True), f_out, np.array(g_out, copy=True),
                          None, None, None, consumed=False)
        )
        return f_out, g_out
    if cfg.query_domain == DOMAIN_BOUNDED and d_ref > cfg.r_out * (1.0 + 1e-12):
        raise ArgumentError(
            f"query at distance {d_ref} from x_ref is outside the bounded domain radius {cfg.r_out}"
        )

    prev, prev_d = _nearest_prev(state, x)
    if prev is not None and prev_d == 0.0:
        # geometrically identical to an earlier query (distinct bits):
        # answers are a function of the point, so reuse the cached one
        _append_record(state, x, prev.f_out, prev.g_out, prev.r_ball, CASE_REPEAT,
                       n_compat=len(state.alive))
        state.history.append(
            _HistoryEntry(np.array(x, copy=True), prev.f_out, prev.g_out,
                          prev.f_in, prev.g_in, prev.r_ball, consumed=False)
        )
        return prev.f_out, np.array(prev.g_out, copy=True)

    r_ball = cfg.r / 8.0 if prev is None else min(0.25 * prev_d, cfg.r / 8.0)

    compat = [j for j in state.alive if sp.dist(x, cfg.candidates[j]) >= 0.25 * cfg.r]
    if len(state.alive) - len(compat) > 1:
        raise InvariantError(
            "more than one candidate within r/4 of the query despite r/2 separation"
        )

    if len(compat) == 0:
        f_in, g_in = _truthful_round(state, x, list(state.alive), r_ball)
        case = CASE_TRUTHFUL
        n_compat = 0
    elif state.phase == "truthful":
        f_in, g_in = _truthful_round(state, x, compat, r_ball)
        case = CASE_TRUTHFUL
        n_compat = len(compat)
    else:
        f_in, g_in, case = _resisting_round(state, x, compat, r_ball)
        n_compat = len(compat)

    if len(state.alive) < 1:
        raise InvariantError("survivor set became empty")

    if cfg.query_domain == DOMAIN_UNBOUNDED:
        ext = ExtensionSpec(cfg.x_ref, cfg.r, cfg.r_out)
        f_out = smooth_extension_value(sp, ext, lambda _: f_in, x)
        g_out = smooth_extension_grad(sp, ext, lambda _: f_in, lambda _: g_in, x)
    else:
        f_out, g_out = f_in, g_in

    f_rep = f_out if cfg.mode == MODE_VALUE else None
    _append_record(state, x, f_rep, g_out, r_ball, case, n_compat)
    state.history.append(
        _HistoryEntry(np.array(x, copy=True), f_rep,
                      np.array(g_out, dtype=float, copy=True), f_in,
                      np.array(g_in, dtype=float, copy=True), r_ball, consumed=True)
    )
    return f_rep, np.array(g_out, copy=True)


# ------------------------------------------------------------------ closing


def oracle_finalize(state: OracleState, j: int | None = None, certify: bool | None = None) -> HardFunction:
    """Commit to one surviving candidate and return its hard function.

    Unbounded configurations wrap the function in the radial extension.  The
    gradient at the minimizer is certified tiny (bump supports never reach
    within r/8 of any surviving candidate).  With the empirical profile (or
    certify=True) the budgets and strong convexity are additionally
    spot-checked by finite differences at the answered queries.
    """
    cfg = state.config
    sp = cfg.space
    if state.finalized:
        raise StateError("oracle already finalized")
    if j is None:
        j = state.alive[0]
    elif j not in state.alive:
        raise ArgumentError(f"candidate {j} is not in the survivor set {state.alive}")
    bumps = [b for rnd in state.rounds[j] for b in rnd]
    ext = (
        ExtensionSpec(cfg.x_ref, cfg.r, cfg.r_out)
        if cfg.query_domain == DOMAIN_UNBOUNDED
        else None
    )
    h = HardFunction(sp, cfg.candidates[j], bumps, ext)

    gn_min = sp.norm(cfg.candidates[j], h.grad(cfg.candidates[j]))
    if gn_min > 1e-9:
        raise InvariantError(f"gradient at the minimizer is {gn_min} > 1e-9")

    if certify is None:
        certify = cfg.constants_profile == "empirical"
    if certify:
        per_round = 0.25 if cfg.mode == MODE_GRADIENT else 0.5
        mu_expected = 1.0 - state.bump_rounds * per_round / cfg.w
        pts = [hh.x for hh in state.history if hh.consumed][-5:]
        worst_fd = 0.0
        worst_mu = math.inf
        scale = min(1.0, cfg.r / 8.0)
        for xm in pts:
            worst_fd = max(worst_fd, fd_check(sp, h.value, h.grad, xm, length_scale=scale))
            for v in sp.tangent_basis(xm):
                sd = geodesic_second_diff(sp, h.value, xm, v, 1e-3 * scale)
                worst_mu = min(worst_mu, sd)
        if worst_fd > 1e-5:
            raise InvariantError(f"finalize certification: gradient FD error {worst_fd}")
        if pts and worst_mu < mu_expected - 1e-3:
            raise InvariantError(
                f"finalize certification: second difference {worst_mu} below mu = {mu_expected}"
            )
        state.certificate = {
            "fd_worst": worst_fd,
            "second_diff_min": None if not pts else worst_mu,
            "mu_expected": mu_expected,
            "n_points": len(pts),
        }
    state.finalized = True
    return h


def check_state_consistency(state: OracleState, tol: float = 1e-9):
    """Worst deviation of each live candidate's current function from every
    answered (inner) value/gradient; the construction keeps these at float
    noise.  Returns (worst_value_dev, worst_grad_dev)."""
    cfg = state.config
    sp = cfg.space
    worst_v = 0.0
    worst_g = 0.0
    for j in state.alive:
        for h in state.history:
            if not h.consumed:
                continue
            gj = _inner_grad(state, j, h.x)
            worst_g = max(
                worst_g,
                sp.norm(h.x, gj - h.g_in) / max(1.0, sp.norm(h.x, h.g_in)),
            )
            if h.f_in is not None:
                vj = _inner_value(state, j, h.x)
                worst_v = max(worst_v, abs(vj - h.f_in) / max(1.0, abs(h.f_in)))
    if worst_v > tol or worst_g > tol:
        raise InvariantError(
            f"active candidate deviates from answered history: value {worst_v}, grad {worst_g}"
        )
    return worst_v, worst_g


# ------------------------------------------------------------- verification


def verify_transcript(transcript: Transcript, h: HardFunction,
                      tol_value: float = 1e-8, tol_grad: float = 1e-8) -> dict:
    """Check the finalized function against every transcript row.

    Value rows must match to tol_value * max(1, |f|), gradients to
    tol_grad * max(1, |g|); every query strictly before the first one inside
    B(minimizer, r/4) must be at distance >= r/4 (scoped: once the minimizer
    ball has been entered the lower bound no longer applies).
    """
    sp = h.space
    r = float(transcript.header["r"])
    worst_v = 0.0
    worst_g = 0.0
    first_hit = None
    dists = []
    for idx, rec in enumerate(transcript.records):
        d = sp.dist(rec.x, h.minimizer)
        dists.append(d)
        if first_hit is None and d < 0.25 * r:
            first_hit = idx
        if rec.f is not None:
            fv = h.value(rec.x)
            worst_v = max(worst_v, abs(fv - rec.f) / max(1.0, abs(rec.f)))
        gv = h.grad(rec.x)
        worst_g = max(
            worst_g,
            sp.norm(rec.x, gv - rec.g) / max(1.0, sp.norm(rec.x, rec.g)),
        )
    pre = dists if first_hit is None else dists[:first_hit]
    min_prehit = min(pre) if pre else math.inf
    ok = (
        worst_v <= tol_value
        and worst_g <= tol_grad
        and (min_prehit >= 0.25 * r or not pre)
    )
    return {
        "ok": bool(ok),
        "worst_value_dev": worst_v,
        "worst_grad_dev": worst_g,
        "first_hit": first_hit,
        "min_prehit_dist": min_prehit,
        "n_records": len(transcript.records),
    }
