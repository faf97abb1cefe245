r"""Experiment harness: theorem constants, runs, sweeps, verification suites.

compute_constants turns a radius (or a condition-number target) into the
derived quantities of the lower-bound construction:

  c~   candidate-count exponent rate: d sqrt(-K)/8 of the (slice) geometry
  r~   minimal radius for the geometric packing argument: 4/sqrt(-K)
  w    bump-budget weight: c~ r / (4 d) in gradient mode, c~ r/(d+2) in
       value mode
  T    certified query lower bound:
         gradient: floor( 2w / ln(2000 * 2w * (3 R_out sqrt(-K) + 2)) )
         value:    floor(  w / ln(2000 *  w * (3 R_out sqrt(-K) + 2)) )
  R_out domain radius: r when bounded, 2^9 r ln(r sqrt(-K))^2 when unbounded
  N_floor candidate count needed for the counting argument: ceil(e^{c~ r})
  kappa  condition number of the hard instances:
         bounded 4 r sqrt(-K) + 3, unbounded 12 r sqrt(-K) + 9 (ambient
         lower curvature bound; for the determinant-one matrix slice that is
         K = -1/2, giving 6 sqrt(2) r + 9)

plus feasibility flags (trig overflow beyond r sqrt(-K) = 600; the packing /
budget preconditions r >= max(r~, 8/sqrt(-K), 4(d+2)/c~)).  N_floor is
astronomically large at theorem scales; desk runs cap the candidate list and
report the formula value verbatim (Infinity once past float range).

run_experiment drives an optimizer against a resisting oracle built from
those constants, writes transcript.jsonl / hardfn.json / report.json
(deterministic bytes), and succeeds iff the replay suite passes and the
first entry into B(minimizer, stop_radius) is not earlier than T.

verify_all executes ten numbered self-check suites (geometry identities,
bump calculus, packing, divergence, the covering-count bound, extension
convexity, the step-function inequality, matrix-slice curvature, oracle
invariants, replay), each reporting a worst margin; a negative control
corrupts a bump budget and demands the relevant suite catches it.
"""

from __future__ import annotations

import concurrent.futures
import math
import os
from dataclasses import dataclass, replace

import numpy as np

from .errors import ArgumentError, ConfigError
from .flat import FlatSpace
from .functions import (
    ExtensionSpec,
    HardFunction,
    bump_from_gradient,
    bump_grad,
    bump_value,
    fd_check,
    g_norm,
    geodesic_second_diff,
    gradient_bump_center_value,
    hardfn_from_jsonable,
    hardfn_to_jsonable,
    smooth_extension_value,
    t_inequality_check,
)
from .hyperbolic import HyperbolicSpace, hyperbolic_law_of_cosines
from .optim import ProjectedRGD, RGDUnconstrained, TangentNAG, run_against
from .oracle import (
    OracleConfig,
    candidate_argmax,
    check_state_consistency,
    oracle_answer,
    oracle_finalize,
    oracle_init,
    transcript_from_jsonable,
    transcript_to_jsonable,
    verify_transcript,
)
from .sampling import ball_points, sphere_points
from .serialize import atomic_write_text, dumps, loads, read_jsonl, write_jsonl
from .spd import SPDSpace

_OVERFLOW_SCALE = 600.0


# -------------------------------------------------------------- experiment


@dataclass
class ExperimentConfig:
    manifold: str = "hyperbolic"
    dim: int = 2
    K: float = -1.0
    n: int = 3
    det_one: bool = True
    r: float | None = None
    kappa: float | None = None
    mode: str = "gradient-only"
    query_domain: str = "bounded"
    constants_profile: str = "paper"
    algorithm: str = "projected-rgd"
    max_queries: int = 32
    seed: int = 0
    candidate_cap: int = 64
    stop_radius: float | None = None
    out_transcript: str = "transcript.jsonl"
    out_hardfn: str = "hardfn.json"
    out_report: str = "report.json"


_BOOL = {"true": True, "false": False, "1": True, "0": False, "yes": True, "no": False}
_FIELDS = {f.name: f.type for f in ExperimentConfig.__dataclass_fields__.values()}


def parse_config(text: str) -> ExperimentConfig:
    """Parse the flat key=value format (# starts a comment)."""
    kw = {}
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {ln}: expected key=value, got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _FIELDS:
            raise ConfigError(f"line {ln}: unknown key {key!r}")
        if key in ("dim", "n", "max_queries", "seed", "candidate_cap"):
            kw[key] = int(val)
        elif key in ("K", "r", "kappa", "stop_radius"):
            kw[key] = float(val)
        elif key == "det_one":
            if val.lower() not in _BOOL:
                raise ConfigError(f"line {ln}: bad boolean {val!r}")
            kw[key] = _BOOL[val.lower()]
        else:
            kw[key] = val
    return ExperimentConfig(**kw)


def config_to_dict(cfg: ExperimentConfig) -> dict:
    return {name: getattr(cfg, name) for name in _FIELDS}


def build_space(cfg: ExperimentConfig):
    if cfg.manifold == "hyperbolic":
        return HyperbolicSpace(cfg.dim, cfg.K)
    if cfg.manifold == "spd":
        return SPDSpace(cfg.n, det_one=cfg.det_one)
    if cfg.manifold == "flat":
        return FlatSpace(cfg.dim)
    raise ConfigError(f"unknown manifold {cfg.manifold!r}")


# ---------------------------------------------------------------- constants


@dataclass
class ConstantsReport:
    r: float
    kappa: float
    r_tilde: float
    c_tilde: float
    w: float
    T: int
    R_out: float
    n_floor: float
    overflow_risk: bool
    precondition_ok: bool
    mode: str
    query_domain: str

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "kappa": self.kappa,
            "r_tilde": self.r_tilde,
            "c_tilde": self.c_tilde,
            "w": self.w,
            "T": self.T,
            "R_out": self.R_out,
            "n_floor": self.n_floor,
            "overflow_risk": self.overflow_risk,
            "precondition_ok": self.precondition_ok,
            "mode": self.mode,
            "query_domain": self.query_domain,
        }


def _slice_geometry(cfg: ExperimentConfig):
    """(counting dimension, sqrt(-K) of the packing slice, ambient sqrt(-K))."""
    if cfg.manifold == "hyperbolic":
        sk = math.sqrt(-cfg.K)
        return cfg.dim, sk, sk
    if cfg.manifold == "spd":
        if not cfg.det_one:
            raise ConfigError("theorem constants require the determinant-one slice")
        sp = SPDSpace(cfg.n, det_one=True)
        slice_space, slice_K = sp.hyperbolic_slice()
        return slice_space.dim, math.sqrt(-slice_K), sp.sqrt_mK
    raise ConfigError(f"no theorem constants for manifold {cfg.manifold!r}")


def _kappa_of_r(cfg: ExperimentConfig, r: float, ambient_sk: float) -> float:
    if cfg.manifold == "spd":
        return 12.0 * r * ambient_sk + 9.0  # = 6 sqrt(2) r + 9
    if cfg.query_domain == "bounded":
        return 4.0 * r * ambient_sk + 3.0
    return 12.0 * r * ambient_sk + 9.0


def _r_of_kappa(cfg: ExperimentConfig, kappa: float, ambient_sk: float) -> float:
    if cfg.manifold == "spd":
        return (kappa - 9.0) / (12.0 * ambient_sk)
    if cfg.query_domain == "bounded":
        return (kappa - 3.0) / (4.0 * ambient_sk)
    return (kappa - 9.0) / (12.0 * ambient_sk)


def compute_constants(cfg: ExperimentConfig) -> ConstantsReport:
    """Derived constants of the construction for one experiment config."""
    if (cfg.r is None) == (cfg.kappa is None):
        raise ConfigError("exactly one of r and kappa must be given")
    d, slice_sk, ambient_sk = _slice_geometry(cfg)
    if cfg.r is not None:
        r = float(cfg.r)
        kappa = _kappa_of_r(cfg, r, ambient_sk)
    else:
        kappa = float(cfg.kappa)
        r = _r_of_kappa(cfg, kappa, ambient_sk)
    if not (r > 0.0):
        raise ConfigError(f"derived radius must be positive, got {r}")

    c_tilde = d * slice_sk / 8.0
    r_tilde = 4.0 / slice_sk

    if cfg.query_domain == "bounded":
        r_out = r
    else:
        r_out = 2.0**9 * r * math.log(r * ambient_sk) ** 2

    if cfg.mode == "gradient-only":
        w = c_tilde * r / (4.0 * d)
        numer = 2.0 * w
    elif cfg.mode == "value-and-gradient":
        w = c_tilde * r / (d + 2.0)
        numer = w
    else:
        raise ConfigError(f"unknown mode {cfg.mode!r}")
    log_arg = 2000.0 * numer * (3.0 * r_out * ambient_sk + 2.0)
    T = int(math.floor(numer / math.log(log_arg))) if log_arg > 1.0 else 0

    expo = c_tilde * r
    n_floor = math.inf if expo > 709.0 else float(math.ceil(math.exp(expo)))

    overflow = r * ambient_sk > _OVERFLOW_SCALE
    precond = r >= max(r_tilde, 8.0 / ambient_sk, 4.0 * (d + 2.0) / c_tilde)
    return ConstantsReport(
        r=r, kappa=kappa, r_tilde=r_tilde, c_tilde=c_tilde, w=w, T=T,
        R_out=r_out, n_floor=n_floor, overflow_risk=overflow,
        precondition_ok=precond, mode=cfg.mode, query_domain=cfg.query_domain,
    )


# --------------------------------------------------------------------- runs


def _make_algorithm(name: str, space, x_ref, r: float, L: float):
    if name == "projected-rgd":
        return ProjectedRGD(L, x_ref, r)
    if name == "rgd":
        return RGDUnconstrained(1.0 / L)
    if name == "tangent-nag":
        return TangentNAG(L, 0.5, x_ref)
    raise ConfigError(f"unknown algorithm {name!r}")


def _transcript_invariants(records: list, r: float) -> tuple[bool, str]:
    prev_active = None
    for rec in records:
        if rec.n_active < 1:
            return False, f"record {rec.k}: empty survivor set"
        if prev_active is not None and rec.n_active > prev_active:
            return False, f"record {rec.k}: survivor set grew"
        prev_active = rec.n_active
        if rec.case not in ("repeat", "outside-R") and rec.r_ball is not None:
            if not (0.0 < rec.r_ball <= r / 8.0 * (1.0 + 1e-12)):
                return False, f"record {rec.k}: r_ball {rec.r_ball} outside (0, r/8]"
    return True, ""


def run_experiment(cfg: ExperimentConfig, write: bool = True):
    """Execute one oracle-vs-optimizer run; returns (exit_ok, report dict)."""
    space = build_space(cfg)
    consts = compute_constants(cfg)
    r = consts.r
    x_ref = space.origin()
    ambient_sk = space.sqrt_mK

    candidates = space.ball_packing(x_ref, r, count_cap=cfg.candidate_cap, seed=cfg.seed)
    w_used = max(1.0, consts.w)
    r_out = consts.R_out
    ocfg = OracleConfig(
        space=space, x_ref=x_ref, r=r, r_out=r_out, w=w_used,
        candidates=list(candidates), mode=cfg.mode, query_domain=cfg.query_domain,
        constants_profile=cfg.constants_profile,
    )
    state = oracle_init(ocfg)
    L = 2.0 * r * ambient_sk + 1.5
    alg = _make_algorithm(cfg.algorithm, space, x_ref, r, L)
    stop_radius = cfg.stop_radius if cfg.stop_radius is not None else 0.25 * r
    res = run_against(alg, state, cfg.max_queries, stop_radius=stop_radius)

    inv_ok, inv_msg = _transcript_invariants(res.transcript.records, r)
    horizon = None
    for rec in res.transcript.records:
        if rec.n_active == 1:
            horizon = rec.k
            break
    first_hit_ok = res.first_hit is None or res.first_hit >= consts.T
    exit_ok = bool(res.verify["ok"] and inv_ok and first_hit_ok)

    report = {
        "config": config_to_dict(cfg),
        "constants": consts.to_dict(),
        "run": {
            "algorithm": cfg.algorithm,
            "w_used": w_used,
            "n_candidates": len(candidates),
            "n_queries": res.n_queries,
            "first_hit": res.first_hit,
            "first_hit_threshold_T": consts.T,
            "resistance_horizon": horizon,
            "min_active": min(res.active_sizes) if res.active_sizes else None,
            "stop_radius": stop_radius,
            "invariants_ok": inv_ok,
            "invariants_msg": inv_msg,
            "verify": res.verify,
            "floor_log": state.floor_log,
            "exit_ok": exit_ok,
        },
    }
    if write:
        t_json = transcript_to_jsonable(res.transcript, space)
        rows = [t_json["header"]] + t_json["records"]
        write_jsonl(cfg.out_transcript, rows)
        atomic_write_text(cfg.out_hardfn, dumps(hardfn_to_jsonable(res.hardfn)) + "\n")
        atomic_write_text(cfg.out_report, dumps(report) + "\n")
    return exit_ok, report


def replay_files(transcript_path: str, hardfn_path: str) -> dict:
    """Re-check a stored transcript against a stored hard function."""
    rows = read_jsonl(transcript_path)
    if not rows:
        raise ArgumentError(f"empty transcript {transcript_path}")
    header, recs = rows[0], rows[1:]
    with open(hardfn_path) as fh:
        h = hardfn_from_jsonable(loads(fh.read()))
    t = transcript_from_jsonable({"header": header, "records": recs}, h.space)
    return verify_transcript(t, h)


# -------------------------------------------------------------------- sweep


def _sweep_one(args):
    cfg, value, by = args
    cfg = replace(cfg, **{by: value, **{("kappa" if by == "r" else "r"): None}})
    consts = compute_constants(cfg)
    ok, report = run_experiment(cfg, write=False)
    run = report["run"]
    return {
        "kappa": consts.kappa,
        "r": consts.r,
        "T_computed": consts.T,
        "first_hit": run["first_hit"],
        "min_active_set": run["min_active"],
        "verified": bool(run["verify"]["ok"] and run["invariants_ok"]),
    }


def sweep(cfg: ExperimentConfig, values: list, by: str = "r",
          jobs: int = 1, out_csv: str | None = "sweep.csv") -> list:
    """Run one experiment per value of r (or kappa); write a CSV sorted by
    kappa with columns kappa,r,T_computed,first_hit,min_active_set,verified.
    out_csv=None skips the file and just returns the rows."""
    if by not in ("r", "kappa"):
        raise ArgumentError(f"sweep: by must be 'r' or 'kappa', got {by!r}")
    if not values:
        raise ArgumentError("sweep: need at least one value")
    tasks = [(cfg, float(v), by) for v in values]
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(_sweep_one, tasks))
    else:
        rows = [_sweep_one(t) for t in tasks]
    rows.sort(key=lambda row: row["kappa"])
    lines = ["kappa,r,T_computed,first_hit,min_active_set,verified"]
    for row in rows:
        fh = "inf" if row["first_hit"] is None else str(row["first_hit"])
        lines.append(
            f"{row['kappa']:.17g},{row['r']:.17g},{row['T_computed']},{fh},"
            f"{row['min_active_set']},{str(row['verified']).lower()}"
        )
    if out_csv is not None:
        atomic_write_text(out_csv, "\n".join(lines) + "\n")
    return rows


# -------------------------------------------------------- verification suites


def _suite(name, ok, margin, detail=""):
    return {"name": name, "ok": bool(ok), "margin": float(margin), "detail": detail}


def _suite_comparison_identities():
    worst = 0.0
    for dim, K in ((2, -1.0), (3, -0.25)):
        sp = HyperbolicSpace(dim, K)
        o = sp.origin()
        dirs = sphere_points(64, dim, seed=3)
        # law of cosines against two-leg triangles from the origin
        for i in range(24):
            b = 0.5 + 0.35 * i
            c = 9.5 - 0.3 * i
            u, v = dirs[2 * i], dirs[2 * i + 1]
            alpha = math.acos(max(-1.0, min(1.0, float(u @ v))))
            y = sp.exp(o, sp.from_tangent_coords(o, b * u))
            z = sp.exp(o, sp.from_tangent_coords(o, c * v))
            a_direct = sp.dist(y, z)
            a_law = hyperbolic_law_of_cosines(sp, b, c, alpha)
            worst = max(worst, abs(a_direct - a_law) / max(1.0, a_law))
        # exp/log round trips at moderate radius
        for i in range(24):
            rho = 0.2 + 0.4 * i
            x = sp.exp(o, sp.from_tangent_coords(o, rho * dirs[i]))
            v = sp.from_tangent_coords(x, 1.7 * np.asarray(dirs[i + 1][:dim]))
            y = sp.exp(x, v)
            v_back = sp.log(x, y)
            worst = max(worst, float(sp.norm(x, v_back - v)) / max(1.0, sp.norm(x, v)))
            # transport isometry
            t = sp.parallel_transport(x, y, v)
            worst = max(worst, abs(sp.norm(y, t) - sp.norm(x, v)) / max(1.0, sp.norm(x, v)))
    return _suite("comparison-identities", worst <= 1e-9, worst,
                  "law of cosines, exp/log round trips, transport isometry")


def _suite_bump_derivatives(corrupt: bool = False):
    sp = HyperbolicSpace(2, -1.0)
    o = sp.origin()
    worst = 0.0
    rng = np.random.default_rng(12)
    for trial in range(10):
        r_ball = float(rng.uniform(0.2, 4.0))
        w = float(rng.uniform(1.0, 30.0))
        x = sp.exp(o, sp.from_tangent_coords(o, rng.normal(size=2)))
        cap = g_norm(r_ball, sp.sqrt_mK) / w
        gc = rng.normal(size=2)
        gc *= rng.uniform(0.1, 0.98) * cap / np.linalg.norm(gc)
        g = sp.from_tangent_coords(x, gc)
        b = bump_from_gradient(sp, x, r_ball, w, g)
        if corrupt:
            b.amplitude *= 1.5  # negative control: budget violation
        err = fd_check(sp, lambda y: bump_value(sp, b, y), lambda y: bump_grad(sp, b, y),
                       x, length_scale=min(1.0, b.support))
        worst = max(worst, err)
        gn = sp.norm(x, g)
        centre = bump_value(sp, b, x)
        target = gradient_bump_center_value(gn, w, sp.sqrt_mK)
        worst = max(worst, abs(centre - target) / max(1e-300, target))
        for p in ball_points(30, 2, seed=trial):
            y = sp.exp(b.anchor, sp.from_tangent_coords(b.anchor, p * b.support))
            over = sp.norm(y, bump_grad(sp, b, y)) - 1.0 / (4.0 * w * sp.sqrt_mK)
            worst = max(worst, over)
    return _suite("bump-derivatives", worst <= 1e-6, worst,
                  "FD gradients, center value identity, gradient budget")


def _suite_packing():
    worst = math.inf
    detail = []
    for dim, K, rsk in ((2, -1.0, 8.0), (3, -1.0, 8.0), (2, -0.25, 16.0)):
        sp = HyperbolicSpace(dim, K)
        r = rsk / sp.sqrt_mK
        pts = sp.ball_packing(sp.origin(), r, count_cap=48, seed=0)
        target = min(48, math.ceil(math.exp(dim * rsk / 8.0)))
        if len(pts) < target:
            return _suite("packing", False, len(pts) - target,
                          f"expected >= {target} candidates, got {len(pts)}")
        dmin = math.inf
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                dmin = min(dmin, sp.dist(pts[i], pts[j]))
            cont = sp.dist(pts[i], sp.origin())
            if cont > 0.75 * r * (1 + 1e-12):
                return _suite("packing", False, cont - 0.75 * r, "containment violated")
        worst = min(worst, dmin - 0.5 * r)
        detail.append(f"d={dim} n={len(pts)} min_sep={dmin:.4g} (r/2={0.5*r:.4g})")
    return _suite("packing", worst >= 0.0, worst, "; ".join(detail))


def _suite_geodesics_diverge():
    sp = HyperbolicSpace(2, -1.0)
    worst = math.inf
    for s in list(range(3, 51, 3)) + [50]:
        gap = sp.geodesics_diverge_gap(sp.origin(), float(s))
        worst = min(worst, gap - (2.0 / 3.0) * s)
    return _suite("geodesics-diverge", worst >= 0.0, worst,
                  "perpendicular geodesic endpoints separate by > 2s/3")


def _suite_volume_lemma(n_instances: int = 10):
    worst = math.inf
    rng = np.random.default_rng(42)
    for inst in range(n_instances):
        spread = float(rng.uniform(1.0, 3.0))
        q = spread * float(rng.uniform(0.22, 0.4))
        centers = spread * ball_points(12, 2, seed=inst)
        balls = [(c, q) for c in centers]
        sel = candidate_argmax(balls, dense_pitch=q / 20.0)
        # pigeonhole floor over the same enclosing ball candidate_argmax uses
        c_e = centers.mean(axis=0)
        r_e = float(np.max(np.linalg.norm(centers - c_e, axis=1))) + q
        floor = math.ceil(12 * q * q / (r_e * r_e))
        worst = min(worst, sel.count - floor)
    return _suite("volume-lemma-grid", worst >= 0.0, worst,
                  "grid-refined deepest point covers >= n q^2 / r^2 balls")


def _suite_extension_convexity():
    sp = HyperbolicSpace(2, -1.0)
    o = sp.origin()
    r, r_out = 0.01, 2.0**11 * 0.01
    ext = ExtensionSpec(o, r, r_out)
    # admissible perturbation: one gradient bump within the stated budgets
    x_p = sp.exp(o, sp.from_tangent_coords(o, np.array([0.4 * r, 0.0])))
    cap = g_norm(r / 8.0, 1.0)
    g = sp.from_tangent_coords(x_p, np.array([0.0, 0.5 * cap]))
    bump = bump_from_gradient(sp, x_p, r / 8.0, 1.0, g)
    h = HardFunction(sp, o, [bump], None)
    value_fn = lambda y: h.value(y)

    y_in = sp.exp(o, sp.from_tangent_coords(o, np.array([0.5 * r, 0.2 * r])))
    if smooth_extension_value(sp, ext, value_fn, y_in) != value_fn(y_in):
        return _suite("extension-convexity", False, -1.0, "identity inside r broken")
    y_out = sp.exp(o, sp.from_tangent_coords(o, np.array([1.5 * r_out, 0.0])))
    d_out = sp.dist(y_out, o)
    if abs(smooth_extension_value(sp, ext, value_fn, y_out) - 0.5 * d_out * d_out) > 1e-9 * d_out * d_out:
        return _suite("extension-convexity", False, -1.0, "identity outside R_out broken")

    worst = math.inf
    dirs = sphere_points(8, 2, seed=1)
    radii = np.geomspace(1.01 * r, 0.99 * r_out, 125)
    for rho in radii:
        for u in dirs[:4]:
            y = sp.exp(o, sp.from_tangent_coords(o, rho * u))
            for v in sp.tangent_basis(y):
                sd = geodesic_second_diff(
                    sp, lambda q: smooth_extension_value(sp, ext, value_fn, q),
                    y, v, 1e-3 * min(1.0, rho))
                worst = min(worst, sd)
    return _suite("extension-convexity", worst >= 1.0 / 6.0 - 1e-3, worst,
                  "second differences across the blend band vs 1/6")


def _suite_t_inequality():
    worst = math.inf
    for c in (9.0, 25.0, 100.0, 1e4):
        m, bound = t_inequality_check(c)
        worst = min(worst, m - bound)
    return _suite("t-inequality", worst >= 0.0, worst,
                  "1 - t - |t'|/c above -2 exp(-sqrt(c/2)) for c in {9,25,100,1e4}")


def _suite_spd_curvature():
    sp = SPDSpace(3, det_one=True)
    worst = 0.0
    # bordered tangent plane: constant curvature -1/8
    for i in range(8):
        rng = np.random.default_rng(100 + i)
        a = rng.normal(size=2)
        b = rng.normal(size=2)
        X = np.zeros((3, 3)); Y = np.zeros((3, 3))
        X[0, 2] = X[2, 0] = a[0]; X[1, 2] = X[2, 1] = a[1]
        Y[0, 2] = Y[2, 0] = b[0]; Y[1, 2] = Y[2, 1] = b[1]
        if abs(np.linalg.det(np.array([[X[0,2], X[1,2]], [Y[0,2], Y[1,2]]]))) < 1e-3:
            continue
        sec = sp.sectional_curvature(np.eye(3), X, Y)
        worst = max(worst, abs(sec + 0.125))
    # random planes within [-1/2, 0]
    rng = np.random.default_rng(7)
    for _ in range(200):
        X = rng.normal(size=(3, 3)); X = X + X.T
        Y = rng.normal(size=(3, 3)); Y = Y + Y.T
        sec = sp.sectional_curvature(np.eye(3), X, Y)
        worst = max(worst, sec - 1e-9, (-0.5 - 1e-9) - sec)
    # determinant stays one along slice geodesics
    for i in range(10):
        rng = np.random.default_rng(200 + i)
        X = rng.normal(size=(3, 3)); X = X + X.T
        X = X - np.trace(X) / 3.0 * np.eye(3)
        P = sp.exp(np.eye(3), 0.7 * X)
        worst = max(worst, abs(np.linalg.det(P) - 1.0))
    return _suite("spd-curvature", worst <= 1e-8, worst,
                  "embedded-plane curvature -1/8, range [-1/2, 0], det-one geodesics")


def _suite_oracle_consistency():
    sp = HyperbolicSpace(2, -1.0)
    r = 10.0
    cands = sp.ball_packing(sp.origin(), r, count_cap=12, seed=0)
    cfg = OracleConfig(sp, sp.origin(), r, r, 3.0, list(cands))
    st = oracle_init(cfg)
    rng = np.random.default_rng(1)
    for _ in range(10):
        rho = rng.uniform(0.4, 0.93 * r)
        th = rng.uniform(0.0, 2.0 * math.pi)
        q = sp.exp(sp.origin(), sp.from_tangent_coords(
            sp.origin(), rho * np.array([math.cos(th), math.sin(th)])))
        oracle_answer(st, q)
    wv, wg = check_state_consistency(st)
    h = oracle_finalize(st)
    rep = verify_transcript(st.transcript(), h)
    worst = max(wv, wg, rep["worst_value_dev"], rep["worst_grad_dev"])
    ok = rep["ok"] and worst <= 1e-9 and all(rec.n_active >= 1 for rec in st.records)
    return _suite("oracle-consistency", ok, worst,
                  "survivor reproduction, replay, non-empty survivor sets")


def _suite_replay(tmp_dir: str | None = None):
    import tempfile

    d = tmp_dir or tempfile.mkdtemp(prefix="negcurve-replay-")
    cfg = ExperimentConfig(
        r=10.0, max_queries=12, candidate_cap=12,
        out_transcript=os.path.join(d, "transcript.jsonl"),
        out_hardfn=os.path.join(d, "hardfn.json"),
        out_report=os.path.join(d, "report.json"),
    )
    ok, report = run_experiment(cfg, write=True)
    rep = replay_files(cfg.out_transcript, cfg.out_hardfn)
    worst = max(rep["worst_value_dev"], rep["worst_grad_dev"])
    # determinism: a second run must produce byte-identical artifacts
    data1 = open(cfg.out_transcript).read() + open(cfg.out_hardfn).read() + open(cfg.out_report).read()
    run_experiment(cfg, write=True)
    data2 = open(cfg.out_transcript).read() + open(cfg.out_hardfn).read() + open(cfg.out_report).read()
    ok = rep["ok"] and report["run"]["verify"]["ok"] and data1 == data2
    return _suite("replay", ok, worst,
                  "disk round trip, replay tolerance 1e-8, byte-identical artifacts")


_SUITES = (
    _suite_comparison_identities,
    _suite_bump_derivatives,
    _suite_packing,
    _suite_geodesics_diverge,
    _suite_volume_lemma,
    _suite_extension_convexity,
    _suite_t_inequality,
    _suite_spd_curvature,
    _suite_oracle_consistency,
    _suite_replay,
)


def verify_all() -> tuple[bool, list]:
    """Run the ten self-check suites; returns (all_ok, suite dicts)."""
    results = [fn() for fn in _SUITES]
    return all(s["ok"] for s in results), results


def negative_control() -> dict:
    """Corrupt a bump budget and confirm the derivative suite detects it."""
    res = _suite_bump_derivatives(corrupt=True)
    return {
        "name": "negative-control",
        "ok": not res["ok"],  # the corrupted run must FAIL the suite
        "margin": res["margin"],
        "detail": "bump amplitude inflated 1.5x must violate the gradient budget",
    }
