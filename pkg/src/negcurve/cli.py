"""Command-line interface: constants, run, sweep, verify, replay."""

from __future__ import annotations

import sys

import click

from .errors import NegcurveError
from .harness import (
    ExperimentConfig,
    compute_constants,
    negative_control,
    parse_config,
    replay_files,
    run_experiment,
    sweep as run_sweep,
    verify_all,
)
from .serialize import dumps


def _load_config(path: str | None, overrides: dict) -> ExperimentConfig:
    if path is not None:
        with open(path) as fh:
            cfg = parse_config(fh.read())
    else:
        cfg = ExperimentConfig()
    for key, val in overrides.items():
        if val is not None:
            setattr(cfg, key, val)
    return cfg


@click.group()
def main() -> None:
    """Resisting-oracle lower bound experiments on negatively curved spaces."""


def _config_options(fn):
    for deco in reversed((
        click.option("--config", "config_path", type=click.Path(exists=True),
                     default=None, help="flat key=value config file"),
        click.option("-r", "--radius", "r", type=float, default=None,
                     help="domain radius r (exclusive with --kappa)"),
        click.option("--kappa", type=float, default=None,
                     help="condition number target (exclusive with -r)"),
        click.option("--manifold", type=click.Choice(["hyperbolic", "spd", "flat"]),
                     default=None),
        click.option("--dim", type=int, default=None, help="hyperbolic dimension"),
        click.option("--curvature", "K", type=float, default=None,
                     help="hyperbolic curvature K < 0"),
        click.option("--n", type=int, default=None, help="matrix size for spd"),
        click.option("--mode", type=click.Choice(["gradient-only", "value-and-gradient"]),
                     default=None),
        click.option("--query-domain", "query_domain",
                     type=click.Choice(["bounded", "unbounded"]), default=None),
        click.option("--constants-profile", "constants_profile",
                     type=click.Choice(["paper", "empirical"]), default=None),
    )):
        fn = deco(fn)
    return fn


@main.command()
@_config_options
def constants(config_path, **overrides) -> None:
    """Print the derived theorem constants for one configuration."""
    try:
        cfg = _load_config(config_path, overrides)
        rep = compute_constants(cfg)
    except NegcurveError as exc:
        raise click.ClickException(str(exc))
    click.echo(dumps(rep.to_dict()))


@main.command()
@_config_options
@click.option("--algorithm", type=click.Choice(["projected-rgd", "rgd", "tangent-nag"]),
              default=None)
@click.option("--max-queries", "max_queries", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--candidate-cap", "candidate_cap", type=int, default=None)
@click.option("--out-transcript", "out_transcript", type=click.Path(), default=None)
@click.option("--out-hardfn", "out_hardfn", type=click.Path(), default=None)
@click.option("--out-report", "out_report", type=click.Path(), default=None)
def run(config_path, **overrides) -> None:
    """Run one optimizer-vs-oracle experiment and write its artifacts.

    Exits 0 iff the transcript replays within tolerance and the first entry
    into the goal ball is not earlier than the certified query bound T.
    """
    try:
        cfg = _load_config(config_path, overrides)
        ok, report = run_experiment(cfg)
    except NegcurveError as exc:
        raise click.ClickException(str(exc))
    click.echo(dumps(report))
    sys.exit(0 if ok else 1)


@main.command()
@_config_options
@click.option("--values", required=True,
              help="comma-separated sweep values, e.g. 100,200,300")
@click.option("--by", type=click.Choice(["r", "kappa"]), default="r",
              help="which parameter the values set")
@click.option("--jobs", type=int, default=1, help="parallel worker processes")
@click.option("--out-csv", "out_csv", type=click.Path(), default="sweep.csv")
@click.option("--algorithm", type=click.Choice(["projected-rgd", "rgd", "tangent-nag"]),
              default=None)
@click.option("--max-queries", "max_queries", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--candidate-cap", "candidate_cap", type=int, default=None)
def sweep(config_path, values, by, jobs, out_csv, **overrides) -> None:
    """Sweep r (or kappa) across several values; write a CSV sorted by kappa."""
    try:
        vals = [float(s) for s in values.split(",") if s.strip()]
        cfg = _load_config(config_path, overrides)
        rows = run_sweep(cfg, vals, by=by, jobs=jobs, out_csv=out_csv)
    except NegcurveError as exc:
        raise click.ClickException(str(exc))
    except ValueError as exc:
        raise click.ClickException(f"bad --values: {exc}")
    click.echo(f"wrote {out_csv} ({len(rows)} rows)")
    for row in rows:
        fh = "inf" if row["first_hit"] is None else row["first_hit"]
        click.echo(
            f"kappa={row['kappa']:.6g} r={row['r']:.6g} T={row['T_computed']} "
            f"first_hit={fh} min_active={row['min_active_set']} "
            f"verified={row['verified']}"
        )
    sys.exit(0 if all(row["verified"] for row in rows) else 1)


@main.command()
@click.option("--skip-negative-control", is_flag=True, default=False,
              help="omit the deliberate-corruption detector check")
def verify(skip_negative_control) -> None:
    """Run the numerical verification suites; exit 0 iff everything passes."""
    ok, results = verify_all()
    for s in results:
        click.echo(f"{'PASS' if s['ok'] else 'FAIL'}  {s['name']:<24} "
                   f"margin={s['margin']:.3e}  {s['detail']}")
    if not skip_negative_control:
        nc = negative_control()
        ok = ok and nc["ok"]
        click.echo(f"{'PASS' if nc['ok'] else 'FAIL'}  {nc['name']:<24} "
                   f"margin={nc['margin']:.3e}  {nc['detail']}")
    click.echo("all suites passed" if ok else "FAILURES detected")
    sys.exit(0 if ok else 1)


@main.command()
@click.argument("transcript", type=click.Path(exists=True))
@click.argument("hardfn", type=click.Path(exists=True))
def replay(transcript, hardfn) -> None:
    """Re-check a stored transcript against a stored hard function."""
    try:
        rep = replay_files(transcript, hardfn)
    except NegcurveError as exc:
        raise click.ClickException(str(exc))
    click.echo(dumps(rep))
    sys.exit(0 if rep["ok"] else 1)


if __name__ == "__main__":
    main()
