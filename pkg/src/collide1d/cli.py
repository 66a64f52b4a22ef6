"""Command-line interface.

Subcommands:
    simulate    run one trial and print the outcome as JSON
    limits      print an asymptotic law's constant and median coefficient
    experiment  run a Monte Carlo experiment grid from a key=value config file
    emit        extract a figure-ready CSV from a finished experiment report

Exit codes: 0 success, 2 configuration error, 3 numerical error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from collide1d import experiments
from collide1d.distributions import DistributionError, DistributionSpec, SeedSpec, sample_with
from collide1d.elastic import (
    DegenerateEnsembleError, DegenerateVelocityError, ParticleEnsemble,
)
from collide1d.experiments import ConfigError, CurveError, ExperimentReport
from collide1d.limits import LawKind, LimitLaw, LimitLawError, QuadratureError
from collide1d.simulate import CollisionRule, NonterminationError, dump_events, simulate

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

_CONFIG_ERRORS = (
    ConfigError, CurveError, DistributionError, LimitLawError,
    DegenerateEnsembleError, DegenerateVelocityError, argparse.ArgumentTypeError,
    KeyError, ValueError,
)
_NUMERIC_ERRORS = (QuadratureError, NonterminationError, FloatingPointError)


def _dist(text: str) -> DistributionSpec:
    try:
        return DistributionSpec.from_string(text)
    except DistributionError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="collide1d", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run a single trial")
    s.add_argument("--fx", type=_dist, required=True, help="position law, e.g. normal(0,1)")
    s.add_argument("--fv", type=_dist, required=True, help="velocity law")
    s.add_argument("--n", type=int, required=True, help="number of particles")
    s.add_argument("--eps", type=float, default=0.0, help="collision parameter (< 1)")
    s.add_argument("--beta", type=float, default=0.0)
    s.add_argument("--seed", type=int, default=0, help="base seed")
    s.add_argument("--trial", type=int, default=0, help="trial index within the seed")
    s.add_argument("--events", type=Path, default=None,
                   help="also dump the collision log as CSV to this path")

    l = sub.add_parser("limits", help="evaluate one asymptotic law")
    l.add_argument("--law", required=True,
                   choices=[k.value for k in LawKind])
    l.add_argument("--fx", type=_dist, required=True)
    l.add_argument("--fv", type=_dist, required=True)
    l.add_argument("--curve", type=Path, default=None,
                   help="write a (mu, cdf) CSV table to this path")
    l.add_argument("--mu-max", type=float, default=5.0)
    l.add_argument("--points", type=int, default=201)

    e = sub.add_parser("experiment", help="run an experiment grid")
    e.add_argument("--config", type=Path, required=True, help="key=value config file")

    m = sub.add_parser("emit", help="extract a figure-ready CSV")
    m.add_argument("--report", type=Path, required=True, help="path to report.json")
    m.add_argument("--curve", required=True,
                   help="curve id: convergence | medians | ecdf:N=<n>[,eps=<e>]")
    m.add_argument("--out", type=Path, default=None)
    return p


def _cmd_simulate(args) -> int:
    rng = SeedSpec(args.seed, args.trial).stream()
    x = sample_with(args.fx, rng, args.n)
    v = sample_with(args.fv, rng, args.n)
    outcome = simulate(ParticleEnsemble(x, v), CollisionRule(args.eps, args.beta))
    if args.events is not None:
        dump_events(outcome, args.events)
    doc = {
        "n": args.n,
        "eps": args.eps,
        "beta": args.beta,
        "seed": args.seed,
        "trial": args.trial,
        "n_events": outcome.n_events,
        "system_final": outcome.system_final,
        "per_particle_final": outcome.per_particle_final.tolist(),
        "collisions_per_particle": outcome.collisions_per_particle.tolist(),
        "terminal_velocities": outcome.terminal_velocities.tolist(),
    }
    print(json.dumps(doc, indent=2))
    return EXIT_OK


def _cmd_limits(args) -> int:
    law = LimitLaw(LawKind(args.law), args.fx, args.fv)
    doc = {
        "law": law.kind.value,
        "fx": args.fx.to_string(),
        "fv": args.fv.to_string(),
        "scale": law.scale_label(),
        "constant": law.constant() if law.is_system else None,
        "median_coefficient": law.median(),
    }
    print(json.dumps(doc, indent=2))
    if args.curve is not None:
        mus = np.linspace(args.mu_max / args.points, args.mu_max, args.points)
        vals = law.cdf(mus)
        lines = ["mu,cdf"]
        lines += [f"{float(m)!r},{float(c)!r}" for m, c in zip(mus, vals)]
        args.curve.write_text("\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_experiment(args) -> int:
    config = experiments.parse_config_file(args.config)
    report = experiments.run(config)
    print(json.dumps(
        {
            "report": str(Path(config.output_dir) / "report.json"),
            "cells": len(report.records),
            "wall_clock_s": report.wall_clock_s,
        },
        indent=2,
    ))
    return EXIT_OK


def _cmd_emit(args) -> int:
    report = ExperimentReport.load(args.report)
    path = experiments.emit_curve(report, args.curve, args.out)
    print(str(path))
    return EXIT_OK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "limits": _cmd_limits,
    "experiment": _cmd_experiment,
    "emit": _cmd_emit,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except _NUMERIC_ERRORS as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except _CONFIG_ERRORS as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
