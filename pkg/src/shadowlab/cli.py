"""Command-line front end.

Subcommands
-----------
* gen    — sample one smoothed instance and print/write it as JSON.
* solve  — solve one instance (sampled, or loaded with --in) end to end.
* sweep  — run a seeded grid and emit per-trial records (CSV or JSON).
* polar  — one polar section: edge count, perimeter, vertices.
* tails  — Monte-Carlo check of the stated tail inequalities.
* bound  — certified distribution constants and edge-count bounds.

Exit codes: 0 success, 2 configuration error (including argparse
errors), 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

import numpy as np

from .bench import (
    ConfigError,
    DEGENERATE_ERRORS,
    SweepConfig,
    csv_text,
    draw_model,
    run_sweep,
    verify_tails,
)
from .interpolate import solve_instance, two_phase_solve
from .lp import LPInstance
from .noise import (
    GAUSSIAN,
    KINDS,
    DomainError,
    certificate,
    sample_instance,
    sigma_bar,
)
from .polar import PlaneBasis, gaussian_shadow_bound, parametrized_edge_bound, polar_section


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.split(","))


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(","))


def _write(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
        return
    with open(out, "w", encoding="utf-8") as handle:
        handle.write(text)


def _instance_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--d", type=int, default=3, help="dimension (default 3)")
    p.add_argument("--n", type=int, default=8, help="row count (default 8)")
    p.add_argument("--sigma", type=float, default=0.1, help="noise scale (default 0.1)")
    p.add_argument("--dist", choices=KINDS, default=GAUSSIAN, help="noise family")
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--perturb-rhs", action="store_true", help="perturb b jointly with A")
    p.add_argument("--out", default=None, help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shadowlab",
        description="smoothed-analysis laboratory for shadow-path simplex runs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="sample one smoothed instance as JSON")
    _instance_args(p_gen)

    p_solve = sub.add_parser("solve", help="solve one instance end to end")
    _instance_args(p_solve)
    p_solve.add_argument("--in", dest="path", default=None, help="instance JSON to load")
    p_solve.add_argument("--phase1", choices=("symrv", "dd"), default="dd")

    p_sweep = sub.add_parser("sweep", help="run a seeded grid of trials")
    p_sweep.add_argument("--mode", choices=("solve", "polar-count", "tails"), default="solve")
    p_sweep.add_argument("--d", type=_ints, default=(3,), help="comma list of dimensions")
    p_sweep.add_argument("--n", type=_ints, default=(8,), help="comma list of row counts")
    p_sweep.add_argument("--sigma", type=_floats, default=(0.1,), help="comma list of scales")
    p_sweep.add_argument("--dist", choices=KINDS, default=GAUSSIAN)
    p_sweep.add_argument("--trials", type=int, default=10)
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--phase1", choices=("symrv", "dd"), default="dd")
    p_sweep.add_argument("--perturb-rhs", action="store_true")
    p_sweep.add_argument("--check-geometry", action="store_true")
    p_sweep.add_argument("--out", default=None)
    p_sweep.add_argument("--format", choices=("csv", "json"), default="csv")

    p_polar = sub.add_parser("polar", help="edge count of one random polar section")
    _instance_args(p_polar)

    p_tails = sub.add_parser("tails", help="Monte-Carlo check of the tail inequalities")
    _instance_args(p_tails)
    p_tails.add_argument("--samples", type=int, default=100_000)

    p_bound = sub.add_parser("bound", help="certified constants and edge-count bounds")
    p_bound.add_argument("--dist", choices=KINDS, default=GAUSSIAN)
    p_bound.add_argument("--d", type=int, required=True)
    p_bound.add_argument("--n", type=int, required=True)
    p_bound.add_argument("--sigma", type=float, required=True)

    return parser


def _cmd_gen(args: argparse.Namespace) -> int:
    cfg = SweepConfig(dist=args.dist, perturb_rhs=args.perturb_rhs)
    rng = np.random.default_rng(np.random.SeedSequence(args.seed))
    model = draw_model(cfg, args.d, args.n, args.sigma, rng)
    inst = sample_instance(model, rng)
    _write(inst.dumps(), args.out)
    return 0


def _cmd_solve(args: argparse.Namespace) -> int:
    rng = np.random.default_rng(np.random.SeedSequence(args.seed))
    if args.path is not None:
        with open(args.path, "r", encoding="utf-8") as handle:
            inst = LPInstance.loads(handle.read())
        result = solve_instance(inst, phase1=args.phase1, rng=rng)
    else:
        cfg = SweepConfig(
            dist=args.dist, phase1=args.phase1, perturb_rhs=args.perturb_rhs
        )
        if args.phase1 == "symrv" and args.d < 3:
            raise ConfigError("the symrv strategy needs d >= 3")
        last: Optional[Exception] = None
        for retry in range(cfg.max_resamples):
            key = (0,) if retry == 0 else (0, retry)
            rng = np.random.default_rng(np.random.SeedSequence(args.seed, spawn_key=key))
            model = draw_model(cfg, args.d, args.n, args.sigma, rng)
            try:
                result = two_phase_solve(model, phase1=args.phase1, rng=rng)
                break
            except DEGENERATE_ERRORS as exc:
                last = exc
        else:
            raise ConfigError(f"all resamples degenerate; last error: {last}")
    _write(json.dumps(result.to_json_dict(), indent=2), args.out)
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    cfg = SweepConfig(
        mode=args.mode,
        d_list=args.d,
        n_list=args.n,
        sigma_list=args.sigma,
        dist=args.dist,
        trials=args.trials,
        master_seed=args.seed,
        phase1=args.phase1,
        perturb_rhs=args.perturb_rhs,
        check_geometry=args.check_geometry,
    )
    result = run_sweep(cfg)
    if args.format == "csv":
        _write(csv_text(result.records), args.out)
    else:
        _write(json.dumps(result.to_json_dict(), indent=2), args.out)
    return 0


def _cmd_polar(args: argparse.Namespace) -> int:
    cfg = SweepConfig(dist=args.dist)
    last: Optional[Exception] = None
    for retry in range(cfg.max_resamples):
        key = (0,) if retry == 0 else (0, retry)
        rng = np.random.default_rng(np.random.SeedSequence(args.seed, spawn_key=key))
        u = rng.standard_normal(args.d)
        v = rng.standard_normal(args.d)
        model = draw_model(cfg, args.d, args.n, args.sigma, rng)
        inst = sample_instance(model, rng)
        try:
            plane = PlaneBasis.from_vectors(u, v)
            section = polar_section(inst.A, plane)
            break
        except DEGENERATE_ERRORS as exc:
            last = exc
        except ValueError as exc:
            last = exc
    else:
        raise ConfigError(f"all resamples degenerate; last error: {last}")
    payload = {
        "d": args.d,
        "n": args.n,
        "sigma": args.sigma,
        "dist": args.dist,
        "edges": section.edge_count,
        "perimeter": section.perimeter,
        "vertices": section.vertices.tolist(),
    }
    _write(json.dumps(payload, indent=2), args.out)
    return 0


def _cmd_tails(args: argparse.Namespace) -> int:
    rng = np.random.default_rng(np.random.SeedSequence(args.seed))
    report = verify_tails(args.dist, args.d, args.n, args.sigma, args.samples, rng)
    _write(json.dumps(report, indent=2), args.out)
    return 0


def _cmd_bound(args: argparse.Namespace) -> int:
    payload: dict = {
        "dist": args.dist,
        "d": args.d,
        "n": args.n,
        "sigma": args.sigma,
        "sigma_bar": sigma_bar(args.d, args.n),
    }
    try:
        cert = certificate(args.dist, args.d, args.n, args.sigma)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    payload["certificate"] = cert.to_json_dict()
    if cert.L is not None:
        payload["edge_bound"] = parametrized_edge_bound(
            args.d, cert.L, cert.tau, cert.R_nd, cert.r_n
        )
    if args.dist == GAUSSIAN:
        payload["edge_bound"] = gaussian_shadow_bound(args.d, args.n, args.sigma)
    _write(json.dumps(payload, indent=2), None)
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "solve": _cmd_solve,
    "sweep": _cmd_sweep,
    "polar": _cmd_polar,
    "tails": _cmd_tails,
    "bound": _cmd_bound,
}


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
