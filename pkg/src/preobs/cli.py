"""Command-line entry point: ``preobs <command> [flags]``."""
from __future__ import annotations

import argparse
import json
import sys

from .environment import IidBernoulli, substream, write_trace
from .errors import BudgetError, ConfigError, DegenerateGapError, ParameterError, StructureError, TraceError
from .experiments import oracle_check, sweep, write_report
from .harness import POLICIES, ExperimentConfig, draw_means, run_experiment
from .metrics import theorem1_bound, theorem3_bound

EXIT_CONFIG, EXIT_BUDGET, EXIT_TRACE = 2, 3, 4


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad number list {text!r}") from exc


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with ExperimentConfig fields; flags override it")
    p.add_argument("--arms", type=int, dest="num_arms")
    p.add_argument("--players", type=int, dest="num_players")
    p.add_argument("--tau", type=float)
    p.add_argument("--horizon", type=int)
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--policy", choices=POLICIES)
    p.add_argument("--rule")
    p.add_argument("--mu", type=_floats)
    p.add_argument("--mu-uniform-max", type=float, dest="mu_uniform_max")
    p.add_argument("--trace")
    p.add_argument("--collision-rule", dest="collision_rule")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--parallel", type=int)


_FIELDS = ("num_arms", "num_players", "tau", "horizon", "reps", "seed", "policy", "rule", "mu",
           "mu_uniform_max", "trace", "collision_rule", "out_dir", "parallel")


def build_config(args) -> ExperimentConfig:
    flags = {k: getattr(args, k, None) for k in _FIELDS}
    if args.config:
        return ExperimentConfig.load(args.config, **flags)
    given = {k: v for k, v in flags.items() if v is not None}
    if not any(k in given for k in ("mu", "mu_uniform_max", "trace")):
        given["mu_uniform_max"] = 0.5
    return ExperimentConfig.from_dict(given)


def parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="preobs", description="Bandits with pre-observations: simulations and oracles.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate one policy and write series/summary files")
    _common(p)

    for name, axis in (("sweep-tau", "tau"), ("sweep-mu", "x")):
        p = sub.add_parser(name, help=f"sweep {axis} and compare against baselines")
        _common(p)
        p.add_argument("--values", type=_floats, required=True, help="comma list of axis values")
        p.add_argument("--baselines", help="comma list, default random plus single-opt (single-real for traces)")

    p = sub.add_parser("oracle-check", help="greedy versus exhaustive optimum on sampled instances")
    p.add_argument("--arms", type=int, default=9, dest="num_arms")
    p.add_argument("--players", type=int, default=3, dest="num_players")
    p.add_argument("--tau", type=float, default=0.0)
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mu-uniform-max", type=float, default=1.0, dest="mu_uniform_max")
    p.add_argument("--out-dir", dest="out_dir")

    p = sub.add_parser("gen-trace", help="write a synthetic Bernoulli availability trace")
    p.add_argument("--mu", type=_floats)
    p.add_argument("--arms", type=int, default=9, dest="num_arms")
    p.add_argument("--mu-uniform-max", type=float, default=0.5, dest="mu_uniform_max")
    p.add_argument("--horizon", type=int, default=5000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("bounds", help="print the closed-form regret bounds for a configuration")
    _common(p)
    return ap


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def _run(args) -> None:
    out = run_experiment(build_config(args))
    _emit(out.final())


def _sweep(args, axis: str) -> None:
    cfg = build_config(args)
    baselines = args.baselines.split(",") if args.baselines else None
    rows = sweep(cfg, axis, args.values, baselines)
    _emit(rows)


def _oracle(args) -> None:
    rep = oracle_check(args.num_arms, args.num_players, args.samples, args.seed, args.tau, args.mu_uniform_max)
    if args.out_dir:
        write_report(f"{args.out_dir}/oracle_check.json", rep)
    _emit(rep.as_dict())


def _gen_trace(args) -> None:
    if args.horizon < 1:
        raise ConfigError("horizon must be >= 1")
    rng = substream(args.seed, 0, "instance")
    mu = args.mu if args.mu is not None else rng.uniform(0.0, args.mu_uniform_max, args.num_arms)
    try:
        env = IidBernoulli(mu)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc
    write_trace(args.out, env.draw_block(substream(args.seed, 0, "env"), args.horizon))
    _emit({"out": args.out, "mu": [float(m) for m in env.means], "rounds": args.horizon})


def _bounds(args) -> None:
    cfg = build_config(args)
    mu = draw_means(cfg, [0])[0]
    K, M, T = len(mu), cfg.num_players, cfg.horizon
    report = {"mu": [float(m) for m in mu], "horizon": T}
    try:
        if M == 1:
            report["single_player_bound"] = theorem1_bound(mu, cfg.tau, T)
        report["central_bound"] = theorem3_bound(mu, cfg.tau, K, M, T)
    except DegenerateGapError as exc:
        raise ConfigError(str(exc)) from exc
    _emit(report)


def main(argv=None) -> int:
    args = parser().parse_args(argv)
    try:
        if args.command == "run":
            _run(args)
        elif args.command == "sweep-tau":
            _sweep(args, "tau")
        elif args.command == "sweep-mu":
            _sweep(args, "x")
        elif args.command == "oracle-check":
            _oracle(args)
        elif args.command == "gen-trace":
            _gen_trace(args)
        else:
            _bounds(args)
    except TraceError as exc:
        print(f"trace error: {exc}", file=sys.stderr)
        return EXIT_TRACE
    except BudgetError as exc:
        print(f"budget error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ConfigError, ParameterError, StructureError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return 0


if __name__ == "__main__":
    sys.exit(main())
