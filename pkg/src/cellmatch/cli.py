"""Command line entry point: ``cellmatch <command> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np
import yaml

from . import harness
from .matching import (CONTEXT_AWARE, UNIFORM, AssociationGame, baseline_max_sinr, baseline_rssi,
                       brute_force_stable, is_swap_stable, run_algorithm1)
from .matching.stability import MAX_ENUMERATION
from .queueing import validate_against_oracle
from .scenario import ScenarioConfig, load_scenario


def _overrides(pairs) -> dict:
    out = {}
    for item in pairs or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise SystemExit(f"--set expects key=value, got {item!r}")
        out[key.strip()] = yaml.safe_load(value)
    return out


def _config(args) -> ScenarioConfig:
    over = _overrides(args.set)
    if args.seed is not None:
        over["rng_seed"] = args.seed
    if args.scenario:
        return load_scenario(args.scenario, **over)
    return ScenarioConfig.from_dict(over)


def _scenario_args(p):
    p.add_argument("--scenario", help="YAML scenario file")
    p.add_argument("--seed", type=int, help="override rng_seed")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override one scenario field (repeatable)")


def _finite(x):
    if isinstance(x, float) and not np.isfinite(x):
        return None
    if isinstance(x, list):
        return [_finite(v) for v in x]
    if isinstance(x, dict):
        return {k: _finite(v) for k, v in x.items()}
    return x


def cmd_simulate(args) -> int:
    cfg = _config(args)
    topology, contexts, alg_rng = harness.build_instance(cfg)
    if args.scheme == "context_aware":
        result = run_algorithm1(cfg, topology, contexts, alg_rng)
        matching, links, stats = result.matching, result.links, result.stats.to_dict()
    else:
        rule = baseline_max_sinr if args.scheme == "max_sinr" else baseline_rssi
        matching = rule(topology, cfg)
        links = AssociationGame(cfg, topology, contexts, mode=UNIFORM).breakdowns(matching.as_array())
        stats = {}
    utilities = [l.utility for l in links]
    doc = {
        "scheme": args.scheme,
        "config": cfg.to_dict(),
        "assignment": {str(m): i for m, i in enumerate(matching.assignment)},
        "links": [l.to_dict() for l in links],
        "stats": stats,
        "summary": {
            "mean_ue_utility": float(np.mean(utilities)),
            "feasibility_rate": float(np.mean([l.feasible for l in links])),
            "active_sbss": len({i for i in matching.assignment}),
        },
    }
    json.dump(_finite(doc), sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 1 if stats.get("hit_round_cap") else 0


def cmd_experiment(args) -> int:
    spec = harness.load_spec(args.spec)
    if args.workers:
        spec = harness.ExperimentSpec(**{**spec.__dict__, "workers": args.workers})
    rows = harness.run_experiment(spec)
    path = Path(args.out) / f"{spec.name}.{args.format}"
    harness.emit(rows, args.format, path)
    print(path)
    return 0


def cmd_validate_queueing(args) -> int:
    checks = validate_against_oracle(args.packets, args.seed, tolerance=args.tolerance)
    failed = 0
    for c in checks:
        failed += not c.ok
        print(f"{'PASS' if c.ok else 'FAIL'}  {c.label:<28} class {c.rank}  "
              f"closed={c.closed_form:.6e}  sim={c.simulated:.6e}  err={100 * c.rel_error:.2f}%")
    return 1 if failed else 0


def cmd_check_stability(args) -> int:
    cfg = _config(args)
    topology, contexts, alg_rng = harness.build_instance(cfg)
    game = AssociationGame(cfg, topology, contexts, mode=CONTEXT_AWARE)
    result = run_algorithm1(cfg, topology, contexts, alg_rng, game=game)
    report = is_swap_stable(game, result.matching)
    doc = {
        "assignment": list(result.matching.assignment),
        "converged": result.stats.converged,
        "rounds": result.stats.rounds,
        "stable": report.stable,
        "witness": report.witness.to_dict() if report.witness else None,
    }
    ok = report.stable and result.stats.converged
    if game.N ** game.M <= min(args.max_enumeration, MAX_ENUMERATION):
        stable_set = brute_force_stable(game)
        doc["oracle_stable_count"] = len(stable_set)
        doc["in_oracle_set"] = result.matching in stable_set
        ok = ok and doc["in_oracle_set"]
    else:
        doc["oracle_stable_count"] = None
    json.dump(_finite(doc), sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cellmatch", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="single run, JSON to stdout")
    _scenario_args(p)
    p.add_argument("--scheme", choices=harness.SCHEMES, default="context_aware")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("experiment", help="Monte Carlo sweep to CSV/JSON")
    p.add_argument("--spec", required=True, help="YAML experiment spec")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--workers", type=int, default=0)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("validate-queueing", help="closed-form delays vs discrete-event simulation")
    p.add_argument("--packets", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=0.05)
    p.set_defaults(func=cmd_validate_queueing)

    p = sub.add_parser("check-stability", help="run the game and verify swap stability")
    _scenario_args(p)
    p.add_argument("--max-enumeration", type=int, default=MAX_ENUMERATION)
    p.set_defaults(func=cmd_check_stability)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
