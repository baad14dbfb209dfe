"""Command-line entry point: ``putwin <subcommand> ...``.

Exit codes: 0 success, 2 bad input or configuration, 3 budget exhausted
(partial results are still written, flagged ``"complete": false``).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import ilp, metrics
from .oracle import OracleBudget, OracleBudgetExceeded, brute_rp, brute_stv
from .priority import load_linear_model
from .profiles import (
    SOC, PreflibFormatError, Profile, ProfileError, WeightedMajorityGraph, impartial_culture,
    kind_from_path, mcgarvey_profile, parse_preflib, serialize_preflib,
)
from .rp import RPPriority, put_rp
from .stv import Heuristic, PriorityHeuristic, put_stv
from .trace import DEFAULT_MAX_STATES, Budget

EXIT_OK, EXIT_INPUT, EXIT_BUDGET = 0, 2, 3
ORACLE_SCHEMA = "putwin.oracle/1"
ILP_SCHEMA = "putwin.ilp/1"


class InputError(Exception):
    pass


def load_profile(path) -> Profile:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse_preflib(text, kind_from_path(path))
    except (PreflibFormatError, ProfileError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _emit(obj, args) -> None:
    text = json.dumps(obj, indent=2) + "\n"
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _budget(args) -> Budget:
    return Budget(max_states=args.max_states, time_limit=args.time_limit or None)


def cmd_solve(args) -> int:
    profile = load_profile(args.file)
    budget = _budget(args)
    if args.rule == "stv":
        model = load_linear_model(args.model) if args.model else None
        heur = PriorityHeuristic(Heuristic(args.heuristic), model)
        res = put_stv(profile, heur, not args.no_pruning, not args.no_caching, budget)
    else:
        model = load_linear_model(args.model) if args.model else None
        res = put_rp(profile, args.priority, not args.no_scc, not args.no_pruning, not args.no_caching,
                     budget, model)
    if args.format == "text":
        names = ", ".join(profile.names[c] for c in sorted(res.winners))
        flag = "" if res.complete else f" (incomplete: {res.stop_reason})"
        sys.stdout.write(f"{args.rule} winners: {names}{flag}\n")
    else:
        _emit(res.to_json(profile.names, args.rule), args)
    return EXIT_OK if res.complete else EXIT_BUDGET


def cmd_oracle(args) -> int:
    profile = load_profile(args.file)
    try:
        if args.rule == "stv":
            winners = brute_stv(profile, OracleBudget(max_m=args.max_m or 6))
        else:
            winners = brute_rp(profile, OracleBudget(max_m=args.max_m or 5))
    except OracleBudgetExceeded as exc:
        print(f"oracle budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    _emit({"schema": ORACLE_SCHEMA, "rule": args.rule,
           "winners": [profile.names[c] for c in sorted(winners)]}, args)
    return EXIT_OK


def _read_wmg(path) -> WeightedMajorityGraph:
    try:
        rows = [[int(x) for x in line.replace(",", " ").split()]
                for line in Path(path).read_text().splitlines() if line.strip()]
        return WeightedMajorityGraph(len(rows), tuple(map(tuple, rows)))
    except (OSError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from None


def cmd_gen(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.wmg:
        try:
            profiles = [mcgarvey_profile(_read_wmg(args.wmg))]
        except ValueError as exc:
            raise InputError(str(exc)) from None
    else:
        if args.m is None or args.n is None:
            raise InputError("gen needs --m and --n (or --wmg)")
        rng = np.random.default_rng(args.seed)
        profiles = [impartial_culture(args.m, args.n, rng) for _ in range(args.count)]
    for i, p in enumerate(profiles):
        (out / f"{args.prefix}{i:04d}.soc").write_text(serialize_preflib(p, SOC))
    return EXIT_OK


_FLAGS = {"noprune", "nocache", "noscc"}


def _configs(args) -> list[metrics.SolverConfig]:
    modes = {h.value for h in Heuristic} if args.rule == "stv" else {r.value for r in RPPriority}
    configs = []
    for spec in args.configs.split(","):
        mode, *opts = spec.strip().split("+")
        mode = "" if mode == "default" else mode
        if mode and mode not in modes:
            raise InputError(f"unknown {args.rule} priority {mode!r}; choose from {sorted(modes)}")
        if set(opts) - _FLAGS:
            raise InputError(f"unknown config flags {sorted(set(opts) - _FLAGS)}")
        configs.append(metrics.SolverConfig(
            rule=args.rule, priority=mode,
            pruning="noprune" not in opts, caching="nocache" not in opts, use_scc="noscc" not in opts,
        ))
    return configs


def _corpus(paths, max_m=None):
    for path in paths:
        p = load_profile(path)
        if max_m is not None and p.m > max_m:
            continue
        yield Path(path).stem, p


def cmd_bench(args) -> int:
    corpus = list(_corpus(args.files, args.max_m))
    report = metrics.run_bench(corpus, _configs(args), _budget(args), args.workers)
    if args.csv:
        metrics.write_report(report, args.csv, args.json)
    else:
        sys.stdout.write(report.to_csv())
        if args.json:
            Path(args.json).write_text(json.dumps(report.summary(), indent=2, sort_keys=True) + "\n")
    return EXIT_OK if all(r["complete"] for r in report.rows) else EXIT_BUDGET


def cmd_ilp_emit(args) -> int:
    profile = load_profile(args.file)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    build = ilp.build_stv_ilp if args.rule == "stv" else ilp.build_rp_ilp
    for c in range(profile.m):
        (out / f"{args.rule}_cand{c}.lp").write_text(ilp.serialize_model(build(profile, c)))
    return EXIT_OK


def cmd_ilp_solve(args) -> int:
    profile = load_profile(args.file)
    try:
        winners = ilp.put_winners_via_ilp(profile, args.rule, args.solver, args.workers)
    except ilp.SolverUnavailable as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INPUT
    except ilp.SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 1
    _emit({"schema": ILP_SCHEMA, "rule": args.rule,
           "winners": [profile.names[c] for c in sorted(winners)]}, args)
    return EXIT_OK


def cmd_hardness(args) -> int:
    budget = _budget(args)
    hard = []
    for pid, p in _corpus(args.files, args.max_m):
        if metrics.is_hard_profile(p, args.rule, budget):
            hard.append(pid)
    for path in args.files:
        if Path(path).stem in hard:
            sys.stdout.write(f"{path}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="putwin", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def rule(p):
        p.add_argument("--rule", choices=["stv", "rp"], required=True)

    def budgets(p):
        p.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)
        p.add_argument("--time-limit", type=float, default=60.0, help="seconds per profile; 0 disables")

    p = sub.add_parser("solve", help="PUT winners by depth-first search")
    p.add_argument("file")
    rule(p)
    budgets(p)
    p.add_argument("--heuristic", choices=[h.value for h in Heuristic], default="uniform", help="STV only")
    p.add_argument("--priority", choices=[r.value for r in RPPriority], default="lp", help="RP only")
    p.add_argument("--model", help="linear-model weight file for linear/lpml")
    p.add_argument("--no-pruning", action="store_true")
    p.add_argument("--no-caching", action="store_true")
    p.add_argument("--no-scc", action="store_true")
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="PUT winners by brute-force enumeration")
    p.add_argument("file")
    rule(p)
    p.add_argument("--max-m", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen", help="write impartial-culture or McGarvey profiles")
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--wmg", help="margin matrix file; builds one McGarvey profile instead")
    p.add_argument("--prefix", default="profile_")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="run solver configurations over a corpus")
    p.add_argument("files", nargs="+")
    rule(p)
    budgets(p)
    p.add_argument("--configs", default="default",
                   help="comma list of MODE[+noprune][+nocache][+noscc], e.g. 'none,lp,lp+noprune'; "
                        "MODE 'default' is lp for rp and uniform for stv")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--max-m", type=int, help="skip profiles with more alternatives")
    p.add_argument("--csv")
    p.add_argument("--json")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("ilp-emit", help="write one LP model file per candidate")
    p.add_argument("file")
    rule(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ilp_emit)

    p = sub.add_parser("ilp-solve", help="PUT winners via an external ILP solver")
    p.add_argument("file")
    rule(p)
    p.add_argument("--solver", help=f"solver command (default: ${ilp.SOLVER_ENV})")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_ilp_solve)

    p = sub.add_parser("hardness", help="print the hard profiles of a corpus")
    p.add_argument("files", nargs="+")
    rule(p)
    budgets(p)
    p.add_argument("--max-m", type=int)
    p.set_defaults(func=cmd_hardness)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"putwin: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"putwin: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
