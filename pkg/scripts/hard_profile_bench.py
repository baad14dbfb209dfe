"""Early-discovery experiment on hard impartial-culture profiles.

Draws m=n profiles, keeps those on which the pruned search branches, and
runs each solver configuration over them.  Writes ``bench.csv`` (one row per
profile and configuration) and ``summary.json`` (winner histogram, runtime
quartiles per winner count, mean alpha-discovery) into ``--out``.

    python3 scripts/hard_profile_bench.py --rule rp --size 10 --hard 100 --out runs/rp10
"""
import argparse
from pathlib import Path

import numpy as np

from putwin.metrics import SolverConfig, is_hard_profile, run_bench, write_report
from putwin.profiles import impartial_culture
from putwin.trace import Budget

DEFAULT_CONFIGS = {
    "stv": [SolverConfig("stv", "uniform"), SolverConfig("stv", "plurality"), SolverConfig("stv", "linear"),
            SolverConfig("stv", "uniform", pruning=False)],
    "rp": [SolverConfig("rp", "none"), SolverConfig("rp", "lp"), SolverConfig("rp", "lpout"),
           SolverConfig("rp", "lpml"), SolverConfig("rp", "lp", use_scc=False)],
}


def hard_corpus(rule, size, count, seed, budget):
    rng = np.random.default_rng(seed)
    drawn = 0
    corpus = []
    while len(corpus) < count:
        p = impartial_culture(size, size, rng)
        drawn += 1
        if is_hard_profile(p, rule, budget):
            corpus.append((f"ic{size}_{drawn:05d}", p))
    return corpus, drawn


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rule", choices=sorted(DEFAULT_CONFIGS), required=True)
    ap.add_argument("--size", type=int, default=10, help="m = n")
    ap.add_argument("--hard", type=int, default=100, help="number of hard profiles to keep")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--time-limit", type=float, default=60.0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", required=True)
    args = ap.parse_args(argv)

    budget = Budget(time_limit=args.time_limit)
    corpus, drawn = hard_corpus(args.rule, args.size, args.hard, args.seed, budget)
    print(f"{len(corpus)} hard profiles out of {drawn} drawn")
    report = run_bench(corpus, DEFAULT_CONFIGS[args.rule], budget, args.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_report(report, out / "bench.csv", out / "summary.json")
    for cfg, entry in report.summary()["configs"].items():
        mean = entry.get("mean_runtime", float("nan"))
        print(f"{cfg:>28}: {entry['timeouts']} timeouts, mean {mean:.3f}s, "
              f"winners {entry['winner_histogram']}")


if __name__ == "__main__":
    main()
