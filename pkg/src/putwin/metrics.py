"""Early-discovery accounting, hardness filtering and the benchmark harness."""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .profiles import Profile
from .rp import RPPriority, put_rp
from .stv import Heuristic, put_stv
from .trace import Budget, DiscoveryTrace, SolveResult

BENCH_SCHEMA = "putwin.bench/1"
ALPHAS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)


def alpha_discovery(trace: DiscoveryTrace, total_winners: int, alpha: float) -> float:
    """Time at which ``ceil(alpha * total_winners)`` winners had been found.

    With two winners found at t1 and t2, alphas in (0, 0.5] give t1 and
    alphas in (0.5, 1] give t2.
    """
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    if not trace.events:
        raise ValueError("empty trace")
    if total_winners != len(trace.events):
        raise ValueError("total_winners must equal the number of discovery events")
    # round() guards against 0.3 * 10 == 3.0000000000000004
    k = max(1, math.ceil(round(alpha * total_winners, 9)))
    return trace.events[k - 1][0]


def is_hard_profile(profile: Profile, rule: str, budget: Budget = Budget()) -> bool:
    """Whether the pruned search for ``rule`` ever expands a node into 2+ children."""
    rule = rule.lower()
    if rule == "stv":
        res = put_stv(profile, pruning=True, budget=budget)
    elif rule == "rp":
        res = put_rp(profile, RPPriority.LP, use_scc=True, pruning=True, budget=budget)
    else:
        raise ValueError(f"unknown rule {rule!r}")
    return res.branch_nodes > 0


@dataclass(frozen=True)
class SolverConfig:
    """One solver setting.  ``priority`` is an RP priority mode or an STV
    heuristic; empty means the rule's default (lp / uniform)."""
    rule: str
    priority: str = ""
    pruning: bool = True
    caching: bool = True
    use_scc: bool = True
    name: str = ""

    @property
    def mode(self) -> str:
        if self.priority:
            return self.priority
        return Heuristic.UNIFORM.value if self.rule == "stv" else RPPriority.LP.value

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.rule == "stv":
            parts = [f"stv-{self.mode}"]
        else:
            parts = [f"rp-{self.mode}"] + (["scc"] if self.use_scc else [])
        parts += [] if self.pruning else ["noprune"]
        parts += [] if self.caching else ["nocache"]
        return "-".join(parts)

    def solve(self, profile: Profile, budget: Budget = Budget()) -> SolveResult:
        if self.rule == "stv":
            return put_stv(profile, self.mode, self.pruning, self.caching, budget)
        if self.rule == "rp":
            return put_rp(profile, self.mode, self.use_scc, self.pruning, self.caching, budget)
        raise ValueError(f"unknown rule {self.rule!r}")


ROW_FIELDS = [
    "profile_id", "m", "n", "rule", "config", "num_winners", "winners", "complete", "stop_reason",
    "runtime", "discovery_100", *[f"alpha_{a:.1f}" for a in ALPHAS],
    "states_explored", "prune_hits", "cache_hits", "branch_nodes",
]


def _row(pid: str, profile: Profile, cfg: SolverConfig, res: SolveResult) -> dict:
    row = {
        "profile_id": pid, "m": profile.m, "n": profile.n, "rule": cfg.rule, "config": cfg.label,
        "num_winners": len(res.winners), "winners": ";".join(profile.names[c] for c in sorted(res.winners)),
        "complete": res.complete, "stop_reason": res.stop_reason or "",
        "runtime": res.trace.total_runtime,
        "states_explored": res.states_explored, "prune_hits": res.prune_hits,
        "cache_hits": res.cache_hits, "branch_nodes": res.branch_nodes,
    }
    # timed-out rows carry no discovery values; they are excluded from means
    ok = res.complete and res.trace.events
    row["discovery_100"] = res.trace.events[-1][0] if ok else ""
    for a in ALPHAS:
        row[f"alpha_{a:.1f}"] = alpha_discovery(res.trace, len(res.winners), a) if ok else ""
    return row


def _run_one(args):
    pid, profile, configs, budget = args
    return [_row(pid, profile, cfg, cfg.solve(profile, budget)) for cfg in configs]


def box_stats(values: Sequence[float]) -> dict[str, float]:
    v = np.asarray(values, dtype=float)
    q1, med, q3 = np.percentile(v, [25, 50, 75])
    return {"count": int(v.size), "min": float(v.min()), "q1": float(q1), "median": float(med),
            "q3": float(q3), "max": float(v.max()), "mean": float(v.mean())}


@dataclass
class BenchReport:
    rows: list[dict] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=ROW_FIELDS, lineterminator="\n")
        w.writeheader()
        w.writerows(self.rows)
        return buf.getvalue()

    def configs(self) -> list[str]:
        return list(dict.fromkeys(r["config"] for r in self.rows))

    def summary(self) -> dict:
        out = {"schema": BENCH_SCHEMA, "configs": {}}
        for cfg in self.configs():
            rows = [r for r in self.rows if r["config"] == cfg]
            done = [r for r in rows if r["complete"]]
            hist: dict[int, int] = {}
            by_k: dict[int, list[float]] = {}
            for r in done:
                hist[r["num_winners"]] = hist.get(r["num_winners"], 0) + 1
                by_k.setdefault(r["num_winners"], []).append(r["runtime"])
            entry = {
                "profiles": len(rows),
                "timeouts": len(rows) - len(done),
                "winner_histogram": {str(k): hist[k] for k in sorted(hist)},
                "runtime_by_winners": {str(k): box_stats(by_k[k]) for k in sorted(by_k)},
            }
            if done:
                entry["mean_runtime"] = float(np.mean([r["runtime"] for r in done]))
                entry["mean_states"] = float(np.mean([r["states_explored"] for r in done]))
                entry["mean_prunes"] = float(np.mean([r["prune_hits"] for r in done]))
                entry["mean_discovery"] = {
                    f"{a:.1f}": float(np.mean([r[f"alpha_{a:.1f}"] for r in done])) for a in ALPHAS
                }
            out["configs"][cfg] = entry
        return out


def run_bench(corpus: Iterable[Profile] | Iterable[tuple[str, Profile]], configurations: Sequence[SolverConfig],
              budget: Budget = Budget(), workers: int = 1) -> BenchReport:
    """Solve every profile under every configuration.

    Budget exhaustion is recorded in the row (``complete`` False) rather than
    raised.  ``workers > 1`` spreads profiles over processes.
    """
    items = []
    for i, p in enumerate(corpus):
        pid, prof = p if isinstance(p, tuple) else (f"p{i:05d}", p)
        items.append((pid, prof, tuple(configurations), budget))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_one, items))
    else:
        chunks = [_run_one(it) for it in items]
    return BenchReport([r for chunk in chunks for r in chunk])


def write_report(report: BenchReport, csv_path, json_path=None) -> None:
    with open(csv_path, "w", newline="") as fh:
        fh.write(report.to_csv())
    if json_path:
        with open(json_path, "w") as fh:
            json.dump(report.summary(), fh, indent=2, sort_keys=True)
            fh.write("\n")
