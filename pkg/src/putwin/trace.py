"""Search bookkeeping shared by the solvers: budgets, discovery traces, results."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any

DEFAULT_MAX_STATES = 10**7
DEFAULT_MAX_CACHE = 5 * 10**6

SCHEMA_VERSION = "putwin.solve/1"


@dataclass(frozen=True)
class Budget:
    max_states: int = DEFAULT_MAX_STATES
    time_limit: float | None = None
    # caps the visited-state cache; stands in for a memory limit
    max_cache: int = DEFAULT_MAX_CACHE


class BudgetExhausted(Exception):
    pass


@dataclass
class DiscoveryTrace:
    events: list[tuple[float, int]] = field(default_factory=list)
    total_runtime: float = 0.0
    states_explored: int = 0
    prune_hits: int = 0
    cache_hits: int = 0

    @property
    def discovered(self) -> list[int]:
        return [c for _, c in self.events]


@dataclass
class SolveResult:
    winners: frozenset[int]
    trace: DiscoveryTrace
    complete: bool = True
    stop_reason: str | None = None
    # winner -> certificate: elimination order (STV) or edge insertion order (RP)
    witnesses: dict[int, tuple] = field(default_factory=dict)
    branch_nodes: int = 0
    extra: dict[str, int] = field(default_factory=dict)

    @property
    def states_explored(self) -> int:
        return self.trace.states_explored

    @property
    def prune_hits(self) -> int:
        return self.trace.prune_hits

    @property
    def cache_hits(self) -> int:
        return self.trace.cache_hits

    def to_json(self, names=None, rule: str | None = None) -> dict[str, Any]:
        label = (lambda c: names[c]) if names is not None else (lambda c: c)

        witnesses = {}
        for c, seq in sorted(self.witnesses.items()):
            if seq and isinstance(seq[0], tuple):
                witnesses[label(c)] = [[label(u), label(v)] for u, v in seq]
            else:
                witnesses[label(c)] = [label(x) for x in seq]
        return {
            "schema": SCHEMA_VERSION,
            "rule": rule,
            "winners": [label(c) for c in sorted(self.winners)],
            "complete": self.complete,
            "stop_reason": self.stop_reason,
            "witnesses": witnesses,
            "counters": {
                "states_explored": self.states_explored,
                "prune_hits": self.prune_hits,
                "cache_hits": self.cache_hits,
                "branch_nodes": self.branch_nodes,
                **self.extra,
            },
            "trace": [{"t": t, "winner": label(c)} for t, c in self.trace.events],
            "total_runtime": self.trace.total_runtime,
        }


class SearchClock:
    """Times discoveries and enforces the budget."""

    def __init__(self, budget: Budget):
        self.budget = budget
        self.trace = DiscoveryTrace()
        self.winners: set[int] = set()
        self.witnesses: dict[int, tuple] = {}
        self._t0 = time.perf_counter()
        self._deadline = None if budget.time_limit is None else self._t0 + budget.time_limit
        self._polls = 0

    def elapsed(self) -> float:
        return time.perf_counter() - self._t0

    def discover(self, c: int, witness: tuple = ()) -> None:
        if c not in self.winners:
            self.winners.add(c)
            self.witnesses[c] = witness
            self.trace.events.append((self.elapsed(), c))

    def tick(self) -> None:
        self.trace.states_explored += 1
        if self.trace.states_explored > self.budget.max_states:
            raise BudgetExhausted("state budget exceeded")
        if self._deadline is not None and (self.trace.states_explored & 255) == 0:
            if time.perf_counter() > self._deadline:
                raise BudgetExhausted("time limit exceeded")

    def poll(self) -> None:
        """Time check for loops that do not count as states."""
        self._polls += 1
        if self._deadline is not None and (self._polls & 255) == 0:
            if time.perf_counter() > self._deadline:
                raise BudgetExhausted("time limit exceeded")

    def check_cache(self, size: int) -> None:
        if size > self.budget.max_cache:
            raise BudgetExhausted("cache size cap exceeded")

    def result(self, complete=True, stop_reason=None, **kw) -> SolveResult:
        self.trace.total_runtime = self.elapsed()
        return SolveResult(
            frozenset(self.winners), self.trace, complete, stop_reason, dict(self.witnesses), **kw
        )
