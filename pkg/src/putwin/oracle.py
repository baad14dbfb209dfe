"""Brute-force PUT-winners, used as ground truth in tests.

Nothing here is optimised beyond what is needed to finish on small profiles;
in particular nothing is shared with the search code in ``stv`` / ``rp``
except the fixed-order RP evaluator used by the literal enumeration path.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .profiles import Profile, nonneg_tiers, plurality_scores, wmg
from .rp import has_cycle, rp_fixed_order, topological_order


@dataclass(frozen=True)
class OracleBudget:
    max_universes: int = 2_000_000
    max_m: int = 6


class OracleBudgetExceeded(RuntimeError):
    pass


def brute_stv(profile: Profile, budget: OracleBudget = OracleBudget()) -> frozenset[int]:
    """Branch on every alternative tied for last place, no cache, no pruning."""
    if profile.m > budget.max_m:
        raise OracleBudgetExceeded(f"m={profile.m} exceeds max_m={budget.max_m}")
    leaves = 0

    def survivors(remaining: frozenset[int]) -> set[int]:
        nonlocal leaves
        if len(remaining) == 1:
            leaves += 1
            if leaves > budget.max_universes:
                raise OracleBudgetExceeded("too many elimination sequences")
            return set(remaining)
        scores = plurality_scores(profile, remaining)
        low = min(scores.values())
        found = set()
        for c in remaining:
            if scores[c] == low:
                found |= survivors(remaining - {c})
        return found

    return frozenset(survivors(frozenset(range(profile.m))))


def _tops(m: int, edges) -> set[int]:
    heads = {v for _, v in edges}
    return {v for v in range(m) if v not in heads}


def brute_rp(profile: Profile, budget: OracleBudget = OracleBudget(max_m=5),
             exhaustive: bool = False) -> frozenset[int]:
    """Top alternatives over every within-tier insertion order.

    With ``exhaustive`` every concatenation of per-tier permutations is fed
    to ``rp_fixed_order``.  Otherwise the same orders are enumerated edge by
    edge with identical prefixes shared: the outcome of the rest of an order
    depends only on the current locked graph and the edges still to insert.
    """
    return frozenset(r[0] for r in brute_rp_rankings(profile, budget, exhaustive))


def brute_rp_rankings(profile: Profile, budget: OracleBudget = OracleBudget(max_m=5),
                      exhaustive: bool = False) -> set[tuple[int, ...]]:
    """Every ranking Ranked Pairs can output under some tiebreaking."""
    m = profile.m
    if m > budget.max_m:
        raise OracleBudgetExceeded(f"m={m} exceeds max_m={budget.max_m}")
    tiers = nonneg_tiers(wmg(profile))

    if exhaustive:
        universes = math.prod(math.factorial(len(t)) for t in tiers)
        if universes > budget.max_universes:
            raise OracleBudgetExceeded(f"{universes} universes exceeds budget")
        rankings = set()
        for perms in itertools.product(*(itertools.permutations(t) for t in tiers)):
            order = [e for p in perms for e in p]
            rankings.add(tuple(rp_fixed_order(profile, order)))
        return rankings

    memo: dict = {}

    def outcomes(locked: frozenset, rest: frozenset) -> frozenset:
        if not rest:
            return frozenset([locked])
        key = (locked, rest)
        if key not in memo:
            if len(memo) >= budget.max_universes:
                raise OracleBudgetExceeded("too many partial insertion orders")
            found = set()
            for e in rest:
                nxt = locked if has_cycle(m, locked | {e}) else locked | {e}
                found |= outcomes(nxt, rest - {e})
            memo[key] = frozenset(found)
        return memo[key]

    graphs = {frozenset()}
    for tier in tiers:
        graphs = set().union(*(outcomes(g, frozenset(tier)) for g in graphs))
    return {tuple(topological_order(m, g)) for g in graphs}
