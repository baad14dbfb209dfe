"""PUT-STV: every alternative that survives STV under some tiebreaking.

Depth-first search over sets of remaining alternatives.  Children of a state
drop one of the alternatives tied at the lowest plurality score.  A state is
skipped when it was already visited (caching) or when every alternative in
it is already a known winner (pruning).
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .priority import LinearModel, bundled_model
from .profiles import Profile, plurality_scores
from .trace import Budget, BudgetExhausted, SearchClock, SolveResult


class Heuristic(str, Enum):
    UNIFORM = "uniform"
    PLURALITY = "plurality"
    LINEAR_MODEL = "linear"


# Feature order for LINEAR_MODEL; weight files list weights in this order.
STV_FEATURES = ("plurality_share", "borda_share", "rounds_survived_share")


@dataclass(frozen=True)
class PriorityHeuristic:
    mode: Heuristic = Heuristic.UNIFORM
    model: LinearModel | None = None

    def scores(self, profile: Profile) -> list[float]:
        """pi(c) for every alternative."""
        mode = Heuristic(self.mode)
        if mode is Heuristic.UNIFORM:
            return [1.0] * profile.m
        if mode is Heuristic.PLURALITY:
            p = plurality_scores(profile, range(profile.m))
            return [p[c] / profile.n for c in range(profile.m)]
        model = self.model or bundled_model("stv")
        return [model(f) for f in stv_features(profile)]


def stv_features(profile: Profile) -> list[tuple[float, float, float]]:
    m, n = profile.m, profile.n
    plural = plurality_scores(profile, range(m))
    borda = [0] * m
    for b in profile.ballots:
        for pos, c in enumerate(b.ranking):
            borda[c] += b.count * (m - 1 - pos)
    survived = [m - 1] * m
    remaining = set(range(m))
    for rnd in range(m - 1):
        c = _eliminate(profile, remaining, range(m))
        survived[c] = rnd
        remaining.discard(c)
    denom = max(m - 1, 1)
    return [
        (plural[c] / n, borda[c] / (n * denom), survived[c] / denom)
        for c in range(m)
    ]


def _eliminate(profile: Profile, remaining: set[int], tiebreak: Sequence[int]) -> int:
    scores = plurality_scores(profile, remaining)
    low = min(scores.values())
    tied = {c for c, s in scores.items() if s == low}
    return next(c for c in tiebreak if c in tied)


def stv_fixed_order(profile: Profile, tiebreak: Sequence[int]) -> int:
    """STV winner when every bottom tie eliminates the earliest alternative in ``tiebreak``."""
    if sorted(tiebreak) != list(range(profile.m)):
        raise ValueError("tiebreak must be a permutation of all alternatives")
    remaining = set(range(profile.m))
    while len(remaining) > 1:
        remaining.discard(_eliminate(profile, remaining, tiebreak))
    return remaining.pop()


def priority(state: Iterable[int], known: Iterable[int], heuristic: PriorityHeuristic | Sequence[float],
             profile: Profile | None = None) -> float:
    """Sum of pi over the state's alternatives that are not yet known winners.

    ``heuristic`` is either a list of precomputed pi values or a
    :class:`PriorityHeuristic` (then ``profile`` is needed unless the mode is
    UNIFORM).
    """
    if isinstance(heuristic, PriorityHeuristic):
        if Heuristic(heuristic.mode) is Heuristic.UNIFORM:
            pi = None
        else:
            pi = heuristic.scores(profile)
    else:
        pi = heuristic
    rest = set(state) - set(known)
    if pi is None:
        return float(len(rest))
    return float(sum(pi[c] for c in rest))


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def put_stv(
    profile: Profile,
    heuristic: PriorityHeuristic | Heuristic | str = Heuristic.UNIFORM,
    pruning: bool = True,
    caching: bool = True,
    budget: Budget = Budget(),
) -> SolveResult:
    if not isinstance(heuristic, PriorityHeuristic):
        heuristic = PriorityHeuristic(Heuristic(heuristic))
    m = profile.m
    pi = heuristic.scores(profile)
    ballots = [(b.ranking, b.count) for b in profile.merged().ballots]
    clock = SearchClock(budget)
    known = 0
    visited: set[int] = set()
    branch_nodes = 0
    full = (1 << m) - 1
    stack: list[tuple[int, tuple[int, ...]]] = [(full, ())]
    try:
        while stack:
            state, eliminated = stack.pop()
            if caching and state in visited:
                clock.trace.cache_hits += 1
                continue
            if pruning and state & ~known == 0:
                clock.trace.prune_hits += 1
                continue
            if caching:
                visited.add(state)
                clock.check_cache(len(visited))
            clock.tick()
            if state & (state - 1) == 0:
                c = state.bit_length() - 1
                known |= state
                clock.discover(c, eliminated + (c,))
                continue

            scores = dict.fromkeys(_bits(state), 0)
            for ranking, count in ballots:
                for c in ranking:
                    if state >> c & 1:
                        scores[c] += count
                        break
            low = min(scores.values())
            tied = [c for c, s in scores.items() if s == low]
            if len(tied) > 1:
                branch_nodes += 1

            def child_priority(c):
                rest = state & ~(1 << c) & ~known
                return sum(pi[a] for a in _bits(rest))

            # highest priority popped first; lower index first among equals
            tied.sort(key=lambda c: (-child_priority(c), c))
            for c in reversed(tied):
                stack.append((state & ~(1 << c), eliminated + (c,)))
    except BudgetExhausted as exc:
        return clock.result(False, str(exc), branch_nodes=branch_nodes)
    return clock.result(branch_nodes=branch_nodes)
