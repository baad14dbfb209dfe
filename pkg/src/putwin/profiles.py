"""Election data model: ballots, profiles, pairwise margins and PrefLib I/O.

Alternatives are dense 0-based indices.  Ballots may be truncated (SOI): an
alternative ranked on a ballot beats every alternative left off it, and two
unranked alternatives contribute nothing to each other's margin.
"""
from __future__ import annotations

import itertools
import string
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

SOC = "SOC"
SOI = "SOI"


class ProfileError(ValueError):
    """Raised for profiles that violate the ballot/profile invariants."""


class PreflibFormatError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


def default_names(m: int) -> tuple[str, ...]:
    if m <= 26:
        return tuple(string.ascii_lowercase[:m])
    return tuple(f"c{i + 1}" for i in range(m))


@dataclass(frozen=True)
class Ballot:
    ranking: tuple[int, ...]
    count: int = 1

    def __post_init__(self):
        object.__setattr__(self, "ranking", tuple(int(c) for c in self.ranking))
        if not self.ranking:
            raise ProfileError("empty ballot")
        if len(set(self.ranking)) != len(self.ranking):
            raise ProfileError(f"repeated alternative in ballot {self.ranking}")
        if self.count < 1:
            raise ProfileError(f"ballot multiplicity must be >= 1, got {self.count}")


@dataclass(frozen=True)
class Profile:
    """A multiset of strict (possibly truncated) rankings over ``m`` alternatives."""

    m: int
    ballots: tuple[Ballot, ...]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        ballots = tuple(b if isinstance(b, Ballot) else Ballot(*b) for b in self.ballots)
        object.__setattr__(self, "ballots", ballots)
        if self.m < 1:
            raise ProfileError("a profile needs at least one alternative")
        if not ballots:
            raise ProfileError("a profile needs at least one ballot")
        for b in ballots:
            if any(c < 0 or c >= self.m for c in b.ranking):
                raise ProfileError(f"ballot {b.ranking} references an alternative outside [0, {self.m})")
        names = tuple(self.names) if self.names else default_names(self.m)
        if len(names) != self.m:
            raise ProfileError(f"expected {self.m} names, got {len(names)}")
        object.__setattr__(self, "names", names)

    @classmethod
    def from_rankings(cls, m: int, rankings: Iterable[Sequence[int]], names: Sequence[str] = ()) -> "Profile":
        return cls(m, tuple(Ballot(tuple(r)) for r in rankings), tuple(names))

    @property
    def n(self) -> int:
        return sum(b.count for b in self.ballots)

    @property
    def alternatives(self) -> range:
        return range(self.m)

    @property
    def is_complete(self) -> bool:
        return all(len(b.ranking) == self.m for b in self.ballots)

    def merged(self) -> "Profile":
        """Identical rankings folded into one ballot, first-occurrence order."""
        counts: Counter = Counter()
        for b in self.ballots:
            counts[b.ranking] += b.count
        return Profile(self.m, tuple(Ballot(r, c) for r, c in counts.items()), self.names)

    def relabeled(self, perm: Sequence[int]) -> "Profile":
        """Alternative ``a`` becomes ``perm[a]``."""
        names = [""] * self.m
        for a, p in enumerate(perm):
            names[p] = self.names[a]
        return Profile(
            self.m,
            tuple(Ballot(tuple(perm[c] for c in b.ranking), b.count) for b in self.ballots),
            tuple(names),
        )


def plurality_scores(profile: Profile, remaining: Iterable[int]) -> dict[int, int]:
    remaining = set(remaining)
    if not remaining:
        raise ValueError("remaining set is empty")
    scores = dict.fromkeys(sorted(remaining), 0)
    for b in profile.ballots:
        for c in b.ranking:
            if c in remaining:
                scores[c] += b.count
                break
    return scores


@dataclass(frozen=True)
class WeightedMajorityGraph:
    """Pairwise margins; ``weights[a][b] == -weights[b][a]``."""

    m: int
    weights: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        w = tuple(tuple(int(x) for x in row) for row in self.weights)
        if len(w) != self.m or any(len(row) != self.m for row in w):
            raise ValueError("weight matrix must be m x m")
        for a in range(self.m):
            if w[a][a] != 0:
                raise ValueError("diagonal weights must be zero")
            for b in range(a + 1, self.m):
                if w[a][b] != -w[b][a]:
                    raise ValueError(f"weights not antisymmetric at ({a}, {b})")
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_edges(cls, m: int, edges: Mapping[tuple[int, int], int]) -> "WeightedMajorityGraph":
        """Build from one direction per pair; unspecified pairs get margin 0."""
        w = np.zeros((m, m), dtype=int)
        for (a, b), x in edges.items():
            if w[a, b] != 0 and w[a, b] != x:
                raise ValueError(f"conflicting weights for ({a}, {b})")
            w[a, b], w[b, a] = x, -x
        return cls(m, tuple(map(tuple, w.tolist())))

    def weight(self, a: int, b: int) -> int:
        return self.weights[a][b]

    def as_array(self) -> np.ndarray:
        return np.array(self.weights, dtype=int)


def wmg(profile: Profile) -> WeightedMajorityGraph:
    m = profile.m
    w = np.zeros((m, m), dtype=int)
    for b in profile.ballots:
        ranked = b.ranking
        unranked = [c for c in range(m) if c not in set(ranked)]
        for i, a in enumerate(ranked):
            for c in ranked[i + 1:]:
                w[a, c] += b.count
            for c in unranked:
                w[a, c] += b.count
    w = w - w.T
    return WeightedMajorityGraph(m, tuple(map(tuple, w.tolist())))


@dataclass(frozen=True)
class TierPartition:
    """Nonnegative-margin edges grouped by weight, heaviest tier first."""

    tiers: tuple[tuple[tuple[int, int], ...], ...]
    weights: tuple[int, ...]

    def __len__(self):
        return len(self.tiers)

    def __iter__(self):
        return iter(self.tiers)

    def __getitem__(self, k):
        return self.tiers[k]

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [e for tier in self.tiers for e in tier]


def nonneg_tiers(g: WeightedMajorityGraph) -> TierPartition:
    by_weight: dict[int, list] = {}
    for a, b in itertools.permutations(range(g.m), 2):
        x = g.weights[a][b]
        if x >= 0:
            by_weight.setdefault(x, []).append((a, b))
    order = sorted(by_weight, reverse=True)
    return TierPartition(tuple(tuple(sorted(by_weight[x])) for x in order), tuple(order))


def impartial_culture(m: int, n: int, seed=None) -> Profile:
    """``n`` rankings drawn uniformly from all ``m!`` linear orders.

    ``seed`` may be an int or a ``numpy.random.Generator`` (for drawing many
    profiles from one stream).
    """
    if m < 1 or n < 1:
        raise ValueError("need m >= 1 and n >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    rankings = [tuple(int(c) for c in rng.permutation(m)) for _ in range(n)]
    return Profile.from_rankings(m, rankings)


def mcgarvey_profile(target: WeightedMajorityGraph, names: Sequence[str] = ()) -> Profile:
    """A profile whose weighted majority graph equals ``target``.

    Each pair (a, b) with margin 2k gets k copies of the ballot pair
    ``a > b > rest`` / ``reversed(rest) > a > b``, which moves only that margin.
    Targets with all margins odd are handled by seeding with one ballot and
    realising the (even) remainder.
    """
    m = target.m
    pairs = list(itertools.combinations(range(m), 2))
    parities = {target.weights[a][b] % 2 for a, b in pairs}
    if len(parities) > 1:
        raise ValueError("target margins must all be even (or all odd)")
    ballots: list[tuple[int, ...]] = []
    residual = target.as_array()
    if parities == {1}:
        seed_ballot = tuple(range(m))
        ballots.append(seed_ballot)
        residual = residual - wmg(Profile.from_rankings(m, [seed_ballot])).as_array()
    for a, b in itertools.permutations(range(m), 2):
        x = int(residual[a, b])
        if x <= 0:
            continue
        rest = [c for c in range(m) if c not in (a, b)]
        for _ in range(x // 2):
            ballots.append((a, b, *rest))
            ballots.append((*reversed(rest), a, b))
    if not ballots:
        ballots = [tuple(range(m)), tuple(reversed(range(m)))]
    return Profile.from_rankings(m, ballots, names)


# -- PrefLib (classic format) ------------------------------------------------

def parse_preflib(text: str, kind: str = SOI) -> Profile:
    """Parse a classic PrefLib ``.soc`` / ``.soi`` file."""
    if kind not in (SOC, SOI):
        raise ValueError(f"unsupported kind {kind!r}")
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
    it = iter(lines)

    def next_line(what):
        try:
            return next(it)
        except StopIteration:
            last = lines[-1][0] if lines else 0
            raise PreflibFormatError(last, f"unexpected end of file, expected {what}") from None

    def ints(lineno, s):
        try:
            return [int(x) for x in s.split(",")]
        except ValueError:
            raise PreflibFormatError(lineno, f"expected comma-separated integers, got {s!r}") from None

    lineno, s = next_line("number of alternatives")
    try:
        m = int(s)
    except ValueError:
        raise PreflibFormatError(lineno, f"expected number of alternatives, got {s!r}") from None
    if m < 1:
        raise PreflibFormatError(lineno, "number of alternatives must be positive")
    names = []
    for k in range(m):
        lineno, s = next_line(f"candidate line {k + 1}")
        idx, _, name = s.partition(",")
        if idx.strip() != str(k + 1) or not _:
            raise PreflibFormatError(lineno, f"expected '{k + 1},<name>', got {s!r}")
        names.append(name.strip())
    lineno, s = next_line("voter totals line")
    header = ints(lineno, s)
    if len(header) != 3:
        raise PreflibFormatError(lineno, "voter totals line needs 3 fields")
    n_declared, n_sum, n_unique = header
    header_lineno = lineno

    ballots = []
    for lineno, s in it:
        row = ints(lineno, s)
        if len(row) < 2:
            raise PreflibFormatError(lineno, "ballot row needs a count and at least one alternative")
        count, ranking = row[0], row[1:]
        if count < 1:
            raise PreflibFormatError(lineno, f"count must be positive, got {count}")
        if any(c < 1 or c > m for c in ranking):
            raise PreflibFormatError(lineno, f"alternative index out of range 1..{m}")
        if len(set(ranking)) != len(ranking):
            raise PreflibFormatError(lineno, "duplicate alternative in ranking")
        if kind == SOC and len(ranking) != m:
            raise PreflibFormatError(lineno, f"SOC ballot must rank all {m} alternatives")
        ballots.append(Ballot(tuple(c - 1 for c in ranking), count))

    total = sum(b.count for b in ballots)
    if total != n_declared or total != n_sum:
        raise PreflibFormatError(
            header_lineno, f"declared {n_declared} voters / {n_sum} votes but counts sum to {total}"
        )
    if n_unique != len(ballots):
        raise PreflibFormatError(header_lineno, f"declared {n_unique} unique orders, found {len(ballots)}")
    if not ballots:
        raise PreflibFormatError(header_lineno, "no ballots")
    return Profile(m, tuple(ballots), tuple(names))


def serialize_preflib(profile: Profile, kind: str = SOI) -> str:
    if kind == SOC and not profile.is_complete:
        raise ValueError("SOC output requires every ballot to rank all alternatives")
    merged = profile.merged()
    rows = sorted(merged.ballots, key=lambda b: (-b.count, b.ranking))
    out = [str(profile.m)]
    out += [f"{i + 1},{name}" for i, name in enumerate(profile.names)]
    out.append(f"{profile.n},{profile.n},{len(rows)}")
    out += [",".join(map(str, (b.count, *(c + 1 for c in b.ranking)))) for b in rows]
    return "\n".join(out) + "\n"


def kind_from_path(path) -> str:
    return SOC if str(path).lower().endswith(".soc") else SOI
