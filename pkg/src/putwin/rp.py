"""PUT-Ranked-Pairs: every alternative ranked first by RP under some tiebreaking.

The outer search walks the tiers of the nonnegative majority graph.  At each
node the current tier is merged into the locked graph in every *maximal*
way (a subset of the tier that keeps the graph acyclic and to which no
further tier edge can be added); each way is a child.

Graphs are handled internally as tuples of out-neighbour bitmasks, plus a
reachability table maintained incrementally: edge (u, v) can be locked iff
v does not already reach u.
"""
from __future__ import annotations

import heapq
import itertools
import os
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Sequence

from .priority import LinearModel, bundled_model
from .profiles import Profile, TierPartition, nonneg_tiers, plurality_scores, wmg
from .trace import Budget, BudgetExhausted, SearchClock, SolveResult

DEBUG = bool(os.environ.get("PUTWIN_DEBUG"))


class RPPriority(str, Enum):
    NONE = "none"
    LP = "lp"
    LPOUT = "lpout"
    LPML = "lpml"


RP_FEATURES = ("copeland_share", "positive_margin_share", "plurality_share")

Edge = tuple[int, int]


# -- bitmask graph helpers ---------------------------------------------------

def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _masks_from_edges(m: int, edges: Iterable[Edge]) -> tuple[int, ...]:
    out = [0] * m
    for u, v in edges:
        out[u] |= 1 << v
    return tuple(out)


def _edges_from_masks(out: Sequence[int]) -> frozenset[Edge]:
    return frozenset((u, v) for u, mask in enumerate(out) for v in _bits(mask))


def _reach(out: Sequence[int]) -> list[int]:
    """reach[v]: vertices reachable from v by a nonempty path."""
    m = len(out)
    reach = []
    for v in range(m):
        r = out[v]
        frontier = r
        while frontier:
            nxt = 0
            for x in _bits(frontier):
                nxt |= out[x]
            frontier = nxt & ~r
            r |= nxt
        reach.append(r)
    return reach


def _lock(out: tuple[int, ...], reach: list[int], u: int, v: int) -> tuple[tuple[int, ...], list[int]]:
    new_out = list(out)
    new_out[u] |= 1 << v
    gain = (1 << v) | reach[v]
    ubit = 1 << u
    new_reach = [r | gain if (x == u or r & ubit) else r for x, r in enumerate(reach)]
    return tuple(new_out), new_reach


def _tops(out: Sequence[int]) -> int:
    """Bitmask of indegree-0 vertices."""
    inc = 0
    for mask in out:
        inc |= mask
    return ((1 << len(out)) - 1) & ~inc


def _popcount(x: int) -> int:
    return bin(x).count("1")


# -- public graph type -------------------------------------------------------

@dataclass(frozen=True)
class LockedGraph:
    m: int
    edges: frozenset[Edge] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "edges", frozenset((int(u), int(v)) for u, v in self.edges))
        for u, v in self.edges:
            if u == v or not (0 <= u < self.m and 0 <= v < self.m):
                raise ValueError(f"bad edge ({u}, {v}) for m={self.m}")

    @classmethod
    def from_masks(cls, out: Sequence[int]) -> "LockedGraph":
        return cls(len(out), _edges_from_masks(out))

    def masks(self) -> tuple[int, ...]:
        return _masks_from_edges(self.m, self.edges)

    def is_acyclic(self) -> bool:
        return not has_cycle(self.m, self.edges)

    def tops(self) -> frozenset[int]:
        return frozenset(_bits(_tops(self.masks())))

    def outdegree(self, a: int) -> int:
        return sum(1 for u, _ in self.edges if u == a)


def has_cycle(m: int, edges: Iterable[Edge]) -> bool:
    """Plain colouring DFS; kept independent of the bitmask machinery."""
    adj: dict[int, list[int]] = {v: [] for v in range(m)}
    for u, v in edges:
        adj[u].append(v)
    colour = [0] * m
    for root in range(m):
        if colour[root]:
            continue
        colour[root] = 1
        stack = [(root, iter(adj[root]))]
        while stack:
            v, it = stack[-1]
            for w in it:
                if colour[w] == 1:
                    return True
                if colour[w] == 0:
                    colour[w] = 1
                    stack.append((w, iter(adj[w])))
                    break
            else:
                colour[v] = 2
                stack.pop()
    return False


# -- priorities --------------------------------------------------------------

def rp_features(profile: Profile) -> list[tuple[float, float, float]]:
    g = wmg(profile)
    m, n = profile.m, profile.n
    plural = plurality_scores(profile, range(m))
    denom = max(m - 1, 1)
    feats = []
    for a in range(m):
        row = [g.weights[a][b] for b in range(m) if b != a]
        copeland = sum(1.0 if x > 0 else 0.5 if x == 0 else 0.0 for x in row)
        margin = sum(max(x, 0) for x in row)
        feats.append((copeland / denom, margin / (n * denom), plural[a] / n))
    return feats


def rp_pi(profile: Profile, model: LinearModel | None = None) -> list[float]:
    model = model or bundled_model("rp")
    return [model(f) for f in rp_features(profile)]


def _priority_key(out: Sequence[int], known: int, mode: RPPriority, pi: Sequence[float] | None):
    fresh = _tops(out) & ~known
    if mode is RPPriority.LP:
        return _popcount(fresh)
    if mode is RPPriority.LPOUT:
        return (_popcount(fresh), sum(_popcount(out[a]) for a in _bits(fresh)))
    if mode is RPPriority.LPML:
        return sum(pi[a] for a in _bits(fresh))
    return 0


def local_priority(children: Sequence[LockedGraph], known: Iterable[int], mode: RPPriority | str = RPPriority.LP,
                   pi: Sequence[float] | None = None) -> list[LockedGraph]:
    """Children sorted by decreasing priority; equal keys keep their input order.

    LP counts indegree-0 vertices that are not known winners, LPOUT breaks LP
    ties by the total outdegree of those vertices, LPML sums ``pi`` over them.
    """
    mode = RPPriority(mode)
    if mode is RPPriority.NONE:
        return list(children)
    if mode is RPPriority.LPML and pi is None:
        raise ValueError("LPML needs per-alternative scores")
    kmask = sum(1 << c for c in set(known))
    keyed = [(_priority_key(c.masks(), kmask, mode, pi), i) for i, c in enumerate(children)]
    keyed.sort(key=lambda t: _neg(t[0]) + (t[1],))
    return [children[i] for _, i in keyed]


def _neg(key) -> tuple:
    if isinstance(key, tuple):
        return tuple(-k for k in key)
    return (-key,)


# -- maximal children --------------------------------------------------------

class _Stats:
    """Counters shared by the sub-searches of one solve.

    ``known`` is the live winner set of the outer search, so lazily consumed
    sub-searches prune against winners found after they started.
    """
    __slots__ = ("states", "prunes", "calls", "scc_splits", "clock", "known")

    def __init__(self, clock: SearchClock | None = None):
        self.states = self.prunes = self.calls = self.scc_splits = self.known = 0
        self.clock = clock

    def tick(self):
        self.states += 1
        if self.clock is not None:
            self.clock.tick()

    def poll(self):
        if self.clock is not None:
            self.clock.poll()


def _inner_prune(cur, known, stats, decide) -> bool:
    """Apply both pruning conditions to a partial child; True means drop it.

    Edges only ever get added below ``cur``, so its indegree-0 set can only
    shrink: if none are unknown the subtree is useless, and if exactly one is
    left every completion elects it.
    """
    status, c = _prune_status(cur, known | stats.known)
    if status is PRUNE:
        stats.prunes += 1
        return True
    if status is DECIDED and decide is not None:
        stats.prunes += 1
        decide(cur, c)
        return True
    return False


def _max_children(out: tuple[int, ...], reach: list[int], tier: Sequence[Edge], *,
                  mode: RPPriority = RPPriority.NONE, pi=None, known: int = 0, prune: bool = False,
                  stats: _Stats | None = None, decide=None) -> Iterator[tuple[tuple[int, ...], list[int]]]:
    """Yield (out, reach) of every maximal child, DFS over one-edge additions.

    With ``prune``, partial graphs whose indegree-0 vertices are all known
    are dropped.  If ``decide`` is given, a partial graph with a single
    indegree-0 vertex c is reported as ``decide(out, c)`` and dropped too.
    """
    stats = stats or _Stats()
    stats.calls += 1
    visited: set[tuple[int, ...]] = set()
    tier = tuple(tier)
    stack = [(out, reach)]
    while stack:
        cur, cur_reach = stack.pop()
        if cur in visited:
            continue
        visited.add(cur)
        if prune and _inner_prune(cur, known, stats, decide):
            continue
        stats.tick()
        live = [(u, v) for u, v in tier if not (cur[u] >> v & 1 or cur_reach[v] >> u & 1)]
        if not live:
            yield cur, cur_reach
            continue
        succ = []
        for u, v in live:
            nout = cur[:u] + (cur[u] | 1 << v,) + cur[u + 1:]
            if nout in visited:
                continue
            gain = (1 << v) | cur_reach[v]
            nreach = [r | gain if (x == u or r >> u & 1) else r for x, r in enumerate(cur_reach)]
            succ.append((nout, nreach))
        if mode is not RPPriority.NONE:
            k = known | stats.known
            succ.sort(key=lambda s: _neg(_priority_key(s[0], k, mode, pi)))
        stack.extend(reversed(succ))


def _sccs(out: Sequence[int]) -> list[int]:
    """Strongly connected components as vertex bitmasks, via the reachability closure."""
    reach = _reach(out)
    m = len(out)
    seen = 0
    comps = []
    for v in range(m):
        if seen >> v & 1:
            continue
        comp = 1 << v
        for u in _bits(reach[v]):
            if reach[u] >> v & 1:
                comp |= 1 << u
        seen |= comp
        comps.append(comp)
    return comps


def _scc_max_children(out: tuple[int, ...], reach: list[int], tier: Sequence[Edge], *,
                      mode: RPPriority = RPPriority.NONE, pi=None, known: int = 0, prune: bool = False,
                      stats: _Stats | None = None, decide=None) -> Iterator[tuple[tuple[int, ...], list[int]]]:
    """Maximal children assembled per strongly connected component.

    Tier edges running between components can never close a cycle and are
    always locked; each component's maximal children are found separately and
    combined by Cartesian product.
    """
    stats = stats or _Stats()
    live = [(u, v) for u, v in tier if not reach[v] >> u & 1]
    h = list(out)
    for u, v in live:
        h[u] |= 1 << v
    comps = _sccs(h)
    where = {}
    for i, comp in enumerate(comps):
        for v in _bits(comp):
            where[v] = i
    inner: dict[int, list[Edge]] = {}
    bridges = []
    for u, v in live:
        if where[u] == where[v]:
            inner.setdefault(where[u], []).append((u, v))
        else:
            bridges.append((u, v))
    if len(inner) <= 1 and not bridges:
        yield from _max_children(out, reach, live, mode=mode, pi=pi, known=known, prune=prune,
                                 stats=stats, decide=decide)
        return

    stats.scc_splits += 1
    base = list(out)
    for u, v in bridges:
        base[u] |= 1 << v
    parts = []
    for _, edges in sorted(inner.items()):
        added = []
        for child, _r in _max_children(out, reach, edges, mode=mode, pi=pi, known=known, stats=stats):
            added.append(tuple(c ^ o for c, o in zip(child, out)))
        parts.append(added)
    for combo in itertools.product(*parts):
        child = list(base)
        for added in combo:
            for u, mask in enumerate(added):
                child[u] |= mask
        child = tuple(child)
        stats.poll()
        if prune and _inner_prune(child, known, stats, decide):
            continue
        yield child, _reach(child)


def _as_request(graph: LockedGraph, tier: Iterable[Edge]) -> tuple[tuple[int, ...], list[int], list[Edge]]:
    tier = sorted(set(tier))
    if set(tier) & graph.edges:
        raise ValueError("tier edges must not already be in the graph")
    if not graph.is_acyclic():
        raise ValueError("graph must be acyclic")
    out = graph.masks()
    return out, _reach(out), tier


def max_children(graph: LockedGraph, tier: Iterable[Edge], priority: RPPriority | str = RPPriority.NONE,
                 known: Iterable[int] | None = None, pi=None) -> list[LockedGraph]:
    """All maximal children of (graph, tier), in discovery order.

    Passing ``known`` enables pruning and then omits children whose
    indegree-0 vertices are all known winners.
    """
    out, reach, tier = _as_request(graph, tier)
    kmask = sum(1 << c for c in set(known or ()))
    return [LockedGraph.from_masks(c) for c, _ in
            _max_children(out, reach, tier, mode=RPPriority(priority), pi=pi, known=kmask, prune=known is not None)]


def scc_max_children(graph: LockedGraph, tier: Iterable[Edge], priority: RPPriority | str = RPPriority.NONE,
                     known: Iterable[int] | None = None, pi=None) -> list[LockedGraph]:
    out, reach, tier = _as_request(graph, tier)
    kmask = sum(1 << c for c in set(known or ()))
    return [LockedGraph.from_masks(c) for c, _ in
            _scc_max_children(out, reach, tier, mode=RPPriority(priority), pi=pi, known=kmask, prune=known is not None)]


def is_maximal_child(graph: LockedGraph, tier: Iterable[Edge], candidate: LockedGraph) -> bool:
    tier = set(tier)
    if not graph.edges <= candidate.edges or not candidate.edges <= graph.edges | tier:
        raise ValueError("candidate must lie between graph and graph + tier")
    if has_cycle(candidate.m, candidate.edges):
        return False
    return all(has_cycle(candidate.m, candidate.edges | {e}) for e in tier - candidate.edges)


# -- pruning -----------------------------------------------------------------

CONTINUE, PRUNE, DECIDED = "CONTINUE", "PRUNE", "DECIDED"


def prune_check(graph: LockedGraph, known: Iterable[int]) -> tuple[str, int | None]:
    """(PRUNE, None) when no unknown vertex still has indegree 0;
    (DECIDED, c) when c is the only indegree-0 vertex left."""
    return _prune_status(graph.masks(), sum(1 << c for c in set(known)))


def _prune_status(out: Sequence[int], known: int) -> tuple[str, int | None]:
    tops = _tops(out)
    if tops & ~known == 0:
        return PRUNE, None
    if tops & (tops - 1) == 0:
        return DECIDED, tops.bit_length() - 1
    return CONTINUE, None


# -- fixed-order RP ----------------------------------------------------------

def topological_order(m: int, edges: Iterable[Edge]) -> list[int]:
    """Kahn's algorithm, smallest index first among available vertices."""
    indeg = [0] * m
    adj: dict[int, list[int]] = {v: [] for v in range(m)}
    for u, v in edges:
        adj[u].append(v)
        indeg[v] += 1
    heap = [v for v in range(m) if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for w in adj[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(heap, w)
    if len(order) != m:
        raise ValueError("graph has a cycle")
    return order


def _check_tiebreak(tiers: TierPartition, order: Sequence[Edge]) -> None:
    rank = {e: k for k, tier in enumerate(tiers) for e in tier}
    order = [tuple(e) for e in order]
    if len(order) != len(rank) or set(order) != set(rank):
        raise ValueError("edge order must list every nonnegative-margin edge exactly once")
    if any(rank[a] > rank[b] for a, b in zip(order, order[1:])):
        raise ValueError("edge order violates tier precedence")


def locked_graph_for_order(m: int, order: Iterable[Edge]) -> set[Edge]:
    """Insert edges one by one, skipping any that would close a cycle."""
    locked: set[Edge] = set()
    for e in order:
        if not has_cycle(m, locked | {e}):
            locked.add(e)
    return locked


def rp_fixed_order(profile: Profile, edge_tiebreak: Sequence[Edge]) -> list[int]:
    """Ranked Pairs ranking for one tier-respecting insertion order of the edges."""
    tiers = nonneg_tiers(wmg(profile))
    _check_tiebreak(tiers, edge_tiebreak)
    return topological_order(profile.m, locked_graph_for_order(profile.m, edge_tiebreak))


# -- the outer search --------------------------------------------------------

def _witness(node, tiers: TierPartition, depth: int) -> tuple[Edge, ...]:
    chunks = []
    while node is not None:
        chunk, node = node
        chunks.append(chunk)
    seq = [e for chunk in reversed(chunks) for e in chunk]
    for tier in tiers.tiers[depth:]:
        seq.extend(tier)
    return tuple(seq)


def _tier_order(parent: tuple[int, ...], child: tuple[int, ...], tier: Sequence[Edge]) -> tuple[Edge, ...]:
    chosen = [(u, v) for u, v in tier if not parent[u] >> v & 1 and child[u] >> v & 1]
    chosen_set = set(chosen)
    return tuple(chosen) + tuple(e for e in tier if e not in chosen_set)


def _child_states(parent, kids, tier, depth, wit, fanout):
    for c_out, c_reach in kids:
        fanout[0] += 1
        yield c_out, c_reach, depth + 1, (_tier_order(parent, c_out, tier), wit)


def put_rp(
    profile: Profile,
    priority: RPPriority | str = RPPriority.LP,
    use_scc: bool = True,
    pruning: bool = True,
    caching: bool = True,
    budget: Budget = Budget(),
    model: LinearModel | None = None,
) -> SolveResult:
    """All PUT-RP winners.

    ``states_explored`` counts nodes expanded by both the outer tier search
    and the maximal-children sub-searches; the split is in ``extra``.  A node
    counts as branching once it has produced two children, where a partial
    child settled by the single-top rule counts as one.
    """
    priority = RPPriority(priority)
    tiers = nonneg_tiers(wmg(profile))
    m, depth_max = profile.m, len(tiers)
    pi = rp_pi(profile, model) if priority is RPPriority.LPML else None
    clock = SearchClock(budget)
    stats = _Stats(clock)
    expand = _scc_max_children if use_scc else _max_children
    visited: set = set()
    outer_states = 0
    fanouts: list[list[int]] = []

    def found(c, witness):
        if not stats.known >> c & 1:
            stats.known |= 1 << c
            clock.discover(c, witness)

    def _decider(parent, tier, depth, wit, fanout):
        def decide(partial, c):
            fanout[0] += 1
            found(c, _witness((_tier_order(parent, partial, tier), wit), tiers, depth + 1))
        return decide

    empty = (0,) * m
    stack: list[Iterator] = [iter([(empty, [0] * m, 0, None)])]
    try:
        while stack:
            try:
                out, reach, depth, wit = next(stack[-1])
            except StopIteration:
                stack.pop()
                continue
            if caching:
                key = (out, depth)
                if key in visited:
                    clock.trace.cache_hits += 1
                    continue
                visited.add(key)
                clock.check_cache(len(visited))
            if DEBUG:
                assert not has_cycle(m, _edges_from_masks(out))
            if pruning:
                status, c = _prune_status(out, stats.known)
                if status is PRUNE:
                    clock.trace.prune_hits += 1
                    continue
                if status is DECIDED:
                    clock.trace.prune_hits += 1
                    found(c, _witness(wit, tiers, depth))
                    continue
            outer_states += 1
            clock.tick()
            if depth == depth_max:
                w = _witness(wit, tiers, depth)
                for c in _bits(_tops(out)):
                    found(c, w)
                continue

            tier = tiers[depth]
            fanout = [0]
            fanouts.append(fanout)
            kids = expand(out, reach, tier, mode=priority, pi=pi, prune=pruning, stats=stats,
                          decide=_decider(out, tier, depth, wit, fanout) if pruning else None)
            if priority is not RPPriority.NONE:
                kids = list(kids)
                kids.sort(key=lambda k: _neg(_priority_key(k[0], stats.known, priority, pi)))
            stack.append(_child_states(out, kids, tier, depth, wit, fanout))
    except BudgetExhausted as exc:
        result = clock.result(False, str(exc))
    else:
        result = clock.result()
    result.trace.prune_hits += stats.prunes
    result.branch_nodes = sum(1 for f in fanouts if f[0] > 1)
    result.extra = {
        "outer_states": outer_states,
        "maxchildren_states": stats.states,
        "maxchildren_calls": stats.calls,
        "scc_decompositions": stats.scc_splits,
    }
    return result
