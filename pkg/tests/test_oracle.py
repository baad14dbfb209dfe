import itertools

import pytest
from hypothesis import given, strategies as st

from putwin.ilp import induced_weights
from putwin.oracle import OracleBudget, OracleBudgetExceeded, brute_rp, brute_rp_rankings, brute_stv
from putwin.profiles import Ballot, Profile, WeightedMajorityGraph, impartial_culture, mcgarvey_profile, wmg
from putwin.stv import stv_fixed_order

from conftest import profiles

A, B, C, D = 0, 1, 2, 3


def test_stv_examples():
    assert brute_stv(Profile(2, (Ballot((A, B)), Ballot((B, A))))) == {A, B}
    assert brute_stv(Profile(3, (Ballot((C, A, B), 5),))) == {C}


def test_rp_examples():
    cyc = mcgarvey_profile(WeightedMajorityGraph.from_edges(3, {(A, B): 2, (B, C): 2, (C, A): 2}))
    assert brute_rp(cyc) == {A, B, C}
    tied_example = mcgarvey_profile(WeightedMajorityGraph.from_edges(
        4, {(D, C): 3, (C, A): 3, (B, A): 3, (C, B): 1, (B, D): 1, (D, A): 1}))
    assert {B, D} <= brute_rp(tied_example)


def test_budget_limits():
    with pytest.raises(OracleBudgetExceeded):
        brute_stv(impartial_culture(7, 3, seed=0))
    with pytest.raises(OracleBudgetExceeded):
        brute_rp(impartial_culture(6, 3, seed=0))
    with pytest.raises(OracleBudgetExceeded):
        brute_rp(impartial_culture(5, 4, seed=1), OracleBudget(max_universes=1), exhaustive=True)


def test_stv_permutation_cross_check(rng):
    for _ in range(200):
        p = impartial_culture(5, int(rng.integers(2, 8)), rng)
        assert brute_stv(p) == {stv_fixed_order(p, s) for s in itertools.permutations(range(5))}


@given(profiles(min_m=2, max_m=4, max_n=4))
def test_rp_memoized_equals_exhaustive(p):
    assert brute_rp_rankings(p) == brute_rp_rankings(p, exhaustive=True)


@given(profiles(max_m=5, max_n=5), st.randoms(use_true_random=False))
def test_relabeling_invariance(p, rnd):
    perm = list(range(p.m))
    rnd.shuffle(perm)
    q = p.relabeled(perm)
    assert brute_rp(q) == {perm[c] for c in brute_rp(p)}
    assert brute_stv(q) == {perm[c] for c in brute_stv(p)}


@given(profiles(max_m=5, max_n=5), st.randoms(use_true_random=False))
def test_ballot_order_and_splitting(p, rnd):
    ballots = list(p.ballots)
    rnd.shuffle(ballots)
    split = [Ballot(b.ranking) for b in ballots for _ in range(b.count)]
    for q in (Profile(p.m, tuple(ballots)), Profile(p.m, tuple(split)), p.merged()):
        assert brute_stv(q) == brute_stv(p)
        assert brute_rp(q) == brute_rp(p)


@given(profiles(max_m=5, max_n=5))
def test_deterministic(p):
    assert brute_stv(p) == brute_stv(p)
    assert brute_rp(p) == brute_rp(p)


def induced_weight_rankings(p: Profile) -> set[tuple[int, ...]]:
    """Rankings R such that every wmg>=0 edge (b, a) against R is outweighed
    by a path a -> b of edges agreeing with R."""
    g = wmg(p)
    nonneg = {(a, b): g.weight(a, b) for a, b in itertools.permutations(range(p.m), 2) if g.weight(a, b) >= 0}
    found = set()
    for r in itertools.permutations(range(p.m)):
        pos = {c: i for i, c in enumerate(r)}
        g_r = {e: w for e, w in nonneg.items() if pos[e[0]] < pos[e[1]]}
        iw = induced_weights(g_r) if g_r else {}
        if all(iw.get((a, b), float("-inf")) >= w for (b, a), w in nonneg.items() if pos[a] < pos[b]):
            found.add(r)
    return found


@given(profiles(min_m=2, max_m=5, max_n=5))
def test_rankings_match_induced_weight_characterization(p):
    assert brute_rp_rankings(p) == induced_weight_rankings(p)
