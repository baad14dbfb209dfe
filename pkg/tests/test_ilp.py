import itertools
import math
import sys

import pytest
from hypothesis import given, strategies as st

from putwin.ilp import (
    NO_PATH, IlpModel, SolverError, SolverUnavailable, Status, build_rp_ilp, build_stv_ilp,
    induced_weight, induced_weights, put_winners_via_ilp, serialize_model, solve_feasibility,
)
from putwin.oracle import brute_rp, brute_stv
from putwin.profiles import (
    Ballot, Profile, WeightedMajorityGraph, impartial_culture, mcgarvey_profile, nonneg_tiers, wmg,
)
from putwin.rp import put_rp
from putwin.stv import put_stv

from conftest import GOLDEN, profiles
from golden_models import golden_models

A, B, C, D = 0, 1, 2, 3
UNANIMOUS2 = Profile(2, (Ballot((A, B), 3),))
SYM2 = Profile(2, (Ballot((A, B)), Ballot((B, A))))


def count(model, prefix):
    return sum(1 for v in model.variables if v.startswith(prefix))


@given(profiles(min_m=2, max_m=5, max_n=5))
def test_rp_variable_counts(p):
    m, k = p.m, len(nonneg_tiers(wmg(p)))
    model = build_rp_ilp(p, 0)
    assert count(model, "X_") == m * (m - 1) * k
    assert count(model, "Y_") == m * (m - 1) * (m - 2) * k
    model.validate()


def test_model_names_within_limit():
    p = impartial_culture(6, 7, seed=2)
    for model in (build_rp_ilp(p, 3), build_stv_ilp(p, 3)):
        assert all(len(v) <= 64 for v in model.variables)
        assert all(len(c.name) <= 64 for c in model.constraints)


def test_serialize_deterministic():
    p = impartial_culture(4, 5, seed=3)
    assert serialize_model(build_rp_ilp(p, 1)) == serialize_model(build_rp_ilp(p, 1))
    assert serialize_model(build_stv_ilp(p, 2)) == serialize_model(build_stv_ilp(p, 2))


def test_name_collision_rejected():
    model = IlpModel()
    model.binary("x" * 70)
    model.binary("x" * 65)
    with pytest.raises(ValueError, match="collision"):
        serialize_model(model)


def test_undeclared_variable_rejected():
    with pytest.raises(ValueError):
        IlpModel().add("c", [(1, "nope")], "<=", 1)


@pytest.mark.parametrize("name, model", list(golden_models()), ids=lambda x: x if isinstance(x, str) else "")
def test_goldens(name, model):
    assert serialize_model(model) == (GOLDEN / name).read_text()


def test_unavailable_without_solver(monkeypatch):
    monkeypatch.delenv("PUTWIN_ILP_SOLVER", raising=False)
    assert solve_feasibility(build_rp_ilp(SYM2, 0)) is Status.UNAVAILABLE
    with pytest.raises(SolverUnavailable):
        put_winners_via_ilp(SYM2, "rp")


def test_broken_solver_is_an_error():
    with pytest.raises(SolverError):
        solve_feasibility(build_rp_ilp(SYM2, 0), f"{sys.executable} -c 'print(42)'")
    with pytest.raises(SolverError):
        solve_feasibility(build_rp_ilp(SYM2, 0), f"{sys.executable} -c 'import sys; sys.exit(3)'")


def test_trivial_models(solver_command):
    empty = IlpModel()
    assert solve_feasibility(empty, solver_command) is Status.FEASIBLE
    free = IlpModel()
    free.binary("x")
    assert solve_feasibility(free, solver_command) is Status.FEASIBLE
    clash = IlpModel()
    x = clash.binary("x")
    clash.add("up", [(1, x)], ">=", 1)
    clash.add("down", [(1, x)], "<=", 0)
    assert solve_feasibility(clash, solver_command) is Status.INFEASIBLE


def test_m2_examples(solver_command):
    assert solve_feasibility(build_rp_ilp(UNANIMOUS2, A), solver_command) is Status.FEASIBLE
    assert solve_feasibility(build_rp_ilp(UNANIMOUS2, B), solver_command) is Status.INFEASIBLE
    assert solve_feasibility(build_stv_ilp(UNANIMOUS2, A), solver_command) is Status.FEASIBLE
    assert solve_feasibility(build_stv_ilp(UNANIMOUS2, B), solver_command) is Status.INFEASIBLE
    assert put_winners_via_ilp(SYM2, "stv", solver_command) == {A, B}


def test_three_cycle_rp(solver_command):
    cyc = mcgarvey_profile(WeightedMajorityGraph.from_edges(3, {(A, B): 2, (B, C): 2, (C, A): 2}))
    assert put_winners_via_ilp(cyc, "rp", solver_command, workers=2) == {A, B, C}


def test_unanimous_both_rules(solver_command):
    p = Profile(4, (Ballot((C, A, D, B), 3),))
    for rule in ("stv", "rp"):
        assert put_winners_via_ilp(p, rule, solver_command) == {C}


def test_agrees_with_solvers(solver_command, rng):
    for _ in range(8):
        p = impartial_culture(4, int(rng.integers(2, 6)), rng)
        assert put_winners_via_ilp(p, "rp", solver_command) == put_rp(p).winners == brute_rp(p)
        assert put_winners_via_ilp(p, "stv", solver_command) == put_stv(p).winners == brute_stv(p)


# -- induced weight ----------------------------------------------------------

LOCKED_EXAMPLE = {(D, A): 1, (D, C): 3, (C, A): 3, (C, B): 1, (B, A): 1}


def test_induced_weight_example():
    assert induced_weight(LOCKED_EXAMPLE, D, A) == 3
    assert induced_weight({(A, B): 5}, A, B) == 5
    assert induced_weight(LOCKED_EXAMPLE, A, D) == NO_PATH
    with pytest.raises(ValueError):
        induced_weight(LOCKED_EXAMPLE, A, A)


def path_oracle(graph, a, b, m):
    best = -math.inf
    for r in range(m - 1):
        for mid in itertools.permutations([v for v in range(m) if v not in (a, b)], r):
            path = (a, *mid, b)
            hops = list(zip(path, path[1:]))
            if all(h in graph for h in hops):
                best = max(best, min(graph[h] for h in hops))
    return best


@st.composite
def weighted_digraphs(draw):
    m = draw(st.integers(2, 6))
    pairs = list(itertools.permutations(range(m), 2))
    edges = draw(st.sets(st.sampled_from(pairs)))
    return m, {e: draw(st.integers(-3, 9)) for e in sorted(edges)}


@given(weighted_digraphs())
def test_induced_weight_matches_paths(arg):
    m, graph = arg
    closure = induced_weights(graph)
    for a, b in itertools.permutations(range(m), 2):
        expect = path_oracle(graph, a, b, m)
        assert closure.get((a, b), NO_PATH) == expect
        if (a, b) in graph:
            assert expect >= graph[(a, b)]
