"""Integer-program formulations of PUT-winner membership.

Each query asks whether one candidate can win: the model is a pure
feasibility problem over binary (and a few bounded integer) variables,
written out in CPLEX LP text format and handed to an external solver
process.

RP: path indicators ``X_i_j_t`` (an i->j path of locked edges from tiers
1..t) and ``Y_i_j_k_t`` (such an i->k path through j).  A locked edge counts
as a path.  "Edges of tiers up to t" is read as the union of tiers 1..t.

STV: ``e_c_t`` (c eliminated in round t), ``b_v_c_t`` (ballot group v counts
for c in round t) and integer scores ``s_c_t``; a big-M constraint makes the
eliminated alternative's score minimal among those still standing.
"""
from __future__ import annotations

import enum
import itertools
import math
import os
import shlex
import subprocess
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping

from .profiles import Profile, nonneg_tiers, wmg

SOLVER_ENV = "PUTWIN_ILP_SOLVER"
MAX_NAME = 64
NO_PATH = -math.inf


@dataclass
class Constraint:
    name: str
    coeffs: dict[str, int]
    sense: str
    rhs: int


@dataclass
class IlpModel:
    name: str = "model"
    variables: dict[str, tuple[str, int, int]] = field(default_factory=dict)
    constraints: list[Constraint] = field(default_factory=list)

    def binary(self, name: str) -> str:
        return self._declare(name, "B", 0, 1)

    def integer(self, name: str, lb: int, ub: int) -> str:
        return self._declare(name, "I", lb, ub)

    def _declare(self, name, kind, lb, ub):
        if name in self.variables:
            raise ValueError(f"duplicate variable {name}")
        self.variables[name] = (kind, lb, ub)
        return name

    def add(self, name: str, terms, sense: str, rhs: int) -> None:
        """``terms`` is an iterable of (coefficient, variable); repeats are summed."""
        if sense not in ("<=", ">=", "="):
            raise ValueError(f"bad sense {sense!r}")
        coeffs: dict[str, int] = {}
        for a, var in terms:
            if var not in self.variables:
                raise ValueError(f"constraint {name} uses undeclared variable {var}")
            coeffs[var] = coeffs.get(var, 0) + int(a)
        coeffs = {v: a for v, a in coeffs.items() if a}
        self.constraints.append(Constraint(name, coeffs, sense, int(rhs)))

    def validate(self) -> None:
        seen = set()
        for c in self.constraints:
            if c.name in seen:
                raise ValueError(f"duplicate constraint name {c.name}")
            seen.add(c.name)
            for v in c.coeffs:
                if v not in self.variables:
                    raise ValueError(f"constraint {c.name} uses undeclared variable {v}")
        if seen & set(self.variables):
            raise ValueError("constraint and variable names overlap")


# -- LP text format ----------------------------------------------------------

def _short_names(names) -> dict[str, str]:
    out, taken = {}, set()
    for name in names:
        short = name[:MAX_NAME]
        if short in taken:
            raise ValueError(f"name collision after truncation: {short}")
        taken.add(short)
        out[name] = short
    return out


def _expr(coeffs: dict[str, int], names: dict[str, str]) -> str:
    parts = []
    for var, a in coeffs.items():
        sign = "-" if a < 0 else "+"
        mag = "" if abs(a) == 1 else f"{abs(a)} "
        parts.append(f"{sign} {mag}{names[var]}")
    return " ".join(parts)


def serialize_model(model: IlpModel) -> str:
    model.validate()
    vnames = _short_names(model.variables)
    cnames = _short_names(c.name for c in model.constraints)
    lines = [f"\\ {model.name}", "\\ feasibility problem: constant objective", "Minimize", " obj:", "Subject To"]
    for c in model.constraints:
        lhs = _expr(c.coeffs, vnames) if c.coeffs else "0 " + next(iter(vnames.values()), "x")
        lines.append(f" {cnames[c.name]}: {lhs} {c.sense} {c.rhs}")
    lines.append("Bounds")
    for v, (kind, lb, ub) in model.variables.items():
        if kind == "I":
            lines.append(f" {lb} <= {vnames[v]} <= {ub}")
    general = [vnames[v] for v, (kind, *_) in model.variables.items() if kind == "I"]
    binary = [vnames[v] for v, (kind, *_) in model.variables.items() if kind == "B"]
    if general:
        lines.append("General")
        lines += [f" {v}" for v in general]
    lines.append("Binary")
    lines += [f" {v}" for v in binary]
    lines.append("End")
    return "\n".join(lines) + "\n"


# -- RP ----------------------------------------------------------------------

def _X(i, j, t):
    return f"X_{i}_{j}_{t}"


def _Y(i, j, k, t):
    return f"Y_{i}_{j}_{k}_{t}"


def build_rp_ilp(profile: Profile, candidate: int) -> IlpModel:
    m = profile.m
    if m < 2:
        raise ValueError("RP model needs m >= 2")
    tiers = nonneg_tiers(wmg(profile))
    K = len(tiers)
    tier_of = {e: t for t, tier in enumerate(tiers, 1) for e in tier}
    model = IlpModel(f"put_rp_m{m}_cand{candidate}")
    pairs = list(itertools.permutations(range(m), 2))
    triples = list(itertools.permutations(range(m), 3))
    T = range(1, K + 1)
    for t in T:
        for i, j in pairs:
            model.binary(_X(i, j, t))
    for t in T:
        for i, j, k in triples:
            model.binary(_Y(i, j, k, t))

    for t in T:
        for i, j, k in triples:
            y, xij, xjk = _Y(i, j, k, t), _X(i, j, t), _X(j, k, t)
            model.add(f"ylo_{i}_{j}_{k}_{t}", [(1, y), (-1, xij), (-1, xjk)], ">=", -1)
            model.add(f"yhi_{i}_{j}_{k}_{t}", [(2, y), (-1, xij), (-1, xjk)], "<=", 0)
            model.add(f"via_{i}_{j}_{k}_{t}", [(1, _X(i, k, t)), (-1, y)], ">=", 0)
    for t in T:
        for i, k in pairs:
            x, xK = _X(i, k, t), _X(i, k, K)
            direct = tier_of.get((i, k), K + 1) <= t
            if direct and t < K:
                model.add(f"edge_{i}_{k}_{t}", [(1, x), (-1, xK)], ">=", 0)
            ys = [(-1, _Y(i, j, k, t)) for j in range(m) if j not in (i, k)]
            if not direct:
                model.add(f"path_{i}_{k}_{t}", [(1, x)] + ys, "<=", 0)
            elif t < K:
                model.add(f"path_{i}_{k}_{t}", [(1, x), (-1, xK)] + ys, "<=", 0)
    # a pair ranked i over j needs an i->j path through edges at least as
    # heavy as the reverse edge (j, i)
    for (j, i), t in tier_of.items():
        if t < K:
            model.add(f"heavy_{i}_{j}_{t}", [(1, _X(i, j, t)), (-1, _X(i, j, K))], ">=", 0)
    for i, j in itertools.combinations(range(m), 2):
        model.add(f"asym_{i}_{j}", [(1, _X(i, j, K)), (1, _X(j, i, K))], "=", 1)
    for i, j, k in triples:
        model.add(f"trans_{i}_{j}_{k}", [(1, _X(i, j, K)), (1, _X(j, k, K)), (-1, _X(i, k, K))], "<=", 1)
    for t in range(1, K):
        for i, j in pairs:
            model.add(f"mono_{i}_{j}_{t}", [(1, _X(i, j, t)), (-1, _X(i, j, t + 1))], "<=", 0)
    model.add("winner", [(1, _X(j, candidate, K)) for j in range(m) if j != candidate], "=", 0)
    return model


# -- STV ---------------------------------------------------------------------

def build_stv_ilp(profile: Profile, candidate: int) -> IlpModel:
    m, n = profile.m, profile.n
    big_m = n + 1
    groups = [(b.ranking, b.count) for b in profile.merged().ballots]
    rounds = range(1, m)
    model = IlpModel(f"put_stv_m{m}_cand{candidate}")
    for t in rounds:
        for c in range(m):
            model.binary(f"e_{c}_{t}")
    for t in rounds:
        for c in range(m):
            model.integer(f"s_{c}_{t}", 0, n)
    for t in rounds:
        for v, (ranking, _) in enumerate(groups):
            for c in ranking:
                model.binary(f"b_{v}_{c}_{t}")

    def gone(c, t):
        """Terms summing to 1 iff c was eliminated before round t."""
        return [(1, f"e_{c}_{r}") for r in range(1, t)]

    for t in rounds:
        model.add(f"one_{t}", [(1, f"e_{c}_{t}") for c in range(m)], "=", 1)
    if m > 1:
        for c in range(m):
            model.add(f"once_{c}", [(1, f"e_{c}_{t}") for t in rounds], "<=", 1)
        model.add("winner", [(1, f"e_{candidate}_{t}") for t in rounds], "=", 0)
    for t in rounds:
        for v, (ranking, count) in enumerate(groups):
            for pos, c in enumerate(ranking):
                b = f"b_{v}_{c}_{t}"
                above = ranking[:pos]
                model.add(f"balive_{v}_{c}_{t}", [(1, b)] + gone(c, t), "<=", 1)
                for d in above:
                    model.add(f"babove_{v}_{c}_{d}_{t}", [(1, b)] + [(-a, x) for a, x in gone(d, t)], "<=", 0)
                lower = [(1, b)] + gone(c, t) + [(-a, x) for d in above for a, x in gone(d, t)]
                model.add(f"btop_{v}_{c}_{t}", lower, ">=", 1 - len(above))
        for c in range(m):
            terms = [(1, f"s_{c}_{t}")]
            terms += [(-count, f"b_{v}_{c}_{t}") for v, (ranking, count) in enumerate(groups) if c in ranking]
            model.add(f"score_{c}_{t}", terms, "=", 0)
        for c, d in itertools.permutations(range(m), 2):
            terms = [(1, f"s_{c}_{t}"), (-1, f"s_{d}_{t}"), (big_m, f"e_{c}_{t}")]
            terms += [(-big_m * a, x) for a, x in gone(d, t)]
            model.add(f"low_{c}_{d}_{t}", terms, "<=", big_m)
    return model


# -- solver adapter ----------------------------------------------------------

class Status(str, enum.Enum):
    FEASIBLE = "FEASIBLE"
    INFEASIBLE = "INFEASIBLE"
    UNAVAILABLE = "UNAVAILABLE"


class SolverError(RuntimeError):
    pass


class SolverUnavailable(RuntimeError):
    pass


def default_solver_command() -> str | None:
    return os.environ.get(SOLVER_ENV) or None


def solve_feasibility(model: IlpModel, solver_command: str | None = None, timeout: float | None = None) -> Status:
    """Run ``solver_command <model.lp>`` and read the status it prints.

    The command must print a line containing "Optimal"/"Feasible" or
    "Infeasible" and exit 0.
    """
    solver_command = solver_command or default_solver_command()
    if not solver_command:
        return Status.UNAVAILABLE
    if not model.variables:
        return Status.FEASIBLE if all(_const_ok(c) for c in model.constraints) else Status.INFEASIBLE
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "model.lp")
        with open(path, "w") as fh:
            fh.write(serialize_model(model))
        try:
            proc = subprocess.run(shlex.split(solver_command) + [path], capture_output=True,
                                  text=True, timeout=timeout)
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise SolverError(f"could not run solver: {exc}") from exc
    if proc.returncode != 0:
        raise SolverError(f"solver exited with {proc.returncode}: {proc.stderr.strip()[:500]}")
    for line in proc.stdout.splitlines():
        low = line.lower()
        if "infeasible" in low:
            return Status.INFEASIBLE
        if "optimal" in low or "feasible" in low:
            return Status.FEASIBLE
    raise SolverError(f"unrecognised solver output: {proc.stdout.strip()[:500]!r}")


def _const_ok(c: Constraint) -> bool:
    return {"<=": 0 <= c.rhs, ">=": 0 >= c.rhs, "=": c.rhs == 0}[c.sense]


def put_winners_via_ilp(profile: Profile, rule: str, solver_command: str | None = None,
                        workers: int = 1) -> frozenset[int]:
    build = {"stv": build_stv_ilp, "rp": build_rp_ilp}[rule.lower()]
    if profile.m == 1:
        return frozenset([0])

    def query(c):
        return c, solve_feasibility(build(profile, c), solver_command)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(query, range(profile.m)))
    if any(s is Status.UNAVAILABLE for _, s in results):
        raise SolverUnavailable(f"no ILP solver configured (set {SOLVER_ENV})")
    return frozenset(c for c, s in results if s is Status.FEASIBLE)


# -- induced weight ----------------------------------------------------------

def induced_weight(graph: Mapping[tuple[int, int], int], a: int, b: int) -> float:
    """Largest bottleneck (minimum edge weight) over all a->b paths; NO_PATH if none."""
    if a == b:
        raise ValueError("a and b must differ")
    return induced_weights(graph).get((a, b), NO_PATH)


def induced_weights(graph: Mapping[tuple[int, int], int]) -> dict[tuple[int, int], float]:
    """All-pairs bottleneck closure (Floyd-Warshall with max/min)."""
    verts = sorted({v for e in graph for v in e})
    best = {(u, v): NO_PATH for u in verts for v in verts}
    for e, w in graph.items():
        best[e] = max(best[e], w)
    for k in verts:
        for i in verts:
            ik = best[(i, k)]
            if ik == NO_PATH:
                continue
            for j in verts:
                via = min(ik, best[(k, j)])
                if via > best[(i, j)]:
                    best[(i, j)] = via
    return {e: w for e, w in best.items() if e[0] != e[1]}
