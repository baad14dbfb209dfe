import csv
import io
import json

import pytest
from hypothesis import given, strategies as st

from putwin.metrics import (
    ALPHAS, BENCH_SCHEMA, ROW_FIELDS, BenchReport, SolverConfig, alpha_discovery, box_stats,
    is_hard_profile, run_bench, write_report,
)
from putwin.profiles import Ballot, Profile, impartial_culture
from putwin.trace import Budget, DiscoveryTrace

SYM2 = Profile(2, (Ballot((0, 1)), Ballot((1, 0))))
UNANIMOUS = Profile(3, (Ballot((2, 0, 1), 4),))


def two_winner_trace():
    return DiscoveryTrace(events=[(1.0, 0), (3.0, 1)], total_runtime=4.0)


def test_alpha_examples():
    t = two_winner_trace()
    assert alpha_discovery(t, 2, 0.5) == 1.0
    assert alpha_discovery(t, 2, 0.6) == 3.0
    assert alpha_discovery(t, 2, 1.0) == 3.0
    assert alpha_discovery(t, 2, 0.1) == 1.0


def test_alpha_single_winner():
    t = DiscoveryTrace(events=[(0.25, 3)], total_runtime=1.0)
    assert {alpha_discovery(t, 1, a) for a in ALPHAS} == {0.25}


def test_alpha_errors():
    t = two_winner_trace()
    for bad in (0.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            alpha_discovery(t, 2, bad)
    with pytest.raises(ValueError):
        alpha_discovery(DiscoveryTrace(), 0, 0.5)
    with pytest.raises(ValueError):
        alpha_discovery(t, 3, 0.5)


def test_alpha_exact_tenths():
    t = DiscoveryTrace(events=[(float(i), i) for i in range(10)], total_runtime=10.0)
    # 0.3 * 10 is 3.0000000000000004 in floating point; the third event is wanted
    assert alpha_discovery(t, 10, 0.3) == 2.0
    assert [alpha_discovery(t, 10, a) for a in ALPHAS] == [float(i) for i in range(10)]


@given(st.lists(st.floats(0, 100), min_size=1, max_size=12),
       st.lists(st.floats(0.01, 1.0), min_size=2, max_size=6))
def test_alpha_monotone(times, alphas):
    times = sorted(times)
    t = DiscoveryTrace(events=[(x, i) for i, x in enumerate(times)], total_runtime=times[-1])
    vals = [alpha_discovery(t, len(times), a) for a in sorted(alphas)]
    assert vals == sorted(vals)
    assert vals[-1] <= t.total_runtime


def test_hardness_examples():
    assert is_hard_profile(SYM2, "stv")
    assert not is_hard_profile(Profile(2, (Ballot((1, 0), 3),)), "stv")
    assert not is_hard_profile(UNANIMOUS, "rp")
    # with three alternatives the two never ranked first tie at zero
    assert is_hard_profile(UNANIMOUS, "stv")
    with pytest.raises(ValueError):
        is_hard_profile(SYM2, "borda")


def test_rp_hardness_fraction_strictly_between(rng):
    seen = set()
    for _ in range(1000):
        seen.add(is_hard_profile(impartial_culture(10, 10, rng), "rp", Budget(time_limit=60)))
        if seen == {True, False}:
            break
    assert seen == {True, False}


def test_empty_report():
    report = run_bench([], [SolverConfig("stv")])
    rows = list(csv.reader(io.StringIO(report.to_csv())))
    assert rows == [ROW_FIELDS]
    assert report.summary() == {"schema": BENCH_SCHEMA, "configs": {}}


def test_histogram_accounting(rng):
    corpus = [impartial_culture(6, 6, rng) for _ in range(25)]
    configs = [SolverConfig("stv"), SolverConfig("stv", pruning=False, caching=False)]
    report = run_bench(corpus, configs)
    assert len(report.rows) == 50
    summary = report.summary()
    assert set(summary["configs"]) == {"stv-uniform", "stv-uniform-noprune-nocache"}
    for entry in summary["configs"].values():
        assert sum(entry["winner_histogram"].values()) == 25
        assert sum(b["count"] for b in entry["runtime_by_winners"].values()) == 25
    # identical winners across configurations, row by row
    by_pid = {}
    for r in report.rows:
        by_pid.setdefault(r["profile_id"], set()).add(r["winners"])
    assert all(len(v) == 1 for v in by_pid.values())


def test_rows_discovery_bounded(rng):
    corpus = [impartial_culture(5, 5, rng) for _ in range(10)]
    report = run_bench(corpus, [SolverConfig("rp", "lp"), SolverConfig("rp", "none", use_scc=False)])
    for r in report.rows:
        assert r["complete"]
        assert r["discovery_100"] <= r["runtime"]
        alphas = [r[f"alpha_{a:.1f}"] for a in ALPHAS]
        assert alphas == sorted(alphas)


def test_reproducible_counters():
    corpus = [impartial_culture(6, 6, seed=s) for s in range(5)]
    cfg = [SolverConfig("rp", "lpout")]
    strip = ("runtime", "discovery_100", *[f"alpha_{a:.1f}" for a in ALPHAS])

    def exact(report):
        return [{k: v for k, v in r.items() if k not in strip} for r in report.rows]

    assert exact(run_bench(corpus, cfg)) == exact(run_bench(corpus, cfg))


def test_timeout_rows_excluded_from_means():
    p = impartial_culture(9, 9, seed=5)
    report = run_bench([p, SYM2], [SolverConfig("stv")], Budget(max_states=20))
    first, second = report.rows
    assert not first["complete"] and first["alpha_0.5"] == ""
    assert second["complete"]
    entry = report.summary()["configs"]["stv-uniform"]
    assert entry["timeouts"] == 1 and entry["profiles"] == 2


def test_parallel_matches_serial(rng):
    corpus = [(f"x{i}", impartial_culture(5, 5, rng)) for i in range(6)]
    cfg = [SolverConfig("rp")]
    serial = run_bench(corpus, cfg)
    parallel = run_bench(corpus, cfg, workers=2)
    assert [r["winners"] for r in serial.rows] == [r["winners"] for r in parallel.rows]
    assert [r["states_explored"] for r in serial.rows] == [r["states_explored"] for r in parallel.rows]


def test_box_stats():
    s = box_stats([1, 2, 3, 4, 5])
    assert (s["min"], s["q1"], s["median"], s["q3"], s["max"], s["mean"]) == (1, 2, 3, 4, 5, 3)


def test_write_report(tmp_path):
    report = run_bench([SYM2], [SolverConfig("stv")])
    write_report(report, tmp_path / "r.csv", tmp_path / "r.json")
    assert (tmp_path / "r.csv").read_text() == report.to_csv()
    assert json.loads((tmp_path / "r.json").read_text())["schema"] == BENCH_SCHEMA
    assert isinstance(report, BenchReport)
