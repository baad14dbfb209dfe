import os
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings, strategies as st

from putwin.profiles import Ballot, Profile, kind_from_path, parse_preflib

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


@st.composite
def profiles(draw, min_m=1, max_m=5, max_n=6, truncated=False):
    m = draw(st.integers(min_m, max_m))
    rankings = draw(st.lists(st.permutations(range(m)), min_size=1, max_size=max_n))
    ballots = []
    for r in rankings:
        if truncated:
            r = r[: draw(st.integers(1, m))]
        ballots.append(Ballot(tuple(r), draw(st.integers(1, 3))))
    return Profile(m, tuple(ballots))


def load_fixture(name) -> Profile:
    path = FIXTURES / name
    return parse_preflib(path.read_text(), kind_from_path(path))


def fixture_files():
    return sorted(p.name for p in FIXTURES.glob("*.so?"))


def highs_available() -> bool:
    try:
        import highspy  # noqa: F401
    except ImportError:
        return False
    return True


@pytest.fixture
def optional_solver():
    """The configured ILP solver, else the bundled HiGHS adapter when highspy is installed, else None."""
    cmd = os.environ.get("PUTWIN_ILP_SOLVER")
    if cmd:
        return cmd
    if highs_available():
        return f"{sys.executable} -m putwin.highs_solver"
    return None


@pytest.fixture
def solver_command(optional_solver):
    if optional_solver is None:
        pytest.skip("no ILP solver configured")
    return optional_solver


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# one line per acceptance criterion, printed after the run
ACCEPTANCE: dict[int, str] = {}


def record_criterion(number: int, ok: bool, detail: str) -> bool:
    ACCEPTANCE[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(ACCEPTANCE[number])
    return ok


def skip_criterion(number: int, reason: str) -> None:
    ACCEPTANCE[number] = f"criterion {number}: SKIP  {reason}"
    pytest.skip(reason)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
