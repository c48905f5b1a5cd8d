import random
from fractions import Fraction

import pytest

from switchfts import worked_example
from switchfts.linalg import Matrix
from switchfts.synthesis import GainSet
from switchfts.system import SwitchedSystem

F = Fraction


@pytest.fixture
def worked():
    return worked_example()


@pytest.fixture
def printed_md_gains():
    return GainSet.mode_dependent([Matrix([[0, -1, F(-1, 2)]]), Matrix([[0, -1, F(1, 2)]])])


@pytest.fixture
def printed_mi_gain():
    return GainSet.common(Matrix([[0, -1, 0]]))


@pytest.fixture
def printed_P():
    return Matrix([[1, 2, 1], [1, 1, 1], [0, 0, 1]])


def random_system(rng: random.Random, max_n=3, max_M=2, max_m=2) -> SwitchedSystem:
    """Small system with entries in {-1, 0, 1}."""
    n = rng.randint(1, max_n)
    M = rng.randint(1, max_M)
    m = rng.randint(0, min(max_m, n))
    ent = lambda: rng.choice((-1, 0, 1))  # noqa: E731
    A = [Matrix([[ent() for _ in range(n)] for _ in range(n)]) for _ in range(M)]
    B = [Matrix([[ent() for _ in range(m)] for _ in range(n)], ncols=m) for _ in range(M)]
    return SwitchedSystem(tuple(A), tuple(B))


def random_corpus(count: int, seed: int):
    rng = random.Random(seed)
    return [random_system(rng) for _ in range(count)]


# Acceptance reporting: one PASS/FAIL line per criterion in the terminal summary.

_acceptance = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None and rep.when == "call":
        _acceptance.append((marker.args[0], rep.outcome.upper()))
    elif marker is not None and rep.when == "setup" and rep.outcome != "passed":
        _acceptance.append((marker.args[0], rep.outcome.upper()))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        label = "PASS" if outcome == "PASSED" else "FAIL"
        terminalreporter.write_line(f"{label}  {name}")
