import random

import pytest
from hypothesis import strategies as st

from predsched.intervals import Interval
from predsched.rng import Xoshiro256

ACCEPTANCE_RESULTS: dict = {}


def random_intervals(rng: random.Random, max_n: int = 12, max_m: int = 20) -> list:
    m = rng.randint(1, max_m)
    n = rng.randint(0, max_n)
    out = set()
    for _ in range(n):
        a = rng.randrange(0, m)
        b = rng.randint(a + 1, m)
        out.add(Interval(a, b))
    return sorted(out)


def random_pair(rng: random.Random, max_union: int = 12, max_m: int = 20):
    """Random (input sequence, prediction) with a shared part and |I u Î| <= max_union."""
    m = rng.randint(1, max_m)
    pool = set()
    for _ in range(max_union):
        a = rng.randrange(0, m)
        pool.add(Interval(a, rng.randint(a + 1, m)))
    pool = sorted(pool)
    actual, predicted = [], []
    for iv in pool:
        roll = rng.random()
        if roll < 0.45:
            actual.append(iv)
            predicted.append(iv)
        elif roll < 0.7:
            actual.append(iv)
        elif roll < 0.95:
            predicted.append(iv)
    rng.shuffle(actual)
    return actual, predicted


@st.composite
def interval_st(draw, max_m=20):
    a = draw(st.integers(0, max_m - 1))
    b = draw(st.integers(a + 1, max_m))
    return Interval(a, b)


def interval_lists(max_size=12, max_m=20):
    return st.lists(interval_st(max_m), max_size=max_size, unique=True)


def write_swf(path, jobs: int, seed: int = 0, horizon: int = 200_000) -> None:
    """Synthetic SWF trace: bursty submissions, heavy-tailed run times and a
    few unusable records (unknown wait or run time)."""
    g = Xoshiro256(seed)
    lines = ["; Synthetic trace for tests", "; MaxJobs: %d" % jobs]
    submit = 0
    for job in range(1, jobs + 1):
        submit += g.randbelow(2 * horizon // jobs + 1)
        wait = g.randbelow(600)
        run = 1 + g.randbelow(60) * (1 + g.randbelow(3) * g.randbelow(40))
        if g.randbelow(200) == 0:
            run = -1
        if g.randbelow(300) == 0:
            wait = -1
        lines.append(f"{job} {submit} {wait} {run} {1 + g.randbelow(64)} -1 -1")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


@pytest.fixture(scope="session")
def small_trace(tmp_path_factory):
    path = tmp_path_factory.mktemp("traces") / "small.swf"
    write_swf(path, 300, seed=1)
    return str(path)


@pytest.fixture
def chain_instance():
    """A = {A1, A2, A3} disjoint, B_i overlaps A_i and A_{i+1}."""
    A = [Interval(0, 2), Interval(3, 5), Interval(6, 8)]
    B = [Interval(1, 4), Interval(4, 7)]
    return A, B


@pytest.fixture
def replacement_example():
    S = {
        1: Interval(0, 1), 2: Interval(0, 2), 3: Interval(1, 3), 4: Interval(1, 4),
        5: Interval(3, 5), 6: Interval(5, 7), 7: Interval(6, 8),
    }
    prediction = [S[i] for i in range(2, 8)]
    sequence = [S[1], S[2], S[3], S[4], S[5], S[7]]
    return S, prediction, sequence


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: (len(k), k)):
        status, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key:>4}: {status:<4} {detail}")
