import random
import time
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from octclose.bounds import NumericMode
from octclose.dbm import DiffConstraint, OctConstraint, bar

settings.register_profile(
    "octclose",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("octclose")

RAT, INT, F64 = NumericMode.RAT, NumericMode.INT, NumericMode.F64

# Worked-example fixtures shared by several modules.
WORKED_SYSTEM_TEXT = """vars 2
x0 <= 3
x1 <= 2
x0 + x1 <= 6
-x0 - x1 <= 5
-x0 <= 3
"""
WORKED_SYSTEM = [
    OctConstraint.unary(1, 0, 3),
    OctConstraint.unary(1, 1, 2),
    OctConstraint.binary(1, 0, 1, 1, 6),
    OctConstraint.binary(-1, 0, -1, 1, 5),
    OctConstraint.unary(-1, 0, 3),
]
INF = float("inf")
WORKED_UPPER = [[INF, 6, INF, 6], [6, INF, 5, INF], [INF, 6, INF, 4], [5, INF, INF, INF]]
WORKED_SHORTEST = [[11, 6, 11, 6], [6, 11, 5, 9], [9, 6, 11, 4], [5, 11, 16, 11]]
WORKED_CLOSED = [[0, 6, 11, 6], [6, 0, 5, 9], [9, 6, 0, 4], [5, 11, 16, 0]]
# Strengthening lowers (2,0) and (1,3) to 5 (and their mirrors (0,3), (2,1))
# because x0 + x1 <= 3 + 2 is entailed by the two unary bounds.
WORKED_STRONG = [[0, 6, 11, 5], [6, 0, 5, 5], [5, 5, 0, 4], [5, 11, 16, 0]]

RUNNING_M = [[0, 14, 7, 7], [INF, 0, INF, INF], [INF, 7, 0, 0], [INF, 7, INF, 0]]
RUNNING_RESULT = [[0, 0, 0, 0], [INF, 0, INF, INF], [INF, 0, 0, 0], [INF, 0, INF, 0]]
RUNNING_O = DiffConstraint(0, 2, 0)


# ---------------------------------------------------------------- strategies

def constants(mode, lo, hi):
    ints = st.integers(lo, hi)
    if mode is RAT:
        # halves and quarters exercise exact rational halving
        return st.one_of(ints, st.builds(lambda k, q: Fraction(k, q), st.integers(4 * lo, 4 * hi), st.sampled_from([2, 4])))
    return ints


@st.composite
def oct_constraints(draw, n, mode=RAT, lo=-8, hi=8):
    d = draw(constants(mode, lo, hi))
    s1 = draw(st.sampled_from((1, -1)))
    i = draw(st.integers(0, n - 1))
    if n == 1 or draw(st.booleans()):
        return OctConstraint.unary(s1, i, d)
    j = draw(st.integers(0, n - 1).filter(lambda j: j != i))
    return OctConstraint.binary(s1, i, draw(st.sampled_from((1, -1))), j, d)


@st.composite
def systems(draw, mode=RAT, max_n=4, satisfiable=True):
    """``(n, constraints)``; satisfiable systems keep every constant >= 0 (origin is a model)."""
    n = draw(st.integers(1, max_n))
    lo = 0 if satisfiable else -8
    cs = draw(st.lists(oct_constraints(n, mode, lo, 8), min_size=0, max_size=3 * n))
    return n, cs


@st.composite
def system_and_extra(draw, mode=RAT, max_n=4):
    n, cs = draw(systems(mode, max_n))
    return n, cs, draw(oct_constraints(n, mode))


@st.composite
def diff_constraints(draw, n, mode=RAT):
    dim = 2 * n
    a = draw(st.integers(0, dim - 1))
    b = draw(st.integers(0, dim - 1).filter(lambda b: b != a))
    d = draw(constants(mode, -8, 8))
    if b == bar(a):
        d = d + d
    return DiffConstraint(a, b, d)


def rng_for(*key) -> random.Random:
    return random.Random(":".join(map(str, ("tests",) + key)))


# ------------------------------------------------------ acceptance reporting

ACCEPTANCE: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title, tolerance): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    num, title, tolerance = marker.args
    entry = ACCEPTANCE.setdefault(num, {"title": title, "tolerance": tolerance, "passed": True, "seconds": 0.0})
    entry["passed"] = entry["passed"] and report.passed
    entry["seconds"] += report.duration


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        e = ACCEPTANCE[num]
        verdict = "PASS" if e["passed"] else "FAIL"
        terminalreporter.write_line(
            f"[{verdict}] criterion {num:2d}: {e['title']} ({e['tolerance']}; {e['seconds']:.2f}s)"
        )


@pytest.fixture
def stopwatch():
    start = time.perf_counter()
    return lambda: time.perf_counter() - start
