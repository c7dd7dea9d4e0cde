import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from hyperpart import Hypergraph  # noqa: E402

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")

# the small running example: nets {0,1}, {0,1,2}, {2,3}
H0_NETS = [[0, 1], [0, 1, 2], [2, 3]]


@pytest.fixture
def h0():
    return Hypergraph.build(4, H0_NETS)


@st.composite
def hypergraphs(draw, max_n=24, max_m=32, max_size=6, weighted=True, min_n=2):
    n = draw(st.integers(min_n, max_n))
    m = draw(st.integers(0, max_m))
    nets = []
    for _ in range(m):
        s = draw(st.integers(1, min(n, max_size)))
        nets.append(draw(st.lists(st.integers(0, n - 1), min_size=s, max_size=s, unique=True)))
    if weighted:
        nw = draw(st.lists(st.integers(1, 5), min_size=m, max_size=m))
        vw = draw(st.lists(st.integers(1, 4), min_size=n, max_size=n))
    else:
        nw, vw = [1] * m, [1] * n
    return Hypergraph.build(n, nets, np.asarray(nw, float), np.asarray(vw, float))


def random_hypergraph(rng, n, m, max_size=6, weighted=True):
    nets = [sorted(rng.choice(n, size=int(rng.integers(1, min(n, max_size) + 1)), replace=False).tolist()) for _ in range(m)]
    if weighted:
        return Hypergraph.build(n, nets, rng.integers(1, 6, m).astype(float), rng.integers(1, 4, n).astype(float))
    return Hypergraph.build(n, nets)


def random_assignment(rng, n, k):
    """Random assignment with every block nonempty."""
    a = np.arange(n) % k
    rng.shuffle(a)
    return a


# acceptance criteria report: one line per test marked ``criterion``
_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    prev = _CRITERIA.get(number, (title, "PASS", 0.0))
    status = prev[1]
    if rep.failed:
        status = "FAIL"
    elif rep.skipped and status == "PASS":
        status = "SKIP"
    _CRITERIA[number] = (title, status, prev[2] + rep.duration)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, status, secs = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:>2} {status}  {title}  ({secs:.1f} s)")
