import numpy as np
import pytest

from curvedist import PolygonalCurve

# results of tests marked ``criterion``: {criterion id: [(part, passed)]}
_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(cid, title): acceptance criterion check")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    cid, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _CRITERIA.setdefault(cid, []).append((title, rep.passed))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for cid in sorted(_CRITERIA, key=lambda c: int(c)):
        parts = _CRITERIA[cid]
        ok = all(p for _, p in parts)
        tr.write_line(f"criterion {cid:>2}: {'PASS' if ok else 'FAIL'}")
        for title, passed in parts:
            tr.write_line(f"    {'pass' if passed else 'FAIL'}  {title}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_walk(rng, n, dtype=np.float64, dim=2):
    steps = rng.integers(-1, 2, size=(n - 1, dim))
    pts = np.zeros((n, dim))
    pts[1:] = np.cumsum(steps, axis=0)
    return PolygonalCurve(pts, dtype=dtype)


def random_cloud(rng, n, dtype=np.float64, dim=2, scale=10.0):
    return PolygonalCurve(rng.normal(scale=scale, size=(n, dim)), dtype=dtype)
