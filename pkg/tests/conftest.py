import os
import random

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.register_profile("thorough", max_examples=300, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def corner_cuts():
    from cubeflip.complex import corner_cut_triangulations

    return sorted(corner_cut_triangulations(), key=lambda T: T.cells)


@pytest.fixture(scope="session")
def walk_corpus(corner_cuts):
    """Triangulations of the 4-cube reached by short random flip walks."""
    from cubeflip.driver import random_walk

    rng = random.Random(2024)
    out = []
    T = corner_cuts[0]
    for _ in range(12):
        T = random_walk(T, 15, rng).end
        out.append(T)
    return out


# -- acceptance verdicts ---------------------------------------------------------

_VERDICTS: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    detail = dict(item.user_properties).get("detail", "")
    if rep.skipped:
        reason = rep.longrepr[2] if isinstance(rep.longrepr, tuple) else ""
        _VERDICTS[n] = ("SKIP", f"{title}: {reason.removeprefix('Skipped: ')}")
    elif rep.failed:
        _VERDICTS[n] = ("FAIL", f"{title}: {detail or rep.when + ' failed'}")
    elif rep.when == "call":
        _VERDICTS[n] = ("PASS", f"{title}: {detail}" if detail else title)


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_VERDICTS):
        status, text = _VERDICTS[n]
        terminalreporter.write_line(f"criterion {n}: {status}  {text}")
