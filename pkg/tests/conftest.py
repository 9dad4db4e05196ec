import pytest
from hypothesis import settings

from logeo.algebra import menu_algebra
from logeo.signature import VarSort

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def z4():
    return menu_algebra("z4")


@pytest.fixture
def z2xz4():
    return menu_algebra("z2xz4")


@pytest.fixture
def X():
    return VarSort.parse("x")


@pytest.fixture
def XY():
    return VarSort.parse("x,y")


_ACCEPTANCE: dict[int, tuple[str, str, float, float]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    num, limit, title = mark.kwargs["criterion"], mark.kwargs["limit"], mark.kwargs["title"]
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        verdict = "PASS" if rep.passed else "FAIL"
        _ACCEPTANCE[num] = (title, verdict, rep.duration, limit)
        print(f"\nACCEPTANCE {num:>2} {verdict} {rep.duration:6.2f}s (limit {limit:g}s) {title}")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_ACCEPTANCE):
        title, verdict, dur, limit = _ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:>2}: {verdict}  {dur:6.2f}s / {limit:g}s  {title}")
