import pytest

from refmr.fixtures import load_fixture

_criteria: dict[int, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    failed = report.failed
    if report.when == "call" or failed:
        previous = _criteria.get(number, (title, "PASS"))[1]
        status = "FAIL" if failed or previous == "FAIL" else "PASS"
        _criteria[number] = (title, status)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, status = _criteria[number]
        terminalreporter.write_line(f"[{status}] {number:2d}. {title}")


@pytest.fixture(scope="session")
def sample01():
    return load_fixture("sample01", "sample01_oracle")


@pytest.fixture(scope="session")
def entities30():
    return load_fixture("entities30")


@pytest.fixture(scope="session")
def decay_episodes():
    return load_fixture("decay_episodes")
