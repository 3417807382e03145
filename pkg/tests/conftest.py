import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

CORPUS = Path(__file__).resolve().parent.parent / "diagrams"

_outcomes: dict[int, list[tuple[str, bool]]] = {}
_titles: dict[int, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion covered by the test")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m:
            _titles[m.args[0]] = m.args[1]
            _outcomes.setdefault(m.args[0], [])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m and (rep.when == "call" or (rep.when == "setup" and not rep.passed)):
        _outcomes[m.args[0]].append((item.name, rep.passed))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_outcomes):
        runs = _outcomes[n]
        if not runs:
            status = "NOT RUN"
        else:
            status = "PASS" if all(ok for _, ok in runs) else "FAIL"
        failed = [name for name, ok in runs if not ok]
        tail = f" (failed: {', '.join(failed)})" if failed else ""
        terminalreporter.write_line(f"criterion {n}: {status}: {_titles[n]}{tail}")


@pytest.fixture
def corpus():
    from blocktype.parser import load

    def get(stem: str):
        return load(CORPUS / f"{stem}.bdt.json")
    return get
