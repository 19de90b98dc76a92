import sys
from collections import defaultdict
from pathlib import Path


sys.path.insert(0, str(Path(__file__).parent))

_criterion_of: dict[str, tuple[int, str]] = {}
_outcomes: dict[int, list[str]] = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by the test")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            _criterion_of[item.nodeid] = (mark.args[0], mark.args[1])


def pytest_runtest_logreport(report):
    if report.nodeid not in _criterion_of:
        return
    if report.when == "call" or report.outcome != "passed":
        _outcomes[_criterion_of[report.nodeid][0]].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criterion_of:
        return
    titles = {n: title for n, title in _criterion_of.values()}
    terminalreporter.section("acceptance criteria")
    for n in sorted(titles):
        results = _outcomes.get(n, [])
        ok = bool(results) and all(r == "passed" for r in results)
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {titles[n]}")
