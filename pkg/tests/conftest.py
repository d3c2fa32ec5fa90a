import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_results = {}


def pytest_collection_modifyitems(items):
    for item in items:
        crit = getattr(getattr(item, "function", None), "criterion", None)
        if crit is not None:
            item.user_properties.append(("criterion", crit))


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("criterion")
    if crit is None or (report.when != "call" and report.passed):
        return
    ok = _results.get(crit, True)
    _results[crit] = ok and report.passed


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for (n, text), ok in sorted(_results.items()):
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {text}")
