import pytest

_acceptance: dict[str, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if item.module.__name__.rsplit(".", 1)[-1] != "test_acceptance":
        return
    label = (item.function.__doc__ or item.name).strip().splitlines()[0]
    prev = _acceptance.get(item.nodeid, ("PASS", label))[0]
    if report.failed or prev == "FAIL":
        _acceptance[item.nodeid] = ("FAIL", label)
    elif report.when == "call":
        _acceptance[item.nodeid] = ("SKIP" if report.skipped else "PASS", label)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for status, label in sorted(_acceptance.values(), key=lambda t: t[1]):
        terminalreporter.write_line(f"{status}  {label}")
