import pytest

_REPORT = {}


class CriteriaReport:
    """One status line per acceptance criterion, printed in the terminal summary."""

    def record(self, number, title, checks):
        # checks: list of (label, passed)
        ok = all(passed for _, passed in checks)
        lines = [f"[{number}] {'PASS' if ok else 'FAIL'}  {title}"]
        lines += [f"      {'ok ' if passed else 'BAD'} {label}" for label, passed in checks]
        _REPORT[number] = lines
        return ok


@pytest.fixture(scope="session")
def criteria_report():
    return CriteriaReport()


def pytest_terminal_summary(terminalreporter):
    if not _REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_REPORT):
        for line in _REPORT[number]:
            terminalreporter.write_line(line)
