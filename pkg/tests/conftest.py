"""Shared pytest plumbing: the acceptance-criterion report.

Acceptance tests record one line per criterion through the `record`
fixture; the terminal-summary hook replays them after the run so the
pass/fail ledger is visible without -s.
"""

import pytest

_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def record():
    """Append a criterion line to the summary, then assert it passed."""

    def _record(num, title, ok, detail):
        status = "PASS" if ok else "FAIL"
        line = f"criterion {num:02d} {status}  {title}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        assert ok, line

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_ACCEPTANCE_LINES):
        terminalreporter.line(line)
