"""Shared pytest wiring.

The acceptance tests register one line apiece in ACCEPTANCE_LINES; the
terminal-summary hook prints the block after the run so the pass/fail
roster is visible even though pytest captures per-test stdout.
"""

ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
