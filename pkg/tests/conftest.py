"""Shared test configuration.

The acceptance tests register one line each in ACCEPTANCE_LINES; the
terminal-summary hook below prints them after the run so every criterion
shows a single PASS/FAIL line regardless of output capture.
"""

from hypothesis import HealthCheck, settings

ACCEPTANCE_LINES: list[str] = []

settings.register_profile(
    "package",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    max_examples=60,
)
settings.load_profile("package")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
