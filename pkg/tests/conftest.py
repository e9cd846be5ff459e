import sys


def pytest_terminal_summary(terminalreporter):
    """Echo the acceptance suite's per-criterion lines after the test run,
    where pytest's output capture cannot swallow them."""
    mod = sys.modules.get("tests.test_acceptance") or sys.modules.get("test_acceptance")
    lines = getattr(mod, "CRITERION_LINES", None)
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
