"""Shared pytest hooks: echo the acceptance verdicts after the run."""


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    if not test_acceptance.VERDICTS:
        return
    terminalreporter.section("acceptance verdicts")
    for line in sorted(test_acceptance.VERDICTS):
        terminalreporter.write_line(line)
