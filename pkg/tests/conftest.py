def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running statistical or sweep checks")


def pytest_terminal_summary(terminalreporter):
    from _acceptance_log import LINES
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
