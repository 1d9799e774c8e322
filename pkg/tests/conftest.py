import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

import support  # noqa: E402


def pytest_terminal_summary(terminalreporter):
    if support.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in support.RESULTS:
            terminalreporter.write_line(line)
