import os
import sys

ACCEPTANCE = {}


def record(n, ok, detail=""):
    """Store one acceptance verdict; printed in the terminal summary and to stdout."""
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[n] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])


sys.path.insert(0, os.path.dirname(__file__))
