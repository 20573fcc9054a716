import numpy as np
import pytest

from rasm.mapping import AcTable

# the eight combinations of a four-antenna reference mapping, in bit order
REFERENCE_TABLE = ((1,), (2, 3), (1, 4), (3, 4), (1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4))


@pytest.fixture
def ref_table():
    return AcTable(REFERENCE_TABLE, n_rx=4, b2=1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, printed in the terminal summary
CRITERIA = {}


def record(number, ok, detail):
    CRITERIA[number] = (ok, detail)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        ok, detail = CRITERIA[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
