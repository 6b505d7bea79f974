import pytest

from kwitness.complexes import line_complex
from kwitness.matrix import Matrix
from kwitness.rings import INTEGERS


def Z(rows, ring=INTEGERS):
    return Matrix(ring, rows)


@pytest.fixture
def diag121():
    """n=1 diagonal complex with ranks (1,2,1): d2 = (1,0)^T, d1 = (0,1)."""
    return line_complex(INTEGERS, (1, 2, 1), Z([[1], [0]]), Z([[0, 1]]))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LINES
    except ImportError:
        return
    if LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(LINES):
            terminalreporter.write_line(LINES[k])
