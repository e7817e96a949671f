import numpy as np
import pytest

from dercross import make_fixture

FIXTURES = ("CONJ(SO3)", "CONJ(SU2)", "LIN", "COVER")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=FIXTURES)
def module(request):
    return make_fixture(request.param)


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    lines = test_acceptance.LINES
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(lines):
        terminalreporter.write_line(lines[n])
