import pytest

from ultraspec.valcore import FieldSpec


@pytest.fixture
def Q2():
    return FieldSpec.padic(2)


@pytest.fixture
def Q3():
    return FieldSpec.padic(3)


@pytest.fixture
def laurent():
    return FieldSpec.equal_char_zero()


@pytest.fixture
def trivial():
    return FieldSpec.trivial()


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
