import pytest

from crncompose import load_builtin, parse_network

EXAMPLE2_TEXT = """
species X Y
inputs X
X -> 2 X ; k=1
X + Y -> 2 Y ; k=1
Y -> 0 ; k=1
"""


@pytest.fixture
def example1():
    return load_builtin("example1")


@pytest.fixture
def example2():
    return load_builtin("example2")


@pytest.fixture
def adder():
    return load_builtin("adder")


@pytest.fixture
def normalizer():
    return load_builtin("normalizer")


def network(text):
    return parse_network(text)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[n])
