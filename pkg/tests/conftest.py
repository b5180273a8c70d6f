from pathlib import Path

import pytest

from rhmap.dsl import parse_source

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load(name):
    return parse_source((FIXTURES / name).read_text()).payload


@pytest.fixture(scope="session")
def wedge():
    return load("wedge.alg")


@pytest.fixture(scope="session")
def target():
    return load("y.sul")


@pytest.fixture(scope="session")
def hy():
    return load("hy.alg")


@pytest.fixture(scope="session")
def wedge_model(wedge, target):
    from rhmap.mapspace import mapping_space_model

    return mapping_space_model(wedge, target)


@pytest.fixture(scope="session")
def hy_model(hy, target):
    from rhmap.mapspace import mapping_space_model

    return mapping_space_model(hy, target)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS):
            terminalreporter.write_line(line)
