import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from mereo.core import System, part_from_assignment
from mereo.fixtures import empty, load_fixture, s3

settings.register_profile("default", max_examples=150, deadline=None)
settings.load_profile("default")


@pytest.fixture
def S3():
    return s3()


@pytest.fixture
def E():
    return empty()


@pytest.fixture(scope="session")
def bicycle():
    return load_fixture("bicycle")


@pytest.fixture(scope="session")
def thermal():
    return load_fixture("thermal")


@pytest.fixture(scope="session")
def lv():
    return load_fixture("lotka_volterra")


def bare_system(n, name="S"):
    return System(name, ("id",), [(i,) for i in range(n)])


@st.composite
def systems_with_parts(draw, max_size=6, min_size=0, num_parts=2):
    """A bare system and ``num_parts`` random parts of it."""
    n = draw(st.integers(min_size, max_size))
    system = bare_system(n)
    parts = []
    for j in range(num_parts):
        labels = draw(st.lists(st.integers(0, max(n - 1, 0)), min_size=n, max_size=n))
        parts.append(part_from_assignment(system, f"P{j}", labels))
    return system, parts


@st.composite
def bits_for(draw, k):
    return np.array(draw(st.lists(st.booleans(), min_size=k, max_size=k)), dtype=bool)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.LINES:
        terminalreporter.write_line(line)
