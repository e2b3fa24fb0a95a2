from pathlib import Path

import pytest

from choreo.fixtures import get_fixture
from choreo.reader import read_choreography

FIXTURES = Path(__file__).parent / "fixtures"


def load(name: str):
    return read_choreography((FIXTURES / name).read_text(encoding="utf-8"))


@pytest.fixture
def bookseller():
    return load("bookseller.chor")


@pytest.fixture
def budget20():
    return get_fixture("budget20").per_process


@pytest.fixture
def budget5():
    return get_fixture("budget5").per_process
