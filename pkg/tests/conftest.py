import pytest

from util import corpus_graphs


@pytest.fixture(scope="session")
def corpus():
    return corpus_graphs()


@pytest.fixture(scope="session")
def o2(corpus):
    return corpus["O2"]


@pytest.fixture(scope="session")
def g2(corpus):
    return corpus["G2"]


@pytest.fixture(scope="session")
def c3(corpus):
    return corpus["C3"]
