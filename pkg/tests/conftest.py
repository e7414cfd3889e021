import pytest

from sparsepalette import new_graph


@pytest.fixture
def k3():
    return new_graph(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def path3():
    return new_graph(3, [(0, 1), (1, 2)])
