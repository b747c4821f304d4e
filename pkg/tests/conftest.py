import pytest

from listcolor.graph_core import build_graph
from listcolor.list_model import ListAssignment


@pytest.fixture
def k22():
    return build_graph(2, 2, [(0, 0), (0, 1), (1, 0), (1, 1)])


@pytest.fixture
def k11():
    return build_graph(1, 1, [(0, 0)])


def same_lists(n, lst):
    return ListAssignment(len(lst), tuple(tuple(lst) for _ in range(n)))


def disjoint_lists(n, k):
    return ListAssignment(k, tuple(tuple(range(v * k + 1, v * k + k + 1)) for v in range(n)))
