import numpy as np
import pytest

from dataset import Multigraph
from graph import SparseMatrix


def random_adjacency(rng, n, p=0.3):
    """Binary symmetric 0/1 adjacency with an empty diagonal, as a dense array"""
    upper = np.triu(rng.random((n, n)) < p, k=1)
    return (upper | upper.T).astype(np.float64)


def random_multigraph(rng, n, m, d0=4, p=0.3, num_classes=2):
    views = [SparseMatrix.from_dense(random_adjacency(rng, n, p)) for _ in range(m)]
    features = rng.standard_normal((n, d0))
    labels = np.arange(n) % num_classes
    return Multigraph(views, features, labels)


def path_graph(n=3):
    a = np.zeros((n, n))
    for i in range(n - 1):
        a[i, i + 1] = a[i + 1, i] = 1
    return a


def complete_graph(n=3):
    return np.ones((n, n)) - np.eye(n)


@pytest.fixture
def rng():
    return np.random.default_rng(44)
