from collections import namedtuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .sparse import SparseMatrix, add_identity, binarize, hadamard, remove_diagonal, sp_matmul, DEFAULT_MAX_NNZ


class VoteConfig(namedtuple('VoteConfig', ['threshold'])):
    """Minimum number of views that must support an off-diagonal entry"""
    __slots__ = ()

    def __new__(cls, threshold=2):
        return super().__new__(cls, int(threshold))

    def check(self, m):
        if self.threshold < 2:
            raise ValueError(f"vote threshold must be at least 2, got {self.threshold}")
        if self.threshold > m:
            raise ValueError(f"vote threshold {self.threshold} exceeds the number of views {m}")


def vote_filter(views, cfg=VoteConfig(), ignore_diagonal=True):
    """
    Cross-view voting: entry (i, j) is 1 iff at least cfg.threshold views hold a
    strictly positive (i, j) entry. Self-entries are dropped unless
    ignore_diagonal is False.
    """
    if len(views) < 2:
        raise ValueError(f"voting needs at least 2 views, got {len(views)}")
    n = views[0].n
    for v, view in enumerate(views):
        if view.n != n:
            raise ValueError(f"view {v} has {view.n} nodes, expected {n}")
    cfg.check(len(views))

    votes = sp.csr_matrix((n, n), dtype=np.float64)
    for view in views:
        votes = votes + binarize(view).csr
    votes = SparseMatrix(votes)
    if ignore_diagonal:
        votes = remove_diagonal(votes)
    kept = votes.csr.copy()
    kept.data = (kept.data >= cfg.threshold).astype(np.float64)
    return SparseMatrix(kept)


def triangle_similarity(a, max_nnz=DEFAULT_MAX_NNZ):
    """
    Triangle-based weighted similarity (A + I)^2 o (A + I).
    Entry (i, j) of an edge or diagonal position counts the common neighbours
    of i and j in the self-looped graph. Self-loops already in a are ignored.
    """
    if not a.is_binary():
        raise ValueError("triangle_similarity requires a binary adjacency; route weighted views to first_nn")
    looped = add_identity(remove_diagonal(a))
    return hadamard(sp_matmul(looped, looped, max_nnz=max_nnz), looped)


def first_nn(ahat, keep_ties=False):
    """
    First-nearest-neighbour graph: (i, j) is an edge iff j is the off-diagonal
    argmax of row i or i is that of row j. Ties go to the smallest column
    index unless keep_ties is set. Rows without a positive off-diagonal entry
    select nothing.
    """
    if ahat.nnz and ahat.values.min() < 0:
        raise ValueError("first_nn requires a non-negative matrix")
    off = remove_diagonal(ahat).csr
    n = off.shape[0]
    rows = np.repeat(np.arange(n), np.diff(off.indptr))
    cols = off.indices
    data = off.data

    row_max = np.full(n, -np.inf)
    np.maximum.at(row_max, rows, data)
    is_max = data == row_max[rows]
    src, dst = rows[is_max], cols[is_max]
    if not keep_ties:
        # columns are sorted within a row, so the first hit is the smallest index
        _, first = np.unique(src, return_index=True)
        src, dst = src[first], dst[first]

    both_src = np.concatenate([src, dst])
    both_dst = np.concatenate([dst, src])
    return binarize(SparseMatrix.from_edges(n, both_src, both_dst))


def extract_edge_topology(graph, cfg=VoteConfig()):
    """Credible edge-level topology E: voted binarized raw views"""
    return vote_filter([binarize(view) for view in graph.views], cfg)


def subgraph_view(view, keep_ties=False, max_nnz=DEFAULT_MAX_NNZ):
    """Per-view first-nearest-neighbour graph; weighted views skip the triangle step"""
    if view.is_binary():
        view = triangle_similarity(view, max_nnz=max_nnz)
    return first_nn(view, keep_ties=keep_ties)


def extract_subgraph_topology(graph, cfg=VoteConfig(), keep_ties=False, max_nnz=DEFAULT_MAX_NNZ):
    """Credible subgraph-level topology S: voted per-view first-nearest-neighbour graphs"""
    cfg.check(graph.m)
    return vote_filter([subgraph_view(view, keep_ties, max_nnz) for view in graph.views], cfg)


def topology_stats(mat):
    n = mat.n
    components, _ = connected_components(mat.csr, directed=True, connection='weak')
    return {
        "n": n,
        "nnz": int(mat.nnz),
        "density": float(mat.nnz) / (n * n) if n else 0.0,
        "components": int(components),
    }
