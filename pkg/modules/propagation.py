import itertools
from collections import namedtuple

import numpy as np
from tqdm import tqdm

from graph.sparse import SparseMatrix, matrix_power, sp_matmul, sym_normalize, symmetrize as symmetrize_matrix, DEFAULT_MAX_NNZ

PGCN = 'pgcn'
MGCN = 'mgcn'
MIMO = 'mimo'
SMGCN = 'smgcn'
METHODS = (PGCN, MGCN, MIMO, SMGCN)

VIEW = 'view'
EDGE = 'edge'
SUBGRAPH = 'subgraph'
IDENTITY = 'identity'
TOPOLOGIES = (EDGE, SUBGRAPH)

_SYMBOLS = {EDGE: 'E', SUBGRAPH: 'S', IDENTITY: 'I'}


class Factor(namedtuple('Factor', ['kind', 'index', 'power'])):
    """One operator raised to a power; index is the view number for VIEW factors"""
    __slots__ = ()

    @property
    def key(self):
        return (self.kind, self.index)

    def __str__(self):
        if self.kind == IDENTITY:
            return 'I'
        symbol = f"A{self.index}" if self.kind == VIEW else _SYMBOLS[self.kind]
        return f"{symbol}^{self.power}"


class TermSpec(namedtuple('TermSpec', ['method', 'factors'])):
    """One polynomial term: the ordered product of its factors, applied to X"""
    __slots__ = ()

    @property
    def is_identity(self):
        return all(f.kind == IDENTITY for f in self.factors)

    @property
    def degree(self):
        return sum(f.power for f in self.factors if f.kind != IDENTITY)

    def sequence(self):
        """Left-to-right operator keys with powers expanded"""
        return tuple(f.key for f in self.factors if f.kind != IDENTITY for _ in range(f.power))

    @property
    def name(self):
        return "*".join(str(f) for f in self.factors)

    def __str__(self):
        return self.name


def identity_term(method):
    return TermSpec(method, (Factor(IDENTITY, None, 1),))


def enumerate_terms(method, m, K, dedupe=False):
    """
    Deterministic term list for a method.
      pgcn:  A(v) for each view (no identity term)
      mgcn:  I, then (A(v))^k in (v, k) order
      mimo:  I, then every ordered view sequence by length, then lexicographically
      smgcn: I, then (A(v))^k (T(t))^(K-k) in (t, v, k) order; with dedupe the
             S-variant of k = K (identical to the E-variant) is dropped
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}, expected one of {METHODS}")
    if m < 2:
        raise ValueError(f"need at least 2 views, got m={m}")
    if K < 1:
        raise ValueError(f"polynomial order must be at least 1, got K={K}")

    if method == PGCN:
        return [TermSpec(method, (Factor(VIEW, v, 1),)) for v in range(m)]

    terms = [identity_term(method)]
    if method == MGCN:
        terms += [TermSpec(method, (Factor(VIEW, v, k),)) for v in range(m) for k in range(1, K + 1)]
    elif method == MIMO:
        for length in range(1, K + 1):
            for seq in itertools.product(range(m), repeat=length):
                terms.append(TermSpec(method, tuple(Factor(VIEW, v, 1) for v in seq)))
    else:
        for t in TOPOLOGIES:
            for v in range(m):
                for k in range(1, K + 1):
                    if dedupe and t == SUBGRAPH and k == K:
                        continue
                    terms.append(TermSpec(method, (Factor(VIEW, v, k), Factor(t, None, K - k))))
    return terms


def term_count(method, m, K, dedupe=False):
    """Closed-form length of enumerate_terms(method, m, K, dedupe)"""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}, expected one of {METHODS}")
    if method == PGCN:
        return m
    if method == MGCN:
        return 1 + m * K
    if method == MIMO:
        return 1 + sum(m ** k for k in range(1, K + 1))
    return 1 + 2 * m * K - (m if dedupe else 0)


class PropagatedFeatures:
    """
    Precomputed operator-times-features products, one dense n x d matrix per term.
    Built once before training and treated as read-only afterwards.
    """

    def __init__(self, terms, features):
        if len(terms) != len(features) or not terms:
            raise ValueError(f"need one feature matrix per term, got {len(terms)} terms and {len(features)} matrices")
        self.terms = list(terms)
        self.features = list(features)

    def __len__(self):
        return len(self.terms)

    @property
    def n(self):
        return self.features[0].shape[0]

    @property
    def d0(self):
        return self.features[0].shape[1]

    def stack(self):
        return np.stack(self.features)


def build_operators(graph, terms, edge_topo=None, subgraph_topo=None, normalize=True):
    """Operator table for the keys the terms reference, normalized unless told otherwise"""
    needed = {key for term in terms for key in term.sequence()}
    operators = {}
    for kind, index in sorted(needed, key=lambda k: (k[0], -1 if k[1] is None else k[1])):
        if kind == VIEW:
            if index >= graph.m:
                raise ValueError(f"term references view {index} but the multigraph has {graph.m} views")
            op = graph.views[index]
        elif kind == EDGE:
            op = edge_topo
        else:
            op = subgraph_topo
        if op is None:
            raise ValueError(f"terms reference the {kind} topology but none was provided")
        if op.n != graph.n:
            raise ValueError(f"{kind} operator has {op.n} nodes, multigraph has {graph.n}")
        operators[(kind, index)] = sym_normalize(op) if normalize else op
    return operators


def materialize_operator(term, operators, n, max_nnz=DEFAULT_MAX_NNZ):
    """The explicit sparse operator of a term, formed by left-multiplication"""
    if not term.sequence():
        return SparseMatrix.identity(n)
    result = None
    try:
        for f in reversed(term.factors):
            if f.kind == IDENTITY or f.power == 0:
                continue
            power = matrix_power(operators[f.key], f.power, max_nnz=max_nnz)
            result = power if result is None else sp_matmul(power, result, max_nnz=max_nnz)
    except RuntimeError as e:
        raise RuntimeError(f"term {term.name}: {e}") from e
    return result


def propagate(graph, terms, edge_topo=None, subgraph_topo=None, normalize=True, symmetrize=False,
              max_nnz=DEFAULT_MAX_NNZ, progress=False):
    """
    Apply every term's operator to the node features.
    Products are evaluated right to left as sparse-times-dense steps and every
    operator suffix is computed once, so terms sharing a tail (e.g. (T)^j X)
    reuse it. With symmetrize the term operator is materialized, symmetrized,
    then applied.
    """
    x = graph.features
    if x.size == 0:
        raise ValueError("node features are empty")
    operators = build_operators(graph, terms, edge_topo, subgraph_topo, normalize)

    cache = {(): x}
    features = []
    for term in tqdm(terms, desc="propagate", disable=not progress):
        if term.is_identity:
            features.append(x)
            continue
        if symmetrize:
            op = symmetrize_matrix(materialize_operator(term, operators, graph.n, max_nnz))
            features.append(op.dot(x))
            continue
        seq = term.sequence()
        for i in range(len(seq) - 1, -1, -1):
            suffix = seq[i:]
            if suffix not in cache:
                cache[suffix] = operators[seq[i]].dot(cache[suffix[1:]])
        features.append(cache[seq])
    return PropagatedFeatures(terms, features)


ParameterReport = namedtuple('ParameterReport', ['method', 'm', 'K', 'd0', 'd1', 'c', 'term_count',
                                                 'projection_parameters', 'classifier_parameters',
                                                 'bias_parameters', 'total'])


def count_parameters(method, m, K, d0, d1, c, dedupe=False):
    """
    Exact trainable-parameter count of the model built for these sizes:
    one d0 x d1 projection per term, a linear classifier (over the 3-way
    min/max/mean concatenation for pgcn) and its c biases.
    """
    for name, value in (('m', m), ('K', K), ('d0', d0), ('d1', d1), ('c', c)):
        if value < 1:
            raise ValueError(f"{name} must be positive, got {value}")
    terms = term_count(method, m, K, dedupe)
    embed = 3 * d1 if method == PGCN else d1
    projection = terms * d0 * d1
    classifier = embed * c
    return ParameterReport(method, m, K, d0, d1, c, terms, projection, classifier, c, projection + classifier + c)
