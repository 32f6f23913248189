from modules.propagation import PGCN, MGCN, MIMO, SMGCN, EDGE, SUBGRAPH

methods = {
    PGCN:
        {
            "name": "P-GCN",
            "topologies": (),
            "description": "per-view first-order convolutions fused by min/max/mean",
        },
    MGCN:
        {
            "name": "M-GCN",
            "topologies": (),
            "description": "sum over views of powers (A(v))^k, k = 1..K",
        },
    MIMO:
        {
            "name": "MIMO-GCN",
            "topologies": (),
            "description": "every ordered product of views up to length K",
        },
    SMGCN:
        {
            "name": "SMGCN",
            "topologies": (EDGE, SUBGRAPH),
            "description": "(A(v))^k (T(t))^(K-k) over the edge- and subgraph-level credible topologies",
        },
}


def get_method_list():
    return list(methods.keys())


def get_method(method):
    if method not in methods:
        raise NotImplementedError(method)
    return methods[method]


def uses_topology(method):
    return bool(get_method(method)["topologies"])
