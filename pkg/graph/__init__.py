from .sparse import SparseMatrix, sp_matmul, hadamard, add_identity, sym_normalize, symmetrize, binarize
from .sparse import dump_matrix, load_matrix
from .topology import VoteConfig, vote_filter, triangle_similarity, first_nn
from .topology import extract_edge_topology, extract_subgraph_topology, topology_stats
