import numpy as np
import scipy.sparse as sp

DEFAULT_MAX_NNZ = 50_000_000


class SparseMatrix:
    """
    Square sparse non-negative matrix in compressed row form.
    Arguments:
        csr: anything scipy.sparse can turn into a square csr_matrix
    The wrapped matrix is always canonical: float64 values, sorted column
    indices, no duplicate (i, j) and no explicit zeros. Kernels never mutate
    their operands.
    """

    def __init__(self, csr):
        csr = sp.csr_matrix(csr, dtype=np.float64, copy=True)
        if csr.shape[0] != csr.shape[1]:
            raise ValueError(f"SparseMatrix must be square, got shape {csr.shape}")
        csr.sum_duplicates()
        csr.eliminate_zeros()
        csr.sort_indices()
        if not np.all(np.isfinite(csr.data)):
            raise ValueError("SparseMatrix values must be finite")
        self.csr = csr

    @classmethod
    def from_edges(cls, n, src, dst, values=None):
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        if values is None:
            values = np.ones(len(src), dtype=np.float64)
        if len(src) and (src.min() < 0 or dst.min() < 0 or src.max() >= n or dst.max() >= n):
            raise ValueError(f"edge endpoint out of range for n={n}")
        return cls(sp.coo_matrix((values, (src, dst)), shape=(n, n)))

    @classmethod
    def from_dense(cls, dense):
        return cls(np.asarray(dense, dtype=np.float64))

    @classmethod
    def identity(cls, n):
        return cls(sp.identity(n, dtype=np.float64, format='csr'))

    @classmethod
    def zeros(cls, n):
        return cls(sp.csr_matrix((n, n), dtype=np.float64))

    @property
    def n(self):
        return self.csr.shape[0]

    @property
    def nnz(self):
        return self.csr.nnz

    @property
    def row_offsets(self):
        return self.csr.indptr

    @property
    def col_indices(self):
        return self.csr.indices

    @property
    def values(self):
        return self.csr.data

    def to_dense(self):
        return self.csr.toarray()

    def dot(self, dense):
        """Sparse times dense, returns a dense float64 ndarray"""
        dense = np.asarray(dense, dtype=np.float64)
        if dense.shape[0] != self.n:
            raise ValueError(f"cannot multiply {self.n}x{self.n} operator with {dense.shape[0]} rows")
        return np.asarray(self.csr @ dense)

    def transpose(self):
        return SparseMatrix(self.csr.transpose())

    def is_binary(self):
        return bool(np.all(self.csr.data == 1.0))

    def is_symmetric(self):
        return self == self.transpose()

    def validate(self):
        """Raise AssertionError if any storage invariant is broken"""
        indptr, indices, data = self.csr.indptr, self.csr.indices, self.csr.data
        n = self.n
        assert len(indptr) == n + 1, "row_offsets must have n+1 entries"
        assert indptr[0] == 0 and indptr[-1] == len(indices) == len(data), "row_offsets bounds"
        assert np.all(np.diff(indptr) >= 0), "row_offsets must be non-decreasing"
        for i in range(n):
            row = indices[indptr[i]:indptr[i + 1]]
            assert np.all(np.diff(row) > 0), f"row {i} columns not strictly increasing"
        assert len(indices) == 0 or (indices.min() >= 0 and indices.max() < n), "column index out of range"
        assert np.all(np.isfinite(data)), "non-finite value"
        assert np.all(data != 0), "explicit zero stored"
        return True

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.n == other.n
                and np.array_equal(self.csr.indptr, other.csr.indptr)
                and np.array_equal(self.csr.indices, other.csr.indices)
                and np.array_equal(self.csr.data, other.csr.data))

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    __hash__ = None

    def __repr__(self):
        return f"SparseMatrix(n={self.n}, nnz={self.nnz})"


def _check_same_n(a, b):
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")


def _product_nnz_bound(a, b):
    # number of scalar multiplications, an upper bound on nnz(a @ b)
    b_row_nnz = np.diff(b.csr.indptr)
    return int(b_row_nnz[a.csr.indices].sum())


def sp_matmul(a, b, max_nnz=DEFAULT_MAX_NNZ, chunk_rows=1024):
    """
    Exact sparse product a @ b.
    When the multiplication count could exceed max_nnz the product is formed
    in row blocks and aborted as soon as the stored entries pass the cap.
    """
    _check_same_n(a, b)
    if max_nnz is None or _product_nnz_bound(a, b) <= max_nnz:
        return SparseMatrix(a.csr @ b.csr)

    blocks = []
    stored = 0
    for start in range(0, a.n, chunk_rows):
        block = a.csr[start:start + chunk_rows] @ b.csr
        block.eliminate_zeros()
        stored += block.nnz
        if stored > max_nnz:
            raise RuntimeError(f"sparse product exceeds the nnz cap ({stored} > {max_nnz})")
        blocks.append(block)
    return SparseMatrix(sp.vstack(blocks, format='csr'))


def matrix_power(a, k, max_nnz=DEFAULT_MAX_NNZ):
    """a^k by iterated left-multiplication, a^0 = I"""
    if k < 0:
        raise ValueError(f"negative exponent {k}")
    if k == 0:
        return SparseMatrix.identity(a.n)
    result = a
    for _ in range(k - 1):
        result = sp_matmul(a, result, max_nnz=max_nnz)
    return result


def hadamard(a, b):
    _check_same_n(a, b)
    return SparseMatrix(a.csr.multiply(b.csr))


def add_identity(a):
    return SparseMatrix(a.csr + sp.identity(a.n, dtype=np.float64, format='csr'))


def remove_diagonal(a):
    coo = a.csr.tocoo()
    keep = coo.row != coo.col
    return SparseMatrix(sp.coo_matrix((coo.data[keep], (coo.row[keep], coo.col[keep])), shape=coo.shape))


def binarize(a):
    out = a.csr.copy()
    out.data = (out.data > 0).astype(np.float64)
    return SparseMatrix(out)


def sym_normalize(a):
    """D^-1/2 a D^-1/2 with D the row-sum diagonal; zero-degree rows stay zero"""
    if a.nnz and a.values.min() < 0:
        raise ValueError("sym_normalize requires a non-negative matrix")
    deg = np.asarray(a.csr.sum(axis=1)).ravel()
    d_inv_sqrt = np.zeros_like(deg)
    nonzero = deg > 0
    d_inv_sqrt[nonzero] = deg[nonzero] ** -0.5
    d = sp.diags(d_inv_sqrt, format='csr')
    return SparseMatrix(d @ a.csr @ d)


def symmetrize(a):
    return SparseMatrix((a.csr + a.csr.transpose()) * 0.5)


def spectral_radius(a, iterations=1000, tol=1e-12, seed=0):
    """Power-iteration estimate of the spectral radius of a symmetric matrix"""
    if a.nnz == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    x = rng.random(a.n) + 0.1
    x /= np.linalg.norm(x)
    radius = 0.0
    for _ in range(iterations):
        y = a.csr @ (a.csr @ x)
        norm = np.linalg.norm(y)
        if norm == 0:
            return 0.0
        # a^2 is positive semi-definite for symmetric a, so this converges monotonically
        estimate = np.sqrt(norm)
        x = y / norm
        if abs(estimate - radius) < tol:
            return estimate
        radius = estimate
    return radius


def dump_matrix(a):
    """Text form: 'n nnz' header then sorted 0-indexed 'row col value' triples"""
    coo = a.csr.tocoo()
    lines = [f"{a.n} {a.nnz}"]
    lines.extend(f"{i} {j} {v!r}" for i, j, v in zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()))
    return "\n".join(lines) + "\n"


def load_matrix(text):
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise ValueError("empty matrix dump")
    n, nnz = (int(x) for x in lines[0].split())
    if len(lines) - 1 != nnz:
        raise ValueError(f"matrix dump declares {nnz} entries but holds {len(lines) - 1}")
    rows, cols, vals = [], [], []
    for line in lines[1:]:
        i, j, v = line.split()
        rows.append(int(i))
        cols.append(int(j))
        vals.append(float(v))
    return SparseMatrix.from_edges(n, rows, cols, vals)
