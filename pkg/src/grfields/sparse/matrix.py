"""Compressed sparse symmetric storage and Matrix Market I/O.

A ``SparseMatrix`` keeps the lower triangle in compressed-column form: for
column ``j`` the row indices ``indices[indptr[j]:indptr[j+1]]`` are strictly
increasing and all ``>= j``. With ``symmetric=True`` (the default) the logical
matrix is the symmetric completion; Cholesky factors set ``symmetric=False``.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..exceptions import DomainError


def _readonly(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class SparseMatrix:
    n: int
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray
    symmetric: bool = True

    def __post_init__(self):
        object.__setattr__(self, "indptr", _readonly(self.indptr, np.int64))
        object.__setattr__(self, "indices", _readonly(self.indices, np.int64))
        object.__setattr__(self, "data", _readonly(self.data, float))
        if self.indptr.shape != (self.n + 1,) or self.indptr[0] != 0 or self.indptr[-1] != self.indices.size:
            raise DomainError("inconsistent column pointers")
        if self.indices.size != self.data.size:
            raise DomainError("indices and data lengths differ")

    @property
    def nnz(self):
        """Stored (lower-triangle) entries."""
        return int(self.indices.size)

    @property
    def nnz_full(self):
        """Nonzeros of the logical matrix (both triangles for symmetric storage)."""
        if not self.symmetric:
            return self.nnz
        cols = np.repeat(np.arange(self.n), np.diff(self.indptr))
        return int(2 * self.nnz - np.count_nonzero(self.indices == cols))

    def columns(self):
        return np.repeat(np.arange(self.n), np.diff(self.indptr))

    def triplets(self):
        """(rows, cols, values) of the stored lower triangle."""
        return self.indices.copy(), self.columns(), self.data.copy()

    def to_scipy(self):
        """Logical matrix as a ``scipy.sparse.csr_matrix``."""
        rows, cols, vals = self.triplets()
        lower = sp.csc_matrix((vals, (rows, cols)), shape=(self.n, self.n))
        if not self.symmetric:
            return lower.tocsr()
        strict = sp.csc_matrix(
            (vals[rows != cols], (rows[rows != cols], cols[rows != cols])), shape=(self.n, self.n)
        )
        return (lower + strict.T).tocsr()

    def to_dense(self):
        out = np.zeros((self.n, self.n))
        rows, cols, vals = self.triplets()
        out[rows, cols] = vals
        if self.symmetric:
            out[cols, rows] = vals
        return out

    def diagonal(self):
        rows, cols, vals = self.triplets()
        out = np.zeros(self.n)
        mask = rows == cols
        out[cols[mask]] = vals[mask]
        return out

    def get(self, i, j):
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise DomainError(f"index ({i}, {j}) out of range for order {self.n}")
        if self.symmetric and i < j:
            i, j = j, i
        lo, hi = self.indptr[j], self.indptr[j + 1]
        k = lo + np.searchsorted(self.indices[lo:hi], i)
        if k < hi and self.indices[k] == i:
            return float(self.data[k])
        return 0.0

    def matvec(self, x):
        return self.to_scipy() @ np.asarray(x, dtype=float)

    def max_abs(self):
        return float(np.max(np.abs(self.data))) if self.nnz else 0.0

    def submatrix(self, index):
        """Principal submatrix on ``index`` (symmetric storage only)."""
        index = np.asarray(index, dtype=np.int64)
        sub = self.to_scipy()[index][:, index]
        return from_scipy(sub)

    def __repr__(self):
        return f"SparseMatrix(n={self.n}, nnz={self.nnz}, symmetric={self.symmetric})"


def from_triplets(n, triplets):
    """Canonical symmetric ``SparseMatrix`` from ``(row, col, value)`` triplets.

    Upper-triangle entries are mirrored into the lower triangle, duplicates
    are summed in input order, and zeros are dropped.
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 0:
        raise DomainError(f"order must be a nonnegative integer, got {n!r}")
    trip = list(triplets)
    if trip:
        rows = np.array([t[0] for t in trip], dtype=np.int64)
        cols = np.array([t[1] for t in trip], dtype=np.int64)
        vals = np.array([t[2] for t in trip], dtype=float)
    else:
        rows = cols = np.zeros(0, dtype=np.int64)
        vals = np.zeros(0)
    return from_arrays(n, rows, cols, vals)


def from_arrays(n, rows, cols, vals, symmetric=True):
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    vals = np.asarray(vals, dtype=float)
    if rows.size and (rows.min() < 0 or cols.min() < 0 or rows.max() >= n or cols.max() >= n):
        raise DomainError(f"triplet index out of range for order {n}")
    if not np.all(np.isfinite(vals)):
        raise DomainError("triplet values must be finite")
    if symmetric:
        lo = np.minimum(rows, cols)
        hi = np.maximum(rows, cols)
        rows, cols = hi, lo
    elif rows.size and np.any(rows < cols):
        raise DomainError("lower-triangular storage needs row >= col")
    keys = cols * n + rows
    uniq, inverse = np.unique(keys, return_inverse=True)
    summed = np.bincount(inverse, weights=vals, minlength=uniq.size) if uniq.size else np.zeros(0)
    keep = summed != 0.0
    uniq = uniq[keep]
    summed = summed[keep]
    out_cols = uniq // n if n else uniq
    out_rows = uniq % n if n else uniq
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, out_cols + 1, 1)
    return SparseMatrix(n, np.cumsum(indptr), out_rows, summed, symmetric)


def from_scipy(M):
    """Symmetric ``SparseMatrix`` from the lower triangle of a scipy sparse matrix."""
    M = sp.coo_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise DomainError("matrix must be square")
    mask = M.row >= M.col
    return from_arrays(M.shape[0], M.row[mask], M.col[mask], M.data[mask])


def from_dense(A, tol=0.0):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError("matrix must be square")
    rows, cols = np.nonzero(np.tril(np.abs(A) > tol))
    return from_arrays(A.shape[0], rows, cols, A[rows, cols])


# ---------------------------------------------------------------------------
# Matrix Market

_MM_BANNER = "%%MatrixMarket matrix coordinate real symmetric"


def write_matrix_market(A, path, comment=None):
    """Write symmetric storage as 1-based coordinate entries of the lower triangle."""
    if not A.symmetric:
        raise DomainError("only symmetric matrices are written in symmetric Matrix Market form")
    rows, cols, vals = A.triplets()
    lines = [_MM_BANNER]
    if comment:
        lines.extend("% " + line for line in str(comment).splitlines())
    lines.append(f"{A.n} {A.n} {A.nnz}")
    lines.extend(f"{r + 1} {c + 1} {v!r}" for r, c, v in zip(rows.tolist(), cols.tolist(), vals.tolist()))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def read_matrix_market(path):
    """Read a real coordinate Matrix Market file into symmetric storage.

    ``general`` files are accepted when their entries are symmetric.
    """
    with open(path, encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise DomainError(f"{path}: empty file")
    banner = lines[0].lower().split()
    if len(banner) != 5 or banner[0] != "%%matrixmarket" or banner[1:3] != ["matrix", "coordinate"]:
        raise DomainError(f"{path}: not a Matrix Market coordinate file")
    field, symmetry = banner[3], banner[4]
    if field not in ("real", "integer", "double"):
        raise DomainError(f"{path}: unsupported field {field!r}")
    if symmetry not in ("symmetric", "general"):
        raise DomainError(f"{path}: unsupported symmetry {symmetry!r}")
    body = [ln for ln in lines[1:] if ln.strip() and not ln.lstrip().startswith("%")]
    try:
        nrows, ncols, nnz = (int(tok) for tok in body[0].split())
    except (ValueError, IndexError) as exc:
        raise DomainError(f"{path}: malformed size line") from exc
    if nrows != ncols:
        raise DomainError(f"{path}: matrix is not square")
    if len(body) - 1 != nnz:
        raise DomainError(f"{path}: expected {nnz} entries, found {len(body) - 1}")
    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.empty(nnz)
    for k, ln in enumerate(body[1:]):
        parts = ln.split()
        if len(parts) != 3:
            raise DomainError(f"{path}: malformed entry line {ln!r}")
        rows[k] = int(parts[0]) - 1
        cols[k] = int(parts[1]) - 1
        vals[k] = float(parts[2])
    if symmetry == "symmetric":
        if np.any(rows < cols):
            raise DomainError(f"{path}: symmetric files must list the lower triangle")
        return from_arrays(nrows, rows, cols, vals)
    full = sp.coo_matrix((vals, (rows, cols)), shape=(nrows, nrows)).tocsr()
    if (abs(full - full.T)).max() if full.nnz else 0.0:
        raise DomainError(f"{path}: general matrix is not symmetric")
    return from_scipy(full)
