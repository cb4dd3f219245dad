"""Up-looking simplicial sparse Cholesky, triangular solves and the dense baseline.

The symbolic phase builds the elimination tree of the permuted matrix and
counts the nonzeros of each column of ``L`` by walking row subtrees
(``ereach``); the numeric phase computes ``L`` one row at a time.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack

from ..exceptions import DomainError, FactorizationError
from .matrix import SparseMatrix
from .ordering import Ordering, reorder

PIVOT_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class CholFactor:
    """``P A P^T = L L^T`` with ``L`` lower triangular and ``P`` from ``ordering``."""

    L: SparseMatrix
    ordering: Ordering

    @property
    def n(self):
        return self.L.n

    @property
    def nnz_L(self):
        return self.L.nnz

    def logdet(self):
        """log det A = 2 sum log L_jj."""
        return 2.0 * float(np.sum(np.log(self.L.data[self.L.indptr[:-1]])))


def _permuted_upper(A, ordering):
    """Column-compressed upper triangle of ``P A P^T`` as Python lists."""
    inv = ordering.inverse
    rows, cols, vals = A.triplets()
    pr, pc = inv[rows], inv[cols]
    up_row = np.minimum(pr, pc)
    up_col = np.maximum(pr, pc)
    order = np.lexsort((up_row, up_col))
    up_row, up_col, vals = up_row[order], up_col[order], vals[order]
    ptr = np.zeros(A.n + 1, dtype=np.int64)
    np.add.at(ptr, up_col + 1, 1)
    return np.cumsum(ptr).tolist(), up_row.tolist(), vals.tolist()


def elimination_tree(n, Cp, Ci):
    """Parent array of the elimination tree from upper-triangular CSC structure."""
    parent = [-1] * n
    ancestor = [-1] * n
    for k in range(n):
        for p in range(Cp[k], Cp[k + 1]):
            i = Ci[p]
            while i != -1 and i < k:
                nxt = ancestor[i]
                ancestor[i] = k
                if nxt == -1:
                    parent[i] = k
                i = nxt
    return parent


def _ereach(k, Cp, Ci, parent, flag, stack, s):
    """Nonzero pattern of row ``k`` of L (excluding k), in topological order s[top:n]."""
    n = len(parent)
    top = n
    flag[k] = k
    for p in range(Cp[k], Cp[k + 1]):
        i = Ci[p]
        if i > k:
            continue
        length = 0
        while flag[i] != k:
            stack[length] = i
            length += 1
            flag[i] = k
            i = parent[i]
        while length > 0:
            top -= 1
            length -= 1
            s[top] = stack[length]
    return top


def symbolic_counts(n, Cp, Ci, parent):
    """Number of nonzeros in each column of L (diagonal included)."""
    counts = [1] * n
    flag = [-1] * n
    stack = [0] * n
    s = [0] * n
    for k in range(n):
        top = _ereach(k, Cp, Ci, parent, flag, stack, s)
        for t in range(top, n):
            counts[s[t]] += 1
    return counts


def sparse_cholesky(A, ordering=None):
    """Factor the symmetric positive definite ``A`` as ``P A P^T = L L^T``.

    ``ordering`` defaults to approximate minimum degree. Raises
    ``FactorizationError`` naming the pivot when a diagonal entry falls to
    ``<= 1e-12 * max(diag(A))``.
    """
    if not A.symmetric:
        raise DomainError("sparse_cholesky needs symmetric storage")
    if ordering is None:
        ordering = reorder("amd", A)
    if ordering.n != A.n:
        raise DomainError(f"ordering of size {ordering.n} does not match matrix order {A.n}")
    n = A.n
    Cp, Ci, Cx = _permuted_upper(A, ordering)
    parent = elimination_tree(n, Cp, Ci)
    counts = symbolic_counts(n, Cp, Ci, parent)
    Lp = [0] * (n + 1)
    for j in range(n):
        Lp[j + 1] = Lp[j] + counts[j]
    nnz = Lp[n]
    Li = [0] * nnz
    Lx = [0.0] * nnz
    nxt = Lp[:n]
    x = [0.0] * n
    flag = [-1] * n
    stack = [0] * n
    s = [0] * n
    diag = A.diagonal()
    tol = PIVOT_RTOL * (float(diag.max()) if n else 0.0)
    perm = ordering.perm
    for k in range(n):
        top = _ereach(k, Cp, Ci, parent, flag, stack, s)
        for p in range(Cp[k], Cp[k + 1]):
            x[Ci[p]] = Cx[p]
        d = x[k]
        x[k] = 0.0
        for t in range(top, n):
            i = s[t]
            lki = x[i] / Lx[Lp[i]]
            x[i] = 0.0
            for p in range(Lp[i] + 1, nxt[i]):
                x[Li[p]] -= Lx[p] * lki
            d -= lki * lki
            p = nxt[i]
            nxt[i] = p + 1
            Li[p] = k
            Lx[p] = lki
        if not d > tol:
            raise FactorizationError(
                f"matrix is not positive definite: pivot {k} (original index {perm[k]}) is {d!r}",
                pivot=k,
            )
        p = nxt[k]
        nxt[k] = p + 1
        Li[p] = k
        Lx[p] = d**0.5
    L = SparseMatrix(n, Lp, Li, Lx, symmetric=False)
    return CholFactor(L, ordering)


# Solves work on (n, k) arrays with elementwise numpy kernels only (no BLAS),
# so results do not depend on the thread count.
def _forward(L, y):
    ptr, idx, val = L.indptr, L.indices, L.data
    for j in range(L.n):
        lo, hi = ptr[j], ptr[j + 1]
        y[j] /= val[lo]
        if hi > lo + 1:
            y[idx[lo + 1 : hi]] -= val[lo + 1 : hi, None] * y[j]
    return y


def _backward(L, y):
    ptr, idx, val = L.indptr, L.indices, L.data
    for j in range(L.n - 1, -1, -1):
        lo, hi = ptr[j], ptr[j + 1]
        if hi > lo + 1:
            y[j] -= (val[lo + 1 : hi, None] * y[idx[lo + 1 : hi]]).sum(axis=0)
        y[j] /= val[lo]
    return y


def _check_rhs(factor, b):
    b = np.asarray(b, dtype=float)
    if b.ndim not in (1, 2) or b.shape[0] != factor.n:
        raise DomainError(f"right-hand side of shape {b.shape} does not match order {factor.n}")
    return b


def _as_columns(b):
    return b.reshape(b.shape[0], -1).copy()


def solve(factor, b):
    """Solve ``A x = b`` for a vector or a matrix of right-hand sides."""
    b = _check_rhs(factor, b)
    perm = factor.ordering.perm
    y = _backward(factor.L, _forward(factor.L, _as_columns(b[perm])))
    x = np.empty_like(y)
    x[perm] = y
    return x.reshape(b.shape)


def solve_lower(factor, b):
    """``L^-1 (P b)``: the whitening half-solve."""
    b = _check_rhs(factor, b)
    return _forward(factor.L, _as_columns(b[factor.ordering.perm])).reshape(b.shape)


def solve_lower_transpose(factor, z):
    """``P^T L^-T z``: maps standard normals to draws with covariance ``A^-1``."""
    z = _check_rhs(factor, z)
    y = _backward(factor.L, _as_columns(z))
    x = np.empty_like(y)
    x[factor.ordering.perm] = y
    return x.reshape(z.shape)


def reconstruct(factor):
    """Dense ``L L^T`` (equal to ``P A P^T``); for checks at small ``n``."""
    Ld = factor.L.to_dense()
    return Ld @ Ld.T


def dense_cholesky(A):
    """Lower Cholesky factor of a dense SPD matrix via LAPACK ``potrf``."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError("dense_cholesky needs a square matrix")
    L, info = lapack.dpotrf(A, lower=1, clean=1, overwrite_a=0)
    if info > 0:
        raise FactorizationError(f"matrix is not positive definite: pivot {info - 1} failed", pivot=info - 1)
    if info < 0:
        raise DomainError(f"potrf rejected argument {-info}")
    return L
