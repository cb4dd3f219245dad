"""Sparse symmetric storage, orderings, Cholesky factorization and Matrix Market I/O."""

from .bench import BenchResult, BenchRow, benchmark_factorization, fitted_slope
from .cholesky import (
    CholFactor,
    dense_cholesky,
    elimination_tree,
    reconstruct,
    solve,
    solve_lower,
    solve_lower_transpose,
    sparse_cholesky,
)
from .matrix import (
    SparseMatrix,
    from_arrays,
    from_dense,
    from_scipy,
    from_triplets,
    read_matrix_market,
    write_matrix_market,
)
from .ordering import METHODS, Ordering, bandwidth, reorder

__all__ = [
    "BenchResult",
    "BenchRow",
    "CholFactor",
    "METHODS",
    "Ordering",
    "SparseMatrix",
    "bandwidth",
    "benchmark_factorization",
    "dense_cholesky",
    "elimination_tree",
    "fitted_slope",
    "from_arrays",
    "from_dense",
    "from_scipy",
    "from_triplets",
    "read_matrix_market",
    "reconstruct",
    "reorder",
    "solve",
    "solve_lower",
    "solve_lower_transpose",
    "sparse_cholesky",
    "write_matrix_market",
]
