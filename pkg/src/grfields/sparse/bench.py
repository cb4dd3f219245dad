"""Sparse-versus-dense factorization timing on 2-D grid precisions."""

import math
import statistics
import time
from dataclasses import dataclass

import numpy as np

from ..exceptions import ConfigurationError
from .cholesky import dense_cholesky, sparse_cholesky
from .ordering import reorder

BACKENDS = ("sparse", "dense")


@dataclass(frozen=True)
class BenchRow:
    n: int
    backend: str
    seconds: float
    nnz: int


@dataclass(frozen=True)
class BenchResult:
    rows: tuple
    slopes: dict  # backend -> fitted log-log slope, or None with fewer than two sizes

    def slope(self, backend):
        return self.slopes.get(backend)


def grid_side(n):
    side = math.isqrt(n)
    if side < 2 or side * side != n:
        raise ConfigurationError(f"benchmark sizes must be squares of grid sides >= 2, got {n}")
    return side


def _median_time(fn, repeats):
    fn()  # warm-up, discarded
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def fitted_slope(ns, seconds):
    """Least-squares slope of log(seconds) against log(n); None for a single size."""
    if len(ns) < 2:
        return None
    return float(np.polyfit(np.log(np.asarray(ns, dtype=float)), np.log(np.asarray(seconds)), 1)[0])


def benchmark_factorization(sizes, backends=BACKENDS, repeats=5):
    """Median factorization time of the m=1 grid precision for each size ``n = side^2``.

    The ordering (sparse) and the dense copy (dense) are prepared outside the
    timed region. ``nnz`` is the factor's fill: ``nnz(L)`` for sparse and
    ``n(n+1)/2`` for dense.
    """
    from ..gmrf import PrecisionModel, build_precision, grid_graph

    sizes = [int(n) for n in sizes]
    if not sizes or any(b >= a for a, b in zip(sizes[1:], sizes)):
        raise ConfigurationError("benchmark sizes must be a nonempty strictly increasing list")
    if repeats < 5:
        raise ConfigurationError("at least 5 repetitions are required")
    for b in backends:
        if b not in BACKENDS:
            raise ConfigurationError(f"unknown backend {b!r}; choose from {BACKENDS}")
    rows = []
    for n in sizes:
        Q = build_precision(grid_graph(grid_side(n), 2), PrecisionModel(kappa=1.0, m=1))
        for backend in backends:
            if backend == "sparse":
                order = reorder("amd", Q)
                nnz = sparse_cholesky(Q, order).nnz_L
                secs = _median_time(lambda: sparse_cholesky(Q, order), repeats)
            else:
                dense = Q.to_dense()
                nnz = n * (n + 1) // 2
                secs = _median_time(lambda: dense_cholesky(dense), repeats)
            rows.append(BenchRow(n, backend, secs, nnz))
    slopes = {}
    for backend in backends:
        sel = [r for r in rows if r.backend == backend]
        slopes[backend] = fitted_slope([r.n for r in sel], [r.seconds for r in sel])
    return BenchResult(tuple(rows), slopes)
