import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from grfields.exceptions import ConfigurationError, DomainError, FactorizationError
from grfields.gmrf import PrecisionModel, build_precision, grid_graph
from grfields.sparse import (
    Ordering,
    bandwidth,
    benchmark_factorization,
    dense_cholesky,
    elimination_tree,
    fitted_slope,
    from_dense,
    from_scipy,
    from_triplets,
    read_matrix_market,
    reconstruct,
    reorder,
    solve,
    sparse_cholesky,
    write_matrix_market,
)


def grid_laplacian_plus(side, shift=1.0):
    T = sp.diags([-np.ones(side - 1), 2 * np.ones(side), -np.ones(side - 1)], [-1, 0, 1])
    I = sp.identity(side)
    return from_scipy(shift * sp.identity(side * side) + sp.kron(T, I) + sp.kron(I, T))


def random_spd(rng, n, density=0.2):
    A = sp.random(n, n, density=density, random_state=np.random.RandomState(int(rng.integers(2**31))))
    A = A + A.T
    return from_scipy(A + sp.identity(n) * (abs(A).sum(axis=1).max() + 1.0))


class TestStorage:
    def test_empty(self):
        A = from_triplets(3, [])
        assert A.nnz == 0
        np.testing.assert_array_equal(A.to_dense(), np.zeros((3, 3)))

    def test_small_block(self):
        A = from_triplets(2, [(0, 0, 2.0), (1, 0, 1.0), (1, 1, 2.0)])
        np.testing.assert_array_equal(A.to_dense(), [[2, 1], [1, 2]])

    def test_duplicates_summed_and_upper_mirrored(self):
        A = from_triplets(2, [(0, 0, 1.0), (0, 0, 1.0), (0, 1, 3.0)])
        assert A.get(0, 0) == 2.0
        assert A.get(0, 1) == A.get(1, 0) == 3.0
        assert A.nnz == 2

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            from_triplets(2, [(2, 0, 1.0)])

    def test_canonical_invariants(self):
        rng = np.random.default_rng(1)
        A = random_spd(rng, 30)
        for j in range(A.n):
            rows = A.indices[A.indptr[j] : A.indptr[j + 1]]
            assert np.all(np.diff(rows) > 0)
            assert np.all(rows >= j)
        assert np.all(A.data != 0)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 7), st.integers(0, 7), st.integers(-3, 3)), max_size=40))
    def test_triplet_round_trip_idempotent(self, trips):
        A = from_triplets(8, trips)
        B = from_triplets(8, list(zip(*A.triplets())))
        assert np.array_equal(A.indptr, B.indptr)
        assert np.array_equal(A.indices, B.indices)
        assert np.array_equal(A.data, B.data)
        dense = np.zeros((8, 8))
        for i, j, v in trips:
            dense[max(i, j), min(i, j)] += v
        dense = np.tril(dense) + np.tril(dense, -1).T
        np.testing.assert_array_equal(A.to_dense(), dense)

    def test_matrix_market_round_trip(self, tmp_path):
        A = grid_laplacian_plus(4, 0.3)
        path = tmp_path / "a.mtx"
        write_matrix_market(A, path)
        text = path.read_text()
        assert text.splitlines()[0] == "%%MatrixMarket matrix coordinate real symmetric"
        assert text.splitlines()[1] == "16 16 40"
        B = read_matrix_market(path)
        np.testing.assert_array_equal(A.to_dense(), B.to_dense())

    def test_matrix_market_one_based(self, tmp_path):
        path = tmp_path / "b.mtx"
        path.write_text("%%MatrixMarket matrix coordinate real symmetric\n% comment\n2 2 3\n1 1 4\n2 1 2\n2 2 3\n")
        np.testing.assert_array_equal(read_matrix_market(path).to_dense(), [[4, 2], [2, 3]])

    def test_matrix_market_rejects_bad_files(self, tmp_path):
        path = tmp_path / "c.mtx"
        path.write_text("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 4\n")
        with pytest.raises(DomainError):
            read_matrix_market(path)
        path.write_text("%%MatrixMarket matrix array real general\n2 2\n1\n0\n0\n1\n")
        with pytest.raises(DomainError):
            read_matrix_market(path)


class TestOrdering:
    def test_natural_identity(self):
        o = reorder("natural", grid_laplacian_plus(3))
        np.testing.assert_array_equal(o.perm, np.arange(9))

    def test_invalid_permutation(self):
        with pytest.raises(DomainError):
            Ordering(np.array([0, 0, 1]))

    def test_unknown_method(self):
        with pytest.raises(ConfigurationError):
            reorder("metis", grid_laplacian_plus(3))

    def test_rcm_recovers_path_bandwidth(self):
        n = 30
        P = sp.diags([-np.ones(n - 1), 3 * np.ones(n), -np.ones(n - 1)], [-1, 0, 1]).toarray()
        perm = np.random.default_rng(0).permutation(n)
        A = from_dense(P[np.ix_(perm, perm)])
        assert bandwidth(A) > 1
        o = reorder("rcm", A)
        assert bandwidth(A, o) <= 1

    def test_amd_reduces_fill_on_grid(self):
        A = grid_laplacian_plus(16)
        nat = sparse_cholesky(A, reorder("natural", A)).nnz_L
        amd = sparse_cholesky(A, reorder("amd", A)).nnz_L
        assert amd <= nat
        assert amd < 0.6 * nat

    @pytest.mark.parametrize("method", ["amd", "rcm", "natural"])
    def test_valid_permutations(self, method):
        rng = np.random.default_rng(5)
        A = random_spd(rng, 40, 0.1)
        o = reorder(method, A)
        assert sorted(o.perm.tolist()) == list(range(40))

    def test_disconnected_graph(self):
        A = from_dense(np.diag([1.0, 2.0, 3.0]))
        for method in ("amd", "rcm"):
            assert sorted(reorder(method, A).perm.tolist()) == [0, 1, 2]


class TestCholesky:
    def test_identity(self):
        f = sparse_cholesky(from_dense(np.eye(5)), reorder("natural", from_dense(np.eye(5))))
        np.testing.assert_array_equal(f.L.to_dense(), np.eye(5))

    def test_two_by_two(self):
        A = from_dense([[4.0, 2.0], [2.0, 3.0]])
        f = sparse_cholesky(A, reorder("natural", A))
        np.testing.assert_allclose(f.L.to_dense(), [[2, 0], [1, math.sqrt(2)]], rtol=1e-15)
        x = solve(f, [8.0, 7.0])
        assert np.max(np.abs(A.to_dense() @ x - [8, 7])) <= 1e-12
        np.testing.assert_allclose(x, [1.25, 1.5])

    def test_gmrf_precision_reconstruction(self):
        Q = build_precision(grid_graph(32, 2), PrecisionModel(kappa=0.5, m=2))
        f = sparse_cholesky(Q, reorder("amd", Q))
        # compare on the permuted pattern without forming a dense 1024^2 product twice
        Ls = f.L.to_scipy()
        perm = f.ordering.perm
        PAP = Q.to_scipy()[perm][:, perm]
        assert abs(Ls @ Ls.T - PAP).max() <= 1e-9 * Q.max_abs()
        assert np.all(f.L.diagonal() > 0)

    def test_not_positive_definite_names_pivot(self):
        A = from_dense([[1.0, 2.0], [2.0, 1.0]])
        with pytest.raises(FactorizationError) as info:
            sparse_cholesky(A, reorder("natural", A))
        assert info.value.pivot == 1
        assert "pivot 1" in str(info.value)

    def test_pivot_tolerance(self):
        A = from_dense([[1.0, 1.0], [1.0, 1.0 + 1e-13]])
        with pytest.raises(FactorizationError):
            sparse_cholesky(A, reorder("natural", A))

    def test_solve_identity_and_shape(self):
        A = from_dense(np.eye(3))
        f = sparse_cholesky(A)
        np.testing.assert_array_equal(solve(f, [1.0, 2.0, 3.0]), [1, 2, 3])
        with pytest.raises(DomainError):
            solve(f, [1.0, 2.0])

    def test_random_dense_spd(self):
        rng = np.random.default_rng(9)
        M = rng.standard_normal((50, 50))
        A = M @ M.T + 50 * np.eye(50)
        f = sparse_cholesky(from_dense(A))
        b = rng.standard_normal(50)
        x = solve(f, b)
        assert np.linalg.norm(A @ x - b) <= 1e-8 * np.linalg.norm(b)
        B = rng.standard_normal((50, 3))
        np.testing.assert_allclose(solve(f, B), np.linalg.solve(A, B), rtol=1e-10)

    def test_elimination_tree_path(self):
        # tridiagonal: each column's parent is the next column
        Cp = [0, 1, 3, 5]
        Ci = [0, 0, 1, 1, 2]
        assert elimination_tree(3, Cp, Ci) == [1, 2, -1]

    def test_logdet(self):
        rng = np.random.default_rng(2)
        A = random_spd(rng, 25)
        assert sparse_cholesky(A).logdet() == pytest.approx(np.linalg.slogdet(A.to_dense())[1], rel=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(2, 20), st.floats(0.05, 0.5), st.integers(0, 2**31 - 1))
    def test_reconstruction_and_orderings_agree(self, n, density, seed):
        rng = np.random.default_rng(seed)
        A = random_spd(rng, n, density)
        b = rng.standard_normal(n)
        x_nat = solve(sparse_cholesky(A, reorder("natural", A)), b)
        for method in ("amd", "rcm"):
            f = sparse_cholesky(A, reorder(method, A))
            perm = f.ordering.perm
            P = A.to_dense()[np.ix_(perm, perm)]
            assert np.max(np.abs(reconstruct(f) - P)) <= 1e-9 * A.max_abs()
            assert f.nnz_L >= A.nnz
            np.testing.assert_allclose(solve(f, b), x_nat, atol=1e-8)

    def test_deterministic(self):
        A = grid_laplacian_plus(10)
        f1 = sparse_cholesky(A, reorder("amd", A))
        f2 = sparse_cholesky(A, reorder("amd", A))
        assert np.array_equal(f1.L.data, f2.L.data)
        assert np.array_equal(f1.ordering.perm, f2.ordering.perm)


class TestDense:
    def test_two_by_two(self):
        np.testing.assert_allclose(dense_cholesky([[4.0, 2.0], [2.0, 3.0]]), [[2, 0], [1, math.sqrt(2)]])

    def test_identity_and_random(self):
        np.testing.assert_array_equal(dense_cholesky(np.eye(4)), np.eye(4))
        rng = np.random.default_rng(1)
        M = rng.standard_normal((30, 30))
        A = M @ M.T + np.eye(30)
        L = dense_cholesky(A)
        assert np.max(np.abs(L @ L.T - A)) <= 1e-10 * np.max(np.abs(A))
        assert np.all(np.triu(L, 1) == 0)

    def test_not_pd(self):
        with pytest.raises(FactorizationError) as info:
            dense_cholesky([[1.0, 2.0], [2.0, 1.0]])
        assert info.value.pivot == 1


class TestBenchmark:
    def test_single_size_has_no_slope(self):
        res = benchmark_factorization([64], repeats=5)
        assert len(res.rows) == 2
        assert res.slope("sparse") is None and res.slope("dense") is None
        assert [r.backend for r in res.rows] == ["sparse", "dense"]
        assert res.rows[1].nnz == 64 * 65 // 2

    def test_sizes_validated(self):
        with pytest.raises(ConfigurationError):
            benchmark_factorization([100, 50])
        with pytest.raises(ConfigurationError):
            benchmark_factorization([50])
        with pytest.raises(ConfigurationError):
            benchmark_factorization([64], repeats=3)

    def test_deterministic_except_seconds(self):
        a = benchmark_factorization([64, 144], ("sparse",))
        b = benchmark_factorization([64, 144], ("sparse",))
        assert [(r.n, r.backend, r.nnz) for r in a.rows] == [(r.n, r.backend, r.nnz) for r in b.rows]

    def test_fitted_slope(self):
        assert fitted_slope([10, 100], [1.0, 1000.0]) == pytest.approx(3.0)
        assert fitted_slope([10], [1.0]) is None

    @pytest.mark.slow
    def test_median_stable_under_more_repeats(self):
        base = benchmark_factorization([1024], ("sparse",), repeats=5).rows[0].seconds
        more = benchmark_factorization([1024], ("sparse",), repeats=10).rows[0].seconds
        assert more <= 1.5 * base
