import numpy as np
import pytest
import scipy.sparse as sp

from signednet.errors import ConvergenceError, UsageError
from signednet.graph import matrix_view
from signednet.oracle import dense_matrix, exp_taylor, matrix_square
from signednet.spectral import (
    DecompositionCache,
    dominant_left_eigenvector,
    kernel_score,
    kernel_scores,
    signed_two_paths,
    spectral_transform,
    truncated_eig_sym,
    truncated_svd,
)
from signednet.synthetic import erdos_signed

from conftest import graph


def sym_graph(n, p, bias, seed):
    g = erdos_signed(n, p, bias, seed)
    edges = {}
    for u, v, w in g.edges():
        edges.setdefault((min(u, v), max(u, v)), w)
    pairs = [(str(u), str(v), w) for (u, v), w in edges.items()]
    pairs += [(str(v), str(u), w) for (u, v), w in edges.items()]
    return graph(pairs, labels=[str(i) for i in range(n)])


def assert_orthonormal(m, tol=1e-8):
    assert np.abs(m.T @ m - np.eye(m.shape[1])).max() <= tol


class TestSymmetricEig:
    def test_single_edge(self):
        dec = truncated_eig_sym(matrix_view(graph([("a", "b", 1)]), "B"), 2)
        assert sorted(dec.spectrum.tolist()) == pytest.approx([-1.0, 1.0], abs=1e-12)

    def test_laplacian_null_vector(self):
        dec = truncated_eig_sym(matrix_view(graph([("a", "b", 1)]), "Laplacian"), 1,
                                which="smallest_algebraic")
        assert dec.spectrum[0] == pytest.approx(0.0, abs=1e-12)
        assert np.abs(dec.left[:, 0]) == pytest.approx([2**-0.5] * 2)
        assert dec.left[0, 0] == pytest.approx(dec.left[1, 0])

    def test_full_rank_matches_dense(self):
        g = erdos_signed(16, 0.3, 0.6, 2)
        dense = dense_matrix(g, "B")
        dec = truncated_eig_sym(matrix_view(g, "B"), 16)
        assert np.sort(dec.spectrum) == pytest.approx(np.linalg.eigvalsh(dense), abs=1e-8)
        assert np.abs(dec.reconstruct() - dense).max() < 1e-8
        assert_orthonormal(dec.left)

    @pytest.mark.parametrize("which", ["largest_magnitude", "largest_algebraic", "smallest_algebraic"])
    def test_truncated_orders_and_residuals(self, which):
        g = erdos_signed(150, 0.05, 0.6, 3)
        view = matrix_view(g, "Laplacian" if which == "smallest_algebraic" else "B")
        dense = dense_matrix(g, view.kind)
        ref = np.linalg.eigvalsh(dense)
        dec = truncated_eig_sym(view, 6, tol=1e-10, which=which)
        if which == "largest_magnitude":
            expected = ref[np.argsort(-np.abs(ref), kind="stable")][:6]
            assert np.abs(dec.spectrum) == pytest.approx(np.abs(expected), abs=1e-8)
        elif which == "largest_algebraic":
            assert dec.spectrum == pytest.approx(ref[::-1][:6], abs=1e-8)
        else:
            assert dec.spectrum == pytest.approx(ref[:6], abs=1e-8)
        assert_orthonormal(dec.left)
        assert np.all(dec.residuals <= 1e-8 * dec.norm_estimate)

    def test_rejects_bad_input(self):
        g = erdos_signed(10, 0.3, 0.5, 1)
        with pytest.raises(UsageError):
            truncated_eig_sym(matrix_view(g, "A"), 2)
        with pytest.raises(UsageError):
            truncated_eig_sym(matrix_view(g, "B"), 11)
        with pytest.raises(UsageError):
            truncated_eig_sym(matrix_view(g, "B"), 0)
        with pytest.raises(UsageError):
            truncated_eig_sym(matrix_view(g, "B"), 2, which="middle")

    def test_non_convergence_carries_residuals(self):
        g = erdos_signed(400, 0.02, 0.5, 1)
        with pytest.raises(ConvergenceError) as info:
            truncated_eig_sym(matrix_view(g, "B"), 5, tol=1e-15, max_iter=1)
        assert info.value.residuals is not None

    def test_accepts_plain_matrices(self):
        m = np.diag([3.0, -2.0, 1.0])
        dec = truncated_eig_sym(m, 3)
        assert dec.spectrum.tolist() == pytest.approx([3.0, -2.0, 1.0])
        dec = truncated_eig_sym(sp.csr_matrix(m), 1)
        assert dec.spectrum[0] == pytest.approx(3.0)

    def test_deterministic_with_sign_convention(self):
        g = erdos_signed(200, 0.03, 0.5, 7)
        a = truncated_eig_sym(matrix_view(g, "B"), 8, seed=3)
        b = truncated_eig_sym(matrix_view(g, "B"), 8, seed=3)
        assert np.array_equal(a.spectrum, b.spectrum) and np.array_equal(a.left, b.left)
        idx = np.argmax(np.abs(a.left), axis=0)
        assert np.all(a.left[idx, np.arange(8)] > 0)


class TestSVD:
    def test_single_edge(self):
        dec = truncated_svd(matrix_view(graph([("a", "b", 1)]), "A"), 1)
        assert dec.spectrum[0] == pytest.approx(1.0)
        assert np.abs(dec.left[:, 0]) == pytest.approx([1.0, 0.0], abs=1e-12)
        assert np.abs(dec.right[:, 0]) == pytest.approx([0.0, 1.0], abs=1e-12)

    def test_full_rank_reconstruction(self):
        g = erdos_signed(12, 0.3, 0.5, 4)
        dec = truncated_svd(matrix_view(g, "A"), 12)
        assert np.abs(dec.reconstruct() - dense_matrix(g, "A")).max() < 1e-8
        assert np.all(dec.spectrum >= 0) and np.all(np.diff(dec.spectrum) <= 1e-12)
        assert_orthonormal(dec.left)
        assert_orthonormal(dec.right)

    def test_negation_preserves_spectrum(self):
        g = erdos_signed(60, 0.1, 0.5, 5)
        a = truncated_svd(matrix_view(g, "A"), 5, tol=1e-10).spectrum
        b = truncated_svd(matrix_view(g.negated(), "A"), 5, tol=1e-10).spectrum
        assert a == pytest.approx(b, abs=1e-8)

    def test_truncated_matches_dense_and_capture_is_monotone(self):
        g = erdos_signed(120, 0.06, 0.7, 6)
        ref = np.linalg.svd(dense_matrix(g, "A"), compute_uv=False)
        prev = 0.0
        for k in (1, 3, 8):
            dec = truncated_svd(matrix_view(g, "A"), k, tol=1e-10)
            assert dec.spectrum == pytest.approx(ref[:k], abs=1e-8)
            assert np.all(dec.residuals <= 1e-8 * dec.norm_estimate)
            assert dec.spectrum.sum() >= prev
            prev = dec.spectrum.sum()

    def test_truncate(self):
        dec = truncated_svd(matrix_view(erdos_signed(30, 0.2, 0.5, 1), "A"), 6)
        small = dec.truncate(2)
        assert small.k == 2 and np.array_equal(small.left, dec.left[:, :2])
        with pytest.raises(UsageError):
            dec.truncate(7)


class TestPowerIteration:
    def test_clique_is_uniform(self):
        names = "abcd"
        g = graph([(x, y, 1) for x in names for y in names if x != y])
        for alpha in (0.1, 0.5, 0.9):
            x = dominant_left_eigenvector(matrix_view(g, "RowStochasticUnsigned"), alpha)
            assert x == pytest.approx([0.5] * 4, abs=1e-9)

    def test_signed_kind_equals_unsigned_when_all_positive(self):
        g = erdos_signed(40, 0.1, 1.0, 3)
        a = dominant_left_eigenvector(matrix_view(g, "RowStochasticUnsigned"), 0.15)
        b = dominant_left_eigenvector(matrix_view(g, "RowStochasticSigned"), 0.15)
        assert np.array_equal(a, b)

    def test_start_vector_scaling_invariance(self):
        g = erdos_signed(50, 0.1, 0.8, 4)
        view = matrix_view(g, "RowStochasticUnsigned")
        x0 = np.random.default_rng(0).random(50)
        a = dominant_left_eigenvector(view, 0.15, tol=1e-12, x0=x0)
        b = dominant_left_eigenvector(view, 0.15, tol=1e-12, x0=1000 * x0)
        assert np.abs(a - b).max() <= 1e-10
        assert np.linalg.norm(a) == pytest.approx(1.0, abs=1e-12) and a.sum() >= 0

    def test_errors(self):
        g = erdos_signed(20, 0.2, 0.5, 1)
        with pytest.raises(UsageError):
            dominant_left_eigenvector(matrix_view(g, "RowStochasticSigned"), 0.0)
        with pytest.raises(UsageError):
            dominant_left_eigenvector(matrix_view(g, "A"), 0.15)
        with pytest.raises(ConvergenceError, match="last delta"):
            dominant_left_eigenvector(matrix_view(g, "RowStochasticUnsigned"), 0.15, tol=1e-30,
                                      max_iter=3)


class TestTransforms:
    def test_identity_kernel_reproduces_entries(self):
        dec = truncated_svd(matrix_view(graph([("a", "b", 1)]), "A"), 2)
        k = spectral_transform(dec, "identity")
        assert kernel_score(k, 0, 1) == pytest.approx(1.0)
        assert kernel_score(k, 1, 0) == pytest.approx(0.0, abs=1e-15)

    def test_exponential_of_empty_graph_is_identity(self):
        g = graph([], labels=["a", "b", "c"])
        dec = truncated_eig_sym(matrix_view(g, "B"), 3)
        assert spectral_transform(dec, "exponential").dense() == pytest.approx(np.eye(3))

    def test_pinv_of_two_node_laplacian(self):
        dec = truncated_eig_sym(matrix_view(graph([("a", "b", 1)]), "Laplacian"), 2,
                                which="smallest_algebraic")
        k = spectral_transform(dec, "pseudoinverse").dense()
        assert np.abs(k - np.array([[0.25, -0.25], [-0.25, 0.25]])).max() <= 1e-12

    def test_pinv_twice_restores_nonzero_spectrum(self):
        g = erdos_signed(30, 0.2, 0.5, 2)
        dec = truncated_eig_sym(matrix_view(g, "Laplacian"), 30, which="smallest_algebraic")
        twice = spectral_transform(spectral_transform(dec, "pseudoinverse"), "pseudoinverse")
        keep = np.abs(dec.spectrum) > 1e-6 * np.abs(dec.spectrum).max()
        assert np.abs(twice.spectrum[keep] - dec.spectrum[keep]).max() <= 1e-10
        assert twice.transform == "pseudoinverse(pseudoinverse)"

    def test_pinv_zeroes_small_values(self):
        dec = truncated_eig_sym(np.diag([1.0, 1e-9, 0.5]), 3)
        k = spectral_transform(dec, "pseudoinverse")
        values = sorted(k.spectrum.tolist())
        assert values[0] == 0.0
        assert values[1:] == pytest.approx([1.0, 2.0], abs=1e-12)

    def test_symmetric_kernel_and_exp_against_taylor(self):
        g = sym_graph(12, 0.3, 0.6, 3)
        dec = truncated_eig_sym(matrix_view(g, "B"), 12)
        kern = spectral_transform(dec, "exponential")
        ref = exp_taylor(dense_matrix(g, "B"))
        assert np.abs(kern.dense() - ref).max() <= 1e-6 * np.abs(ref).max()
        us, vs = np.divmod(np.arange(144), 12)
        scores = kernel_scores(kern, us, vs)
        assert scores == pytest.approx(kernel_scores(kern, vs, us), abs=1e-9)
        assert kern.score(2, 5) == pytest.approx(scores[2 * 12 + 5])

    def test_bad_transform_and_index(self):
        dec = truncated_eig_sym(np.eye(2), 2)
        with pytest.raises(UsageError):
            spectral_transform(dec, "log")
        k = spectral_transform(dec, "identity")
        with pytest.raises(IndexError):
            kernel_score(k, 0, 2)
        with pytest.raises(IndexError):
            kernel_scores(k, [0], [-1])


class TestTwoPaths:
    def test_enemy_of_friend(self):
        g = graph([("a", "b", 1), ("b", "c", -1)])
        assert signed_two_paths(g, [0, 2], [2, 0]).tolist() == [-1.0, 0.0]

    def test_matches_dense_square(self):
        g = erdos_signed(20, 0.3, 0.5, 8)
        us, vs = np.divmod(np.arange(400), 20)
        got = signed_two_paths(g, us, vs, chunk=37).reshape(20, 20)
        assert np.array_equal(got, matrix_square(g))

    def test_shape_mismatch(self):
        with pytest.raises(UsageError):
            signed_two_paths(graph([("a", "b", 1)]), [0], [0, 1])


def test_decomposition_cache_round_trip(tmp_path):
    g = erdos_signed(40, 0.2, 0.5, 9)
    cache = DecompositionCache(tmp_path / "c")
    key = cache.key(g.digest(), "B", 4, 1e-8, 0, "eig")
    assert key != cache.key(g.digest(), "B", 4, 1e-8, 1, "eig")
    calls = []

    def compute():
        calls.append(1)
        return truncated_eig_sym(matrix_view(g, "B"), 4)

    first = cache.get_or_compute(key, compute)
    second = cache.get_or_compute(key, compute)
    assert len(calls) == 1
    assert np.array_equal(first.left, second.left) and second.right is second.left
    assert second.kind == "symmetric_eig" and second.source == "B"
    svd = truncated_svd(matrix_view(g, "A"), 3)
    cache.put("svd", svd)
    assert np.array_equal(cache.get("svd").right, svd.right)
    assert cache.get("absent") is None
