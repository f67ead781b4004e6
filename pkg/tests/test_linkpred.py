import numpy as np
import pytest

from signednet.errors import DataError, UsageError
from signednet.linkpred import (
    METHODS,
    SPECTRAL_METHODS,
    Predictor,
    evaluate_accuracy,
    evaluate_split,
    make_predictor,
    parse_k_list,
    predict_sign,
    split_edges,
    sweep_k,
)
from signednet.oracle import dense_matrix, exp_taylor, matrix_square
from signednet.spectral import DecompositionCache
from signednet.synthetic import erdos_signed, planted_balance

from conftest import graph


def chain(m):
    return graph([(f"v{i}", f"v{i + 1}", 1 if i % 3 else -1) for i in range(m)])


class TestSplit:
    def test_sizes(self):
        s = split_edges(chain(10), 0.3, seed=0)
        assert s.test_size == 3 and s.train.m == 7 and s.train.n == 11

    def test_half_rounds_up(self):
        assert split_edges(chain(5), 0.5, 0).test_size == 3

    def test_partition_and_determinism(self):
        g = erdos_signed(50, 0.1, 0.6, 1)
        a, b = split_edges(g, 0.3, 7), split_edges(g, 0.3, 7)
        assert a.test_edges() == b.test_edges()
        train = set(a.train.edges())
        test = set(a.test_edges())
        assert not train & test and train | test == set(g.edges())
        assert split_edges(g, 0.3, 8).test_edges() != a.test_edges()

    def test_hold_out_frequency(self):
        g = chain(40)
        counts = np.zeros(g.m)
        index = {(u, v): i for i, (u, v, _) in enumerate(g.edges())}
        for seed in range(100):
            for u, v, _ in split_edges(g, 0.3, seed).test_edges():
                counts[index[(u, v)]] += 1
        assert np.all(np.abs(counts / 100 - 0.3) <= 0.15)
        assert abs(counts.mean() / 100 - 0.3) <= 0.05

    def test_errors(self):
        with pytest.raises(UsageError):
            split_edges(chain(10), 1.0)
        with pytest.raises(DataError):
            split_edges(chain(3), 0.1)
        with pytest.raises(DataError):
            split_edges(chain(3), 0.9)


class TestBaselines:
    def test_always_positive(self):
        p = make_predictor(chain(4), "always_positive")
        assert all(predict_sign(p, u, v) == 1 for u in range(5) for v in range(5))

    def test_transpose(self):
        g = graph([("b", "a", -1), ("c", "a", 1)])
        p = make_predictor(g, "transpose")
        a, b, c = (g.index_of(x) for x in "abc")
        assert p.score(a, b) == -1 and p.score(a, c) == 1 and p.score(b, c) == 1
        assert predict_sign(p, a, b) == -1

    def test_square_enemy_of_friend(self):
        g = graph([("a", "c", 1), ("c", "b", -1)])
        p = make_predictor(g, "square")
        a, b = g.index_of("a"), g.index_of("b")
        assert p.score(a, b) == -1 and predict_sign(p, b, a) == 1

    def test_square_agrees_with_dense(self):
        g = erdos_signed(40, 0.2, 0.5, 3)
        us, vs = np.divmod(np.arange(1600), 40)
        p = make_predictor(g, "square")
        dense = matrix_square(g)
        assert np.array_equal(p.predict(us, vs).reshape(40, 40), np.where(dense < 0, -1, 1))

    def test_errors(self):
        g = chain(4)
        with pytest.raises(UsageError):
            make_predictor(g, "oracle")
        with pytest.raises(UsageError):
            make_predictor(g, "svd")
        with pytest.raises(IndexError):
            make_predictor(g, "transpose").scores([0], [99])
        with pytest.raises(UsageError):
            make_predictor(g, "square").scores([0], [1, 2])


class TestKernelPredictors:
    def test_negative_score_predicts_minus(self):
        class Fixed(Predictor):
            def scores(self, us, vs):
                return np.full(len(us), -0.03)

        assert predict_sign(Fixed("fixed", chain(2)), 0, 1) == -1

    def test_unseen_node_defaults_to_positive(self):
        g = graph([("a", "b", -1), ("b", "c", -1), ("c", "a", 1)], labels=["a", "b", "c", "new"])
        p = make_predictor(g, "svd", 2)
        new = g.index_of("new")
        assert p.score(new, 0) == 0.0 and predict_sign(p, new, 0) == 1

    def test_sym_exp_full_rank_matches_taylor(self):
        g, _ = planted_balance(10, 2, 0.6, 0.6, 0.2, 1)
        p = make_predictor(g, "sym_exp", 10)
        us, vs = np.divmod(np.arange(100), 10)
        ref = exp_taylor(dense_matrix(g, "B"))
        scores = p.scores(us, vs).reshape(10, 10)
        assert np.abs(scores - ref).max() <= 1e-6 * np.abs(ref).max()
        assert np.array_equal(np.where(scores < 0, -1, 1), np.where(ref < 0, -1, 1))

    def test_svd_at_rank_reproduces_train_signs(self):
        g = erdos_signed(30, 0.15, 0.5, 2)
        rank = np.linalg.matrix_rank(dense_matrix(g, "A"))
        p = make_predictor(g, "svd", int(rank), tol=1e-12)
        scores = p.scores(g.src, g.dst)
        big = np.abs(scores) > 1e-8
        assert np.array_equal(np.sign(scores[big]), g.weight[big].astype(float))

    def test_laplacian_kernel_symmetric(self):
        g = erdos_signed(40, 0.15, 0.6, 3)
        p = make_predictor(g, "laplacian", 10)
        us, vs = np.divmod(np.arange(1600), 40)
        assert np.abs(p.scores(us, vs) - p.scores(vs, us)).max() <= 1e-10

    def test_all_methods_build(self):
        g = erdos_signed(30, 0.2, 0.6, 4)
        for method in METHODS:
            p = make_predictor(g, method, 4 if method in SPECTRAL_METHODS else None)
            assert p.scores([0, 1], [2, 3]).shape == (2,)

    def test_cache_reuse(self, tmp_path):
        g = erdos_signed(60, 0.1, 0.6, 5)
        cache = DecompositionCache(tmp_path)
        a = make_predictor(g, "sym", 5, cache=cache)
        files = sorted(tmp_path.iterdir())
        b = make_predictor(g, "sym", 5, cache=cache)
        assert sorted(tmp_path.iterdir()) == files and len(files) == 1
        assert np.array_equal(a.kernel.left, b.kernel.left)


class TestAccuracy:
    def test_extremes(self):
        g = graph([("a", "b", 1), ("b", "c", 1)])
        p = make_predictor(g, "always_positive")
        assert evaluate_accuracy(p, [0, 1], [1, 2], [1, 1]).accuracy == 1.0
        assert evaluate_accuracy(p, [0, 1], [1, 2], [-1, -1]).accuracy == -1.0
        with pytest.raises(DataError):
            evaluate_accuracy(p, [], [], [])

    def test_always_positive_closed_form(self):
        g = erdos_signed(80, 0.1, 0.7, 6)
        s = split_edges(g, 0.3, 1)
        r = evaluate_split(s, make_predictor(s.train, "always_positive"))
        pos = int((s.test_sign > 0).sum())
        neg = s.test_size - pos
        assert r.accuracy == (pos - neg) / (pos + neg)
        assert r.correct + r.wrong == r.total == s.test_size
        assert r.accuracy == (r.correct - r.wrong) / r.total
        assert r.ties == 0 and r.split["seed"] == 1

    def test_ties_counted(self):
        g = graph([("a", "b", 1)], labels=["a", "b", "c"])
        r = evaluate_accuracy(make_predictor(g, "square"), [0, 2], [2, 0], [-1, 1])
        assert (r.ties, r.correct, r.wrong) == (2, 1, 1)

    def test_reproducible_pipeline(self):
        g = erdos_signed(100, 0.08, 0.6, 7)
        reports = []
        for _ in range(2):
            s = split_edges(g, 0.3, 3)
            reports.append(evaluate_split(s, make_predictor(s.train, "exp", 6)).to_dict())
        assert reports[0] == reports[1]


class TestSweep:
    def test_noise_free_balance_is_learned(self):
        g, _ = planted_balance(300, 2, 0.2, 0.2, 0.0, 0)
        s = split_edges(g, 0.3, 0)
        acc = {r.k: r.accuracy for r in sweep_k(s, ["sym"], [1, 2, 4])}
        assert acc[1] == 1.0
        assert acc[2] >= 0.99 and acc[4] > 0.9

    def test_sweep_equals_individual_truncations(self):
        g, _ = planted_balance(200, 2, 0.1, 0.1, 0.1, 1)
        s = split_edges(g, 0.3, 1)
        reports = sweep_k(s, ["svd", "exp"], [8, 2, 4])
        assert [(r.method, r.k) for r in reports] == [
            ("svd", 2), ("svd", 4), ("svd", 8), ("exp", 2), ("exp", 4), ("exp", 8)]
        again = sweep_k(s, ["svd", "exp"], [2, 4, 8])
        assert [r.to_dict() for r in reports] == [r.to_dict() for r in again]

    def test_rank_one_structure_peaks_at_k_one(self):
        g, _ = planted_balance(400, 2, 0.05, 0.05, 0.05, 2)
        s = split_edges(g, 0.3, 2)
        acc = [r.accuracy for r in sweep_k(s, ["sym"], [1, 2, 4, 8, 16])]
        assert acc[0] >= max(acc) - 0.01

    def test_errors(self):
        s = split_edges(chain(10), 0.3, 0)
        with pytest.raises(UsageError):
            sweep_k(s, ["square"], [1])
        with pytest.raises(UsageError):
            sweep_k(s, ["svd"], [0])


def test_parse_k_list():
    assert parse_k_list("1,2, 4") == [1, 2, 4]
    with pytest.raises(UsageError):
        parse_k_list("1,x")
    with pytest.raises(UsageError):
        parse_k_list("")
