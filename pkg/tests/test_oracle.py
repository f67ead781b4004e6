import numpy as np
import pytest
from scipy.linalg import expm

from signednet.clustering import clustering_coefficients
from signednet.errors import UsageError
from signednet.graph import matrix_view
from signednet.oracle import (
    MAX_REFERENCE,
    TASKS,
    densify,
    dense_dominant_eigenvector,
    dense_matrix,
    dense_power_rank,
    dense_reference,
    exp_taylor,
    pinv,
    resistance,
)
from signednet.ranking import mean_average_precision, freaks_negated, ascending_order
from signednet.selfcheck import CHECKS, random_graph, run_self_check
from signednet.synthetic import (
    DEFAULTS,
    MODELS,
    SyntheticSpec,
    erdos_signed,
    generate,
    generate_with_truth,
    planted_balance,
    planted_trolls,
)

from conftest import graph


class TestDense:
    def test_densify_matches_hand_built(self):
        g = erdos_signed(12, 0.3, 0.5, 0)
        for kind in ("A", "B", "Laplacian", "RowStochasticSigned"):
            assert np.array_equal(densify(matrix_view(g, kind)), dense_matrix(g, kind))

    def test_small_example(self):
        g = graph([("a", "b", 1), ("b", "a", -1), ("b", "c", -1)])
        a, b, c = (g.index_of(x) for x in "abc")
        big_b = dense_matrix(g, "B")
        assert big_b[a, b] == 0 and big_b[b, c] == -1
        lap = dense_matrix(g, "Laplacian")
        assert lap[a, a] == 0 and lap[b, b] == 1 and lap[b, c] == 1

    def test_exp_taylor(self):
        assert np.array_equal(exp_taylor(np.zeros((3, 3))), np.eye(3))
        m = dense_matrix(erdos_signed(15, 0.3, 0.5, 1), "B")
        assert np.abs(exp_taylor(m) - expm(m)).max() <= 1e-10 * np.abs(expm(m)).max()

    def test_two_node_pinv(self):
        k = pinv(dense_matrix(graph([("a", "b", 1)]), "Laplacian"))
        assert np.abs(k - np.array([[0.25, -0.25], [-0.25, 0.25]])).max() <= 1e-12
        assert resistance(graph([("a", "b", 1)]))[0, 1] == pytest.approx(1.0, abs=1e-12)

    def test_resistance_of_negative_edge(self):
        # a lone foe edge has Laplacian [[1,1],[1,1]]
        r = resistance(graph([("a", "b", -1)]))
        assert r[0, 1] == pytest.approx(0.0, abs=1e-12)

    def test_power_and_eig_agree(self):
        g = erdos_signed(20, 0.2, 0.9, 2)
        ref = dense_dominant_eigenvector(g, "RowStochasticUnsigned", 0.15)
        assert np.abs(dense_power_rank(g, "RowStochasticUnsigned", 0.15) - ref).max() <= 1e-10

    def test_ill_posed_is_skipped(self):
        # a single foe pair with no teleport flips sign forever
        g = graph([("a", "b", -1), ("b", "a", -1)])
        assert dense_dominant_eigenvector(g, "RowStochasticSigned", 0.0) is None

    def test_dispatch(self):
        g = erdos_signed(10, 0.3, 1.0, 3)
        for task in TASKS:
            assert dense_reference(task, g) is not None
        assert set(dense_reference("clustering", g)) == {"C", "C_s", "S", "C_dir", "C_s_dir", "S_dir"}
        with pytest.raises(UsageError):
            dense_reference("nope", g)

    def test_size_cap(self):
        g = erdos_signed(MAX_REFERENCE + 1, 0.01, 0.5, 0)
        with pytest.raises(UsageError):
            dense_reference("pinv", g)
        with pytest.raises(UsageError):
            dense_power_rank(g, "RowStochasticUnsigned", 0.15)


class TestGenerators:
    def test_noise_free_balance_is_balanced(self):
        g, group = planted_balance(60, 2, 0.3, 0.3, 0.0, 0)
        assert clustering_coefficients(g).S == 1.0
        same = group[g.src] == group[g.dst]
        assert np.array_equal(g.weight > 0, same)

    def test_undefended_trolls_are_found_by_freaks(self):
        g, trolls = planted_trolls(100, 5, 1.0, 4, 0.0, None, 0)
        order = ascending_order(freaks_negated(g).scores)
        assert mean_average_precision(order, set(trolls.tolist())) == 1.0

    def test_marker_and_retaliation(self):
        g, trolls = planted_trolls(200, 4, 0.05, 5, 0.0, "m", 1, p_retaliate=0.5)
        m = g.index_of("m")
        foes = {v for u, v, w in g.edges() if u == m}
        assert foes == set(trolls.tolist())
        out_neg = sum(1 for u, _, w in g.edges() if u in set(trolls.tolist()) and w < 0)
        assert out_neg > 4 * 196 * 0.3

    def test_retaliation_zero_keeps_stream(self):
        a, _ = planted_trolls(200, 4, 0.05, 5, 0.1, None, 2)
        b, _ = planted_trolls(200, 4, 0.05, 5, 0.1, None, 2, p_retaliate=0.0)
        assert list(a.edges()) == list(b.edges())

    def test_determinism(self):
        for model in MODELS:
            spec = SyntheticSpec(model, 80, seed=5)
            assert list(generate(spec).edges()) == list(generate(spec).edges())
        assert list(erdos_signed(50, 0.1, 0.5, 1).edges()) != list(erdos_signed(50, 0.1, 0.5, 2).edges())

    def test_erdos_density_and_bias(self):
        g = erdos_signed(300, 0.05, 0.8, 0)
        assert g.m == pytest.approx(0.05 * 300 * 299, rel=0.05)
        assert (g.weight > 0).mean() == pytest.approx(0.8, abs=0.02)

    def test_truth_and_params(self):
        g, truth = generate_with_truth(SyntheticSpec("planted_balance", 30, 1, {"groups": 3}))
        assert truth.shape == (30,) and set(truth.tolist()) <= {0, 1, 2}
        assert generate_with_truth(SyntheticSpec("erdos_signed", 10))[1] is None
        assert set(DEFAULTS) == set(MODELS)

    @pytest.mark.parametrize("spec", [
        SyntheticSpec("nope", 10),
        SyntheticSpec("erdos_signed", 10, params={"q": 1}),
        SyntheticSpec("erdos_signed", 10, params={"p": 2}),
        SyntheticSpec("erdos_signed", 0),
        SyntheticSpec("planted_balance", 10, params={"groups": 0}),
        SyntheticSpec("planted_trolls", 10, params={"n_trolls": 11}),
        SyntheticSpec("planted_trolls", 10, params={"avg_degree": 20}),
    ])
    def test_bad_params(self, spec):
        with pytest.raises(UsageError):
            generate(spec)


class TestSelfCheck:
    def test_random_graph_ranges(self):
        for seed in range(20):
            g = random_graph(seed)
            assert 4 <= g.n <= 64

    def test_small_run_passes(self):
        result = run_self_check(graphs=5)
        assert result["passed"] and result["graphs"] == 5
        assert set(result["checks"]) == set(CHECKS)
        assert all(c["cases"] > 0 for c in result["checks"].values())

    def test_detects_a_broken_kernel(self, monkeypatch):
        import signednet.spectral as spectral

        real = spectral.signed_two_paths
        monkeypatch.setattr("signednet.selfcheck.signed_two_paths",
                            lambda g, us, vs: real(g, us, vs) + 1.0)
        assert not run_self_check(graphs=2, checks=("two_paths",))["passed"]
