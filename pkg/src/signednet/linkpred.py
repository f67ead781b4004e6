"""Link-sign prediction: hold-out splits, baseline and kernel predictors, accuracy."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, UsageError
from .graph import SignedDigraph, matrix_view
from .spectral import (
    DecompositionCache,
    SpectralDecomposition,
    TransformedKernel,
    kernel_scores,
    signed_two_paths,
    spectral_transform,
    truncated_eig_sym,
    truncated_svd,
)

METHODS = ("always_positive", "transpose", "square", "svd", "sym", "exp", "sym_exp", "laplacian")
SPECTRAL_METHODS = ("svd", "sym", "exp", "sym_exp", "laplacian")

# method -> (view kind, decomposition, eig order, transform)
_SPECTRAL = {
    "svd": ("A", "svd", None, "identity"),
    "exp": ("A", "svd", None, "exponential"),
    "sym": ("B", "eig", "largest_magnitude", "identity"),
    "sym_exp": ("B", "eig", "largest_magnitude", "exponential"),
    "laplacian": ("Laplacian", "eig", "smallest_algebraic", "pseudoinverse"),
}


@dataclass(frozen=True)
class EdgeSplit:
    train: SignedDigraph
    test_src: np.ndarray = field(repr=False)
    test_dst: np.ndarray = field(repr=False)
    test_sign: np.ndarray = field(repr=False)
    fraction: float
    seed: int

    @property
    def test_size(self) -> int:
        return int(self.test_src.size)

    def test_edges(self) -> list[tuple[int, int, int]]:
        return list(zip(self.test_src.tolist(), self.test_dst.tolist(), self.test_sign.tolist()))

    def metadata(self) -> dict:
        return {
            "fraction": self.fraction, "seed": self.seed,
            "train_edges": self.train.m, "test_edges": self.test_size,
        }


def split_edges(g: SignedDigraph, fraction: float = 0.3, seed: int = 0) -> EdgeSplit:
    """Hold out ``round(fraction * m)`` directed edges uniformly at random.

    The train graph keeps every node, so endpoints of held-out edges stay
    addressable even when they lose all their train edges.
    """
    if not 0 < fraction < 1:
        raise UsageError(f"fraction must lie in (0, 1), got {fraction}")
    size = int(np.floor(fraction * g.m + 0.5))
    if size == 0 or size == g.m:
        raise DataError(f"fraction {fraction} on {g.m} edges leaves an empty test or train set")
    rng = np.random.default_rng(seed)
    held = np.zeros(g.m, dtype=bool)
    held[rng.choice(g.m, size=size, replace=False)] = True
    return EdgeSplit(
        train=g.edge_subgraph(~held),
        test_src=g.src[held].copy(), test_dst=g.dst[held].copy(),
        test_sign=g.weight[held].astype(np.int64),
        fraction=fraction, seed=seed,
    )


class Predictor:
    """Scores ordered node pairs of the train graph; the sign is the prediction."""

    def __init__(self, method: str, graph: SignedDigraph, k: int | None = None,
                 kernel: TransformedKernel | None = None, params: dict | None = None):
        self.method = method
        self.graph = graph
        self.k = k
        self.kernel = kernel
        self.params = params or {}
        self._lonely = None

    def scores(self, us, vs) -> np.ndarray:
        us = np.asarray(us, dtype=np.int64)
        vs = np.asarray(vs, dtype=np.int64)
        if us.shape != vs.shape:
            raise UsageError("us and vs must have the same length")
        n = self.graph.n
        if us.size and (min(us.min(), vs.min()) < 0 or max(us.max(), vs.max()) >= n):
            raise IndexError(f"node index out of range for n={n}")
        if self.method == "always_positive":
            return np.ones(us.size)
        if self.method == "transpose":
            if us.size == 0:
                return np.zeros(0)
            reverse = np.asarray(self.graph.adjacency[vs, us]).ravel()
            return np.where(reverse != 0, reverse, 1.0)
        if self.method == "square":
            return signed_two_paths(self.graph, us, vs)
        scores = kernel_scores(self.kernel, us, vs)
        # A node without train edges has an exactly zero kernel row off the
        # diagonal; Krylov round-off would otherwise pick its sign.
        lonely = self._isolated()
        scores[(lonely[us] | lonely[vs]) & (us != vs)] = 0.0
        return scores

    def _isolated(self) -> np.ndarray:
        if self._lonely is None:
            self._lonely = (self.graph.in_degree() + self.graph.out_degree()) == 0
        return self._lonely

    def score(self, u: int, v: int) -> float:
        return float(self.scores([u], [v])[0])

    def predict(self, us, vs) -> np.ndarray:
        """Predicted signs; a score of exactly zero predicts +1."""
        return np.where(self.scores(us, vs) < 0, -1, 1)


def _decompose(train: SignedDigraph, method: str, k: int, tol: float, seed: int,
               max_iter: int, cache: DecompositionCache | None) -> SpectralDecomposition:
    kind, algo, which, _ = _SPECTRAL[method]
    view = matrix_view(train, kind)

    def compute():
        if algo == "svd":
            return truncated_svd(view, k, tol=tol, max_iter=max_iter, seed=seed)
        return truncated_eig_sym(view, k, tol=tol, max_iter=max_iter, seed=seed, which=which)

    if cache is None:
        return compute()
    label = algo if which is None else f"{algo}:{which}"
    return cache.get_or_compute(cache.key(train.digest(), kind, k, tol, seed, label), compute)


def predictor_from_decomposition(train: SignedDigraph, method: str,
                                 dec: SpectralDecomposition) -> Predictor:
    kernel = spectral_transform(dec, _SPECTRAL[method][3])
    return Predictor(method, train, dec.k, kernel)


def make_predictor(
    train: SignedDigraph,
    method: str,
    k: int | None = None,
    tol: float = 1e-8,
    seed: int = 0,
    max_iter: int = 500,
    cache: DecompositionCache | None = None,
) -> Predictor:
    if method not in METHODS:
        raise UsageError(f"unknown method {method!r}; expected one of {METHODS}")
    if method not in SPECTRAL_METHODS:
        return Predictor(method, train)
    if k is None:
        raise UsageError(f"method {method!r} needs k")
    dec = _decompose(train, method, k, tol, seed, max_iter, cache)
    pred = predictor_from_decomposition(train, method, dec)
    pred.params = {"tol": tol, "seed": seed}
    return pred


def predict_sign(pred: Predictor, u: int, v: int) -> int:
    return int(pred.predict([u], [v])[0])


@dataclass(frozen=True)
class AccuracyReport:
    method: str
    k: int | None
    accuracy: float
    correct: int
    wrong: int
    ties: int
    total: int
    split: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "method": self.method, "k": self.k, "accuracy": self.accuracy,
            "correct": self.correct, "wrong": self.wrong, "ties": self.ties,
            "total": self.total, "split": dict(self.split),
        }


def evaluate_accuracy(pred: Predictor, test_src, test_dst, test_sign,
                      split: dict | None = None) -> AccuracyReport:
    """``(correct - wrong) / total`` over held-out edges, ties predicted +1."""
    test_sign = np.asarray(test_sign)
    if test_sign.size == 0:
        raise DataError("empty test set")
    scores = pred.scores(test_src, test_dst)
    guess = np.where(scores < 0, -1, 1)
    correct = int(np.count_nonzero(guess == test_sign))
    total = int(test_sign.size)
    wrong = total - correct
    return AccuracyReport(
        method=pred.method, k=pred.k, accuracy=(correct - wrong) / total,
        correct=correct, wrong=wrong, ties=int(np.count_nonzero(scores == 0)),
        total=total, split=split or {},
    )


def evaluate_split(split: EdgeSplit, pred: Predictor) -> AccuracyReport:
    return evaluate_accuracy(pred, split.test_src, split.test_dst, split.test_sign,
                             split.metadata())


def sweep_k(split: EdgeSplit, methods, k_values, tol: float = 1e-8, seed: int = 0,
            max_iter: int = 500, cache: DecompositionCache | None = None) -> list[AccuracyReport]:
    """One report per (method, k), truncating a single decomposition at max(k)."""
    k_values = sorted(set(int(k) for k in k_values))
    if not k_values or k_values[0] < 1:
        raise UsageError("k values must be positive")
    reports = []
    for method in methods:
        if method not in SPECTRAL_METHODS:
            raise UsageError(f"sweep_k needs a spectral method, got {method!r}")
        full = _decompose(split.train, method, k_values[-1], tol, seed, max_iter, cache)
        for k in k_values:
            pred = predictor_from_decomposition(split.train, method, full.truncate(k))
            reports.append(evaluate_split(split, pred))
    return reports


def parse_k_list(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"k list must be comma-separated integers, got {text!r}") from None
    if not values:
        raise UsageError("empty k list")
    return values
