"""Node popularity and centrality measures, and the troll-finding benchmark."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, DataWarning, UsageError
from .graph import SignedDigraph, matrix_view
from .spectral import dominant_left_eigenvector, truncated_eig_sym

MEASURES = (
    "freaks_negated", "fmf", "pagerank", "signed_spectral", "signed_symmetric", "negative_rank",
)
DEFAULT_ALPHA = 0.15
DEFAULT_BETA = 1.0
DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class RankVector:
    measure: str
    scores: np.ndarray = field(repr=False)
    normalization: str
    params: dict = field(default_factory=dict)

    def top(self, count: int) -> np.ndarray:
        """Indices of the ``count`` highest scores (ties: lower index first)."""
        order = np.lexsort((np.arange(self.scores.size), -self.scores))
        return order[:count]

    def bottom(self, count: int) -> np.ndarray:
        return ascending_order(self.scores)[:count]


def ascending_order(scores: np.ndarray) -> np.ndarray:
    """Most unpopular first; ties broken by ascending node index."""
    return np.lexsort((np.arange(scores.size), scores))


def freaks_negated(g: SignedDigraph) -> RankVector:
    return RankVector("freaks_negated", -g.freak_count().astype(float), "raw")


def fans_minus_freaks(g: SignedDigraph) -> RankVector:
    """Column sums of ``A``: positive minus negative in-edges."""
    return RankVector("fmf", (g.fan_count() - g.freak_count()).astype(float), "raw")


def pagerank(g: SignedDigraph, alpha: float = DEFAULT_ALPHA, tol: float = DEFAULT_TOL,
             max_iter: int = 10_000) -> RankVector:
    x = dominant_left_eigenvector(matrix_view(g, "RowStochasticUnsigned"), alpha, tol, max_iter)
    return RankVector("pagerank", x, "unit_euclidean", {"alpha": alpha})


def signed_spectral_rank(g: SignedDigraph, alpha: float = DEFAULT_ALPHA, tol: float = DEFAULT_TOL,
                         max_iter: int = 10_000) -> RankVector:
    x = dominant_left_eigenvector(matrix_view(g, "RowStochasticSigned"), alpha, tol, max_iter)
    return RankVector("signed_spectral", x, "unit_euclidean", {"alpha": alpha})


def signed_symmetric_rank(
    g: SignedDigraph,
    alpha: float = DEFAULT_ALPHA,
    tol: float = DEFAULT_TOL,
    max_iter: int = 10_000,
    stochastic: bool = True,
) -> RankVector:
    """Spectral rank on ``B = A + A^T``.

    By default ``B`` is normalized by its absolute degrees and teleported
    like the directed measures. With ``stochastic=False`` the plain
    dominant (largest algebraic) eigenvector of ``B`` is returned instead.
    """
    if stochastic:
        x = dominant_left_eigenvector(matrix_view(g, "RowStochasticSymmetric"), alpha, tol, max_iter)
        return RankVector("signed_symmetric", x, "unit_euclidean", {"alpha": alpha})
    dec = truncated_eig_sym(matrix_view(g, "B"), 1, tol=tol, which="largest_algebraic")
    x = dec.left[:, 0].copy()
    if x.sum() < 0:
        x = -x
    return RankVector("signed_symmetric", x, "unit_euclidean", {"stochastic": False})


def negative_rank(g: SignedDigraph, alpha: float = DEFAULT_ALPHA, beta: float = DEFAULT_BETA,
                  tol: float = DEFAULT_TOL, max_iter: int = 10_000,
                  sr: RankVector | None = None, pr: RankVector | None = None) -> RankVector:
    """``SR - beta * PR`` over unit-length signed spectral rank and PageRank."""
    if beta < 0:
        raise UsageError(f"beta must be non-negative, got {beta}")
    sr = sr or signed_spectral_rank(g, alpha, tol, max_iter)
    if beta == 0:
        scores = sr.scores.copy()
    else:
        pr = pr or pagerank(g, alpha, tol, max_iter)
        scores = sr.scores - beta * pr.scores
    return RankVector("negative_rank", scores, "raw", {"alpha": alpha, "beta": beta})


def compute_measure(g: SignedDigraph, measure: str, alpha: float = DEFAULT_ALPHA,
                    beta: float = DEFAULT_BETA, tol: float = DEFAULT_TOL) -> RankVector:
    if measure == "freaks_negated":
        return freaks_negated(g)
    if measure == "fmf":
        return fans_minus_freaks(g)
    if measure == "pagerank":
        return pagerank(g, alpha, tol)
    if measure == "signed_spectral":
        return signed_spectral_rank(g, alpha, tol)
    if measure == "signed_symmetric":
        return signed_symmetric_rank(g, alpha, tol)
    if measure == "negative_rank":
        return negative_rank(g, alpha, beta, tol)
    raise UsageError(f"unknown measure {measure!r}; expected one of {MEASURES}")


# -- evaluation -----------------------------------------------------------------

def average_precision(ranked: np.ndarray, relevant) -> float:
    """Mean over relevant items of the precision at their rank."""
    relevant = set(int(r) for r in relevant)
    if not relevant:
        raise DataError("relevant set is empty")
    hits = np.isin(np.asarray(ranked), list(relevant))
    positions = np.flatnonzero(hits) + 1
    if positions.size == 0:
        return 0.0
    precision = np.arange(1, positions.size + 1) / positions
    return float(precision.sum() / len(relevant))


def mean_average_precision(ranked_list, relevant_set) -> float:
    """MAP of a single ranked list; equals its average precision."""
    return average_precision(np.asarray(ranked_list), relevant_set)


def random_ranking_map(n_candidates: int, n_relevant: int) -> float:
    """Expected average precision of a uniformly random ranking."""
    if not 0 < n_relevant <= n_candidates:
        raise DataError("need 0 < relevant <= candidates")
    harmonic = float(np.sum(1.0 / np.arange(1, n_candidates + 1)))
    if n_candidates == 1:
        return 1.0
    return (harmonic + (n_relevant - 1) / (n_candidates - 1) * (n_candidates - harmonic)) / n_candidates


def score_map(scores: np.ndarray, relevant, candidates: np.ndarray) -> float:
    """MAP of ``relevant`` when ``candidates`` are ranked by ascending score."""
    order = candidates[ascending_order(scores[candidates])]
    return average_precision(order, relevant)


@dataclass(frozen=True)
class TrollBenchmark:
    marker: str
    min_incident: int
    trolls: tuple[int, ...]
    excluded_edges: int


def build_troll_benchmark(g: SignedDigraph, marker_label: str, min_incident: int = 20):
    """Trolls = negative out-neighbours of the marker with enough edges left.

    Returns the benchmark and the graph with every edge touching the marker
    removed (node set unchanged). Incident edges are counted in that graph.
    """
    marker = g.index_of(marker_label)
    excluded = g.without_node_edges(marker)
    foes = g.dst[(g.src == marker) & (g.weight < 0)]
    incident = excluded.in_degree() + excluded.out_degree()
    trolls = tuple(int(v) for v in foes if incident[v] >= min_incident)
    if foes.size == 0:
        warnings.warn(f"marker {marker_label!r} has no foes", DataWarning, stacklevel=2)
    bench = TrollBenchmark(marker_label, min_incident, trolls, g.m - excluded.m)
    return bench, excluded


def parse_sweep(spec: str) -> list[float]:
    """``start:stop:step`` inclusive of ``stop`` (within rounding)."""
    try:
        start, stop, step = (float(x) for x in spec.split(":"))
    except ValueError:
        raise UsageError(f"sweep must look like start:stop:step, got {spec!r}") from None
    if step <= 0 or stop < start:
        raise UsageError(f"invalid sweep {spec!r}")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def evaluate_troll_prediction(
    g: SignedDigraph,
    marker: str,
    measures=MEASURES,
    alpha: float = DEFAULT_ALPHA,
    beta: float = DEFAULT_BETA,
    min_incident: int = 20,
    betas=None,
    tol: float = DEFAULT_TOL,
) -> dict:
    """MAP of each measure at ranking the marker's foes as least popular.

    All measures are computed on the graph without the marker's edges;
    candidates are every node except the marker. ``betas`` adds a
    Negative Rank sweep.
    """
    bench, excluded = build_troll_benchmark(g, marker, min_incident)
    marker_idx = g.index_of(marker)
    candidates = np.array([i for i in range(g.n) if i != marker_idx], dtype=np.int64)
    result = {
        "marker": marker,
        "min_incident": min_incident,
        "trolls": len(bench.trolls),
        "candidates": int(candidates.size),
        "excluded_edges": bench.excluded_edges,
        "alpha": alpha,
        "beta": beta,
        "map": {},
    }
    if not bench.trolls:
        warnings.warn("troll set is empty; MAP undefined", DataWarning, stacklevel=2)
        result["map"] = {m: None for m in measures}
        result["random"] = None
        return result

    cache: dict[str, RankVector] = {}

    def get(name: str) -> RankVector:
        if name not in cache:
            if name == "negative_rank":
                cache[name] = negative_rank(excluded, alpha, beta, tol,
                                            sr=get("signed_spectral"), pr=get("pagerank"))
            else:
                cache[name] = compute_measure(excluded, name, alpha, beta, tol)
        return cache[name]

    for name in measures:
        result["map"][name] = score_map(get(name).scores, bench.trolls, candidates)
    result["random"] = random_ranking_map(candidates.size, len(bench.trolls))
    if betas is not None:
        sr, pr = get("signed_spectral"), get("pagerank")
        result["beta_sweep"] = [
            {"beta": b, "map": score_map(sr.scores - b * pr.scores, bench.trolls, candidates)}
            for b in betas
        ]
    return result
