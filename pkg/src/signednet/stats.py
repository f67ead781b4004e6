"""Corpus-level statistics: counts, medians, degree distributions, distances."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numba
import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from .errors import DataError, UsageError
from .graph import SignedDigraph

DEGREE_MODES = ("in", "out", "total", "friend", "foe", "fan", "freak")


@dataclass(frozen=True)
class StatsReport:
    users: int
    links: int
    friend_links: int
    foe_links: int
    sparsity: float
    mean_links: float
    mean_friends: float
    mean_foes: float
    mean_fans: float
    mean_freaks: float
    median_links: int
    median_friends: int
    median_foes: int
    median_fans: int
    median_freaks: int

    def to_dict(self) -> dict:
        return asdict(self)


def _lower_median(values: np.ndarray) -> int:
    ordered = np.sort(values)
    return int(ordered[(ordered.size - 1) // 2])


def basic_stats(g: SignedDigraph) -> StatsReport:
    """Counts, sparsity ``m/n^2``, per-user means and lower medians.

    A user's link count is the number of links they created (out-degree);
    medians run over all ``n`` users, isolated ones included.
    """
    if g.n == 0:
        raise DataError("empty graph")
    n = g.n
    return StatsReport(
        users=n,
        links=g.m,
        friend_links=g.m_pos,
        foe_links=g.m_neg,
        sparsity=g.m / n**2,
        mean_links=g.m / n,
        mean_friends=float(g.friend_count().sum()) / n,
        mean_foes=float(g.foe_count().sum()) / n,
        mean_fans=float(g.fan_count().sum()) / n,
        mean_freaks=float(g.freak_count().sum()) / n,
        median_links=_lower_median(g.out_degree()),
        median_friends=_lower_median(g.friend_count()),
        median_foes=_lower_median(g.foe_count()),
        median_fans=_lower_median(g.fan_count()),
        median_freaks=_lower_median(g.freak_count()),
    )


def node_degrees(g: SignedDigraph, mode: str) -> np.ndarray:
    if mode == "in":
        return g.in_degree()
    if mode == "out":
        return g.out_degree()
    if mode == "total":
        return g.in_degree() + g.out_degree()
    if mode == "friend":
        return g.friend_count()
    if mode == "foe":
        return g.foe_count()
    if mode == "fan":
        return g.fan_count()
    if mode == "freak":
        return g.freak_count()
    raise UsageError(f"unknown degree mode {mode!r}; expected one of {DEGREE_MODES}")


def degree_histogram(g: SignedDigraph, mode: str = "total") -> list[tuple[int, int]]:
    """``(degree, node_count)`` pairs, highest degree first."""
    degrees = node_degrees(g, mode)
    values, counts = np.unique(degrees, return_counts=True)
    return [(int(d), int(c)) for d, c in zip(values[::-1], counts[::-1])]


def degree_scatter(g: SignedDigraph) -> list[tuple[str, int, int]]:
    """Per-node ``(label, in_degree, out_degree)``."""
    return list(zip(g.labels, g.in_degree().tolist(), g.out_degree().tolist()))


# -- distances --------------------------------------------------------------------

@dataclass(frozen=True)
class DistanceReport:
    diameter: int | None
    radius: int | None
    average_distance: float | None
    exact: bool
    sources: int
    component_nodes: int
    component_count: int
    nodes: int
    mean_degree: float
    random_average_distance: float | None
    random_clustering: float | None

    def to_dict(self) -> dict:
        out = asdict(self)
        if not self.exact:
            out["diameter_lower_bound"] = out.pop("diameter")
            out["radius_upper_bound"] = out.pop("radius")
        return out


def undirected_simple(g: SignedDigraph) -> sp.csr_matrix:
    """Symmetric 0/1 adjacency ignoring direction and sign."""
    a = abs(g.adjacency)
    u = (a + a.T).tocsr()
    u.data[:] = 1.0
    return u


@numba.njit(parallel=True, cache=True)
def _bfs_sources(indptr, indices, sources, n):
    ecc = np.zeros(sources.size, dtype=np.int64)
    total = np.zeros(sources.size, dtype=np.int64)
    reached = np.zeros(sources.size, dtype=np.int64)
    for t in numba.prange(sources.size):
        dist = np.full(n, -1, dtype=np.int64)
        queue = np.empty(n, dtype=np.int64)
        s = sources[t]
        dist[s] = 0
        queue[0] = s
        head = 0
        tail = 1
        while head < tail:
            x = queue[head]
            head += 1
            dx = dist[x] + 1
            for p in range(indptr[x], indptr[x + 1]):
                y = indices[p]
                if dist[y] < 0:
                    dist[y] = dx
                    queue[tail] = y
                    tail += 1
        ecc[t] = dist[queue[tail - 1]]
        acc = 0
        for i in range(tail):
            acc += dist[queue[i]]
        total[t] = acc
        reached[t] = tail - 1
    return ecc, total, reached


def bfs_eccentricities(adj: sp.csr_matrix, sources: np.ndarray):
    """Eccentricity, distance sum and reached count per BFS source."""
    adj = adj.tocsr()
    return _bfs_sources(
        adj.indptr.astype(np.int64), adj.indices.astype(np.int64),
        np.asarray(sources, dtype=np.int64), adj.shape[0],
    )


def largest_component(adj: sp.csr_matrix) -> tuple[np.ndarray, int]:
    """Node indices of the largest connected component (ties: lowest label id)."""
    count, labels = csgraph.connected_components(adj, directed=False)
    sizes = np.bincount(labels, minlength=count)
    best = int(np.argmax(sizes))
    return np.flatnonzero(labels == best), count


def distance_stats(
    g: SignedDigraph,
    sample: int | None = None,
    seed: int = 0,
) -> DistanceReport:
    """Diameter, radius and mean shortest-path length.

    Computed on the largest connected component of the graph with edge
    direction and sign dropped. ``sample`` BFS sources (seeded) replace the
    exhaustive sweep; then diameter and radius are only bounds. Random-graph
    references use the mean degree ``k`` of the symmetrized simple graph:
    ``ln(n)/ln(k)`` for distance and ``k/n`` for clustering.
    """
    if g.n == 0:
        raise DataError("empty graph")
    adj = undirected_simple(g)
    nodes, count = largest_component(adj)
    sub = adj[nodes][:, nodes].tocsr()
    size = nodes.size
    if sample is not None and sample < 1:
        raise UsageError("sample must be a positive number of sources")
    exact = sample is None or sample >= size
    if exact:
        sources = np.arange(size)
    else:
        rng = np.random.default_rng(seed)
        sources = np.sort(rng.choice(size, size=sample, replace=False))
    ecc, total, reached = bfs_eccentricities(sub, sources)

    k_mean = adj.nnz / g.n
    rand_dist = math.log(g.n) / math.log(k_mean) if k_mean > 1 and g.n > 1 else None
    pairs = int(reached.sum())
    return DistanceReport(
        diameter=int(ecc.max()),
        radius=int(ecc.min()),
        average_distance=int(total.sum()) / pairs if pairs else None,
        exact=exact,
        sources=int(sources.size),
        component_nodes=int(size),
        component_count=int(count),
        nodes=g.n,
        mean_degree=k_mean,
        random_average_distance=rand_dist,
        random_clustering=k_mean / g.n,
    )
