"""Production-versus-dense-reference comparisons on random small graphs."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import oracle
from .clustering import OracleMismatch, clustering_oracle_check
from .errors import ConvergenceError
from .graph import VIEW_KINDS, SignedDigraph, matrix_view
from .ranking import pagerank, signed_spectral_rank, signed_symmetric_rank
from .spectral import signed_two_paths, spectral_transform, truncated_eig_sym, truncated_svd
from .synthetic import erdos_signed

TOLERANCES = {
    "clustering": 0.0,
    "views": 1e-12,
    "two_paths": 0.0,
    "rank": 1e-8,
    "svd": 1e-8,
    "eig": 1e-8,
    "exp": 1e-6,
    "laplacian": 1e-6,
}
CHECKS = tuple(TOLERANCES)


@dataclass
class CheckResult:
    name: str
    tolerance: float
    cases: int = 0
    skipped: int = 0
    failures: list = field(default_factory=list)
    worst: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def record(self, seed: int, error: float, label: str = "") -> None:
        self.cases += 1
        self.worst = max(self.worst, error)
        if not error <= self.tolerance:
            self.failures.append(f"seed {seed}{' ' + label if label else ''}: error {error:.3g}")

    def to_dict(self) -> dict:
        return {
            "passed": self.passed, "tolerance": self.tolerance, "cases": self.cases,
            "skipped": self.skipped, "worst": self.worst, "failures": self.failures[:10],
        }


def random_graph(seed: int) -> SignedDigraph:
    """Size, density and sign balance all drawn from ``seed``."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 65))
    p = float(rng.uniform(0.02, 0.5))
    sign_bias = float(rng.uniform(0.0, 1.0))
    return erdos_signed(n, p, sign_bias, seed)


def _rel(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(1.0, float(np.abs(b).max(initial=0.0)))
    return float(np.abs(a - b).max(initial=0.0)) / scale


def _check_clustering(g, seed, res):
    for diag in (False, True):
        try:
            clustering_oracle_check(g, include_diagonal=diag)
            res.record(seed, 0.0)
        except OracleMismatch as exc:
            res.record(seed, np.inf, str(exc))


def _check_views(g, seed, res):
    rng = np.random.default_rng(seed)
    probes = rng.standard_normal((g.n, 100))
    for kind in VIEW_KINDS:
        dense = oracle.dense_matrix(g, kind)
        got = matrix_view(g, kind).matmat(probes)
        res.record(seed, _rel(got, dense @ probes), kind)


def _check_two_paths(g, seed, res):
    us, vs = np.divmod(np.arange(g.n * g.n), g.n)
    got = signed_two_paths(g, us, vs).reshape(g.n, g.n)
    res.record(seed, float(np.abs(got - oracle.matrix_square(g)).max()))


def _check_rank(g, seed, res):
    for fn, kind in ((pagerank, "RowStochasticUnsigned"),
                     (signed_spectral_rank, "RowStochasticSigned"),
                     (signed_symmetric_rank, "RowStochasticSymmetric")):
        ref = oracle.dense_dominant_eigenvector(g, kind, 0.15)
        if ref is None:
            res.skipped += 1
            continue
        try:
            got = fn(g, 0.15, tol=1e-12, max_iter=20_000).scores
        except ConvergenceError:
            res.record(seed, np.inf, f"{kind} did not converge")
            continue
        res.record(seed, float(np.abs(got - ref).max()), kind)


def _check_svd(g, seed, res):
    a = oracle.dense_matrix(g, "A")
    dec = truncated_svd(matrix_view(g, "A"), g.n, seed=seed)
    ref = np.linalg.svd(a, compute_uv=False)
    res.record(seed, max(_rel(dec.reconstruct(), a), _rel(dec.spectrum, ref)))


def _check_eig(g, seed, res):
    b = oracle.dense_matrix(g, "B")
    dec = truncated_eig_sym(matrix_view(g, "B"), g.n, seed=seed)
    ref = np.sort(np.linalg.eigvalsh(b))
    res.record(seed, max(_rel(dec.reconstruct(), b), _rel(np.sort(dec.spectrum), ref)))


def _check_exp(g, seed, res):
    # Symmetric: the exponential kernel of B is the true exp(B).
    b = oracle.dense_matrix(g, "B")
    dec = truncated_eig_sym(matrix_view(g, "B"), g.n, seed=seed)
    got = spectral_transform(dec, "exponential").dense()
    ref = oracle.exp_taylor(b)
    res.record(seed, float(np.abs(got - ref).max()) / float(np.abs(ref).max()), "sym")
    # Asymmetric: U exp(S) V^T is only unique for distinct, nonzero singular values.
    a = oracle.dense_matrix(g, "A")
    u, s, vt = np.linalg.svd(a)
    gaps = np.abs(np.diff(s))
    if s[-1] <= 1e-6 * s[0] or (gaps.size and gaps.min() <= 1e-6 * s[0]):
        res.skipped += 1
        return
    ref = (u * np.exp(s)) @ vt
    dec = truncated_svd(matrix_view(g, "A"), g.n, seed=seed)
    got = spectral_transform(dec, "exponential").dense()
    res.record(seed, float(np.abs(got - ref).max()) / float(np.abs(ref).max()), "svd")


def _check_laplacian(g, seed, res):
    lap = oracle.dense_matrix(g, "Laplacian")
    dec = truncated_eig_sym(matrix_view(g, "Laplacian"), g.n, seed=seed,
                            which="smallest_algebraic")
    got = spectral_transform(dec, "pseudoinverse").dense()
    ref = oracle.pinv(lap)
    res.record(seed, _rel(got, ref))


_RUNNERS = {
    "clustering": _check_clustering,
    "views": _check_views,
    "two_paths": _check_two_paths,
    "rank": _check_rank,
    "svd": _check_svd,
    "eig": _check_eig,
    "exp": _check_exp,
    "laplacian": _check_laplacian,
}


def run_self_check(graphs: int = 50, first_seed: int = 0, checks=CHECKS) -> dict:
    """Run each check on ``graphs`` random graphs with consecutive seeds."""
    results = {name: CheckResult(name, TOLERANCES[name]) for name in checks}
    start = time.perf_counter()
    for seed in range(first_seed, first_seed + graphs):
        g = random_graph(seed)
        for name in checks:
            _RUNNERS[name](g, seed, results[name])
    elapsed = time.perf_counter() - start
    return {
        "graphs": graphs,
        "first_seed": first_seed,
        "passed": all(r.passed for r in results.values()),
        "seconds": elapsed,
        "checks": {name: r.to_dict() for name, r in results.items()},
    }
