"""Seeded synthetic signed graphs with known ground truth."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import UsageError
from .graph import SignedDigraph

MODELS = ("erdos_signed", "planted_balance", "planted_trolls")

DEFAULTS = {
    "erdos_signed": {"p": 0.1, "sign_bias": 0.75},
    "planted_balance": {"groups": 2, "p_in": 0.1, "p_out": 0.1, "noise": 0.0},
    "planted_trolls": {
        "n_trolls": 10, "p_attack": 0.01, "avg_degree": 10.0, "noise": 0.05, "p_retaliate": 0.0,
        "marker": "marker",
    },
}


@dataclass(frozen=True)
class SyntheticSpec:
    model: str
    n: int
    seed: int = 0
    params: dict = field(default_factory=dict)

    def resolved(self) -> dict:
        if self.model not in MODELS:
            raise UsageError(f"unknown model {self.model!r}; expected one of {MODELS}")
        unknown = set(self.params) - set(DEFAULTS[self.model])
        if unknown:
            raise UsageError(f"unknown parameters for {self.model}: {sorted(unknown)}")
        return {**DEFAULTS[self.model], **self.params}


def _check_prob(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise UsageError(f"{name} must lie in [0, 1], got {value}")


def _sample_pairs(rng, rows: np.ndarray, cols: np.ndarray, p: float, same: bool):
    """Each ordered pair of ``rows x cols`` (``u != v``) independently with probability ``p``.

    When ``same`` is true, ``rows`` and ``cols`` are the same node set.
    """
    nr, nc = rows.size, cols.size
    total = nr * (nc - 1) if same else nr * nc
    if total <= 0 or p == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    count = rng.binomial(total, p)
    flat = np.sort(rng.choice(total, size=count, replace=False))
    if same:
        r = flat // (nc - 1)
        c = flat % (nc - 1)
        c = c + (c >= r)
    else:
        r = flat // nc
        c = flat % nc
    return rows[r], cols[c]


def _labels(n: int) -> list[str]:
    return [str(i) for i in range(n)]


def erdos_signed(n: int, p: float, sign_bias: float, seed: int) -> SignedDigraph:
    _check_prob("p", p)
    _check_prob("sign_bias", sign_bias)
    rng = np.random.default_rng(seed)
    nodes = np.arange(n)
    src, dst = _sample_pairs(rng, nodes, nodes, p, same=True)
    weight = np.where(rng.random(src.size) < sign_bias, 1, -1)
    return SignedDigraph(_labels(n), src, dst, weight)


def planted_balance(n: int, groups: int, p_in: float, p_out: float, noise: float, seed: int):
    """Edges inside a group are friendly, across groups hostile; each sign
    flips independently with probability ``noise``. Returns graph and groups."""
    for name, value in (("p_in", p_in), ("p_out", p_out), ("noise", noise)):
        _check_prob(name, value)
    if groups < 1:
        raise UsageError("groups must be >= 1")
    rng = np.random.default_rng(seed)
    group = rng.integers(groups, size=n)
    members = [np.flatnonzero(group == k) for k in range(groups)]
    srcs, dsts, signs = [], [], []
    for a in range(groups):
        for b in range(groups):
            same = a == b
            s, d = _sample_pairs(rng, members[a], members[b], p_in if same else p_out, same)
            srcs.append(s)
            dsts.append(d)
            signs.append(np.full(s.size, 1 if same else -1))
    src, dst, sign = (np.concatenate(x) for x in (srcs, dsts, signs))
    flip = rng.random(src.size) < noise
    sign = np.where(flip, -sign, sign)
    return SignedDigraph(_labels(n), src, dst, sign), group


def planted_trolls(n: int, n_trolls: int, p_attack: float, avg_degree: float, noise: float,
                   marker: str | None, seed: int, p_retaliate: float = 0.0):
    """Mostly-positive random background plus trolls that draw foe edges.

    Every non-troll marks each troll as a foe with probability
    ``p_attack``; background edges are negative with probability ``noise``.
    Each troll marks each non-troll as a foe with probability
    ``p_retaliate``. If ``marker`` is set, an extra node with that label
    marks every troll as a foe (usable with the troll benchmark). Returns
    graph and troll ids.
    """
    _check_prob("p_attack", p_attack)
    _check_prob("noise", noise)
    _check_prob("p_retaliate", p_retaliate)
    if not 0 <= n_trolls <= n:
        raise UsageError("n_trolls must lie in [0, n]")
    if avg_degree < 0 or (n > 1 and avg_degree > n - 1):
        raise UsageError("avg_degree must lie in [0, n-1]")
    rng = np.random.default_rng(seed)
    nodes = np.arange(n)
    p_background = avg_degree / (n - 1) if n > 1 else 0.0
    src, dst = _sample_pairs(rng, nodes, nodes, p_background, same=True)
    sign = np.where(rng.random(src.size) < noise, -1, 1)

    trolls = np.sort(rng.choice(n, size=n_trolls, replace=False))
    honest = np.setdiff1d(nodes, trolls)
    a_src, a_dst = _sample_pairs(rng, honest, trolls, p_attack, same=False)
    r_src, r_dst = _sample_pairs(rng, trolls, honest, p_retaliate, same=False)

    edges = {}
    for u, v, w in zip(src.tolist(), dst.tolist(), sign.tolist()):
        edges[(u, v)] = w
    for u, v in zip(a_src.tolist(), a_dst.tolist()):
        edges[(u, v)] = -1
    for u, v in zip(r_src.tolist(), r_dst.tolist()):
        edges[(u, v)] = -1
    labels = _labels(n)
    if marker is not None:
        labels.append(marker)
        for t in trolls.tolist():
            edges[(n, t)] = -1
    keys = np.array(list(edges.keys()), dtype=np.int64).reshape(-1, 2)
    weight = np.fromiter(edges.values(), dtype=np.int8, count=len(edges))
    return SignedDigraph(labels, keys[:, 0], keys[:, 1], weight), trolls


def generate_with_truth(spec: SyntheticSpec):
    """Graph plus the model's ground truth (``None`` for erdos_signed)."""
    params = spec.resolved()
    if spec.n < 1:
        raise UsageError("n must be positive")
    if spec.model == "erdos_signed":
        return erdos_signed(spec.n, params["p"], params["sign_bias"], spec.seed), None
    if spec.model == "planted_balance":
        return planted_balance(spec.n, int(params["groups"]), params["p_in"], params["p_out"],
                               params["noise"], spec.seed)
    return planted_trolls(spec.n, int(params["n_trolls"]), params["p_attack"],
                          params["avg_degree"], params["noise"], params["marker"], spec.seed,
                          params["p_retaliate"])


def generate(spec: SyntheticSpec) -> SignedDigraph:
    return generate_with_truth(spec)[0]
