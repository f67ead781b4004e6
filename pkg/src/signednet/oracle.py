"""Dense brute-force reference computations.

Everything here is written against plain numpy arrays built with explicit
loops over the edge list. Nothing is shared with the sparse production
code paths, so agreement between the two is meaningful. Sizes are capped
to keep the O(n^3) work small.
"""

from __future__ import annotations

import numpy as np

from .errors import UsageError

MAX_DENSE = 256
MAX_REFERENCE = 64

TASKS = (
    "clustering", "pagerank", "signed_rank", "symmetric_rank", "eig", "svd",
    "exp_taylor", "pinv", "matrix_square", "resistance",
)


def _cap(n: int, limit: int) -> None:
    if n > limit:
        raise UsageError(f"dense reference limited to n <= {limit}, got n={n}")


def densify(view) -> np.ndarray:
    """Dense image of a matrix view, column by column from basis vectors."""
    n = view.n
    _cap(n, MAX_DENSE)
    out = np.zeros((n, n))
    e = np.zeros(n)
    for j in range(n):
        e[j] = 1.0
        out[:, j] = view.matvec(e)
        e[j] = 0.0
    return out


def dense_adjacency(g) -> np.ndarray:
    _cap(g.n, MAX_DENSE)
    a = np.zeros((g.n, g.n))
    for u, v, w in g.edges():
        a[u, v] = w
    return a


def dense_matrix(g, kind: str) -> np.ndarray:
    """Build any view kind by hand from the dense adjacency matrix."""
    a = dense_adjacency(g)
    n = g.n
    if kind == "A":
        return a
    if kind == "A_abs":
        return np.abs(a)
    if kind == "A_transpose":
        return a.T.copy()
    b = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            b[i, j] = a[i, j] + a[j, i]
    if kind == "B":
        return b
    if kind == "B_abs":
        return np.abs(a) + np.abs(a).T
    if kind == "Laplacian":
        return np.diag(np.abs(b).sum(axis=1)) - b
    if kind in ("RowStochasticUnsigned", "RowStochasticSigned", "RowStochasticSymmetric"):
        base = {"RowStochasticUnsigned": np.abs(a), "RowStochasticSigned": a,
                "RowStochasticSymmetric": b}[kind]
        deg = np.abs(b if kind == "RowStochasticSymmetric" else a).sum(axis=1)
        out = np.zeros((n, n))
        for i in range(n):
            if deg[i] > 0:
                out[i] = base[i] / deg[i]
        return out
    raise UsageError(f"unknown kind {kind!r}")


# -- clustering ----------------------------------------------------------------

def dense_clustering_sums(g, include_diagonal: bool = False) -> dict:
    """Integer sums from the Hadamard/square matrix formulas."""
    _cap(g.n, MAX_REFERENCE)
    a = dense_adjacency(g).astype(np.int64)
    s = np.sign(a + a.T)
    out = {}
    for name, signed in (("undirected", s), ("directed", a)):
        unsigned = np.abs(signed)
        sq_unsigned = unsigned @ unsigned
        wedges = int(sq_unsigned.sum())
        if not include_diagonal:
            wedges -= int(np.trace(sq_unsigned))
        out[name] = {
            "closed": int((unsigned * sq_unsigned).sum()),
            "closed_signed": int((signed * (signed @ signed)).sum()),
            "wedges": wedges,
        }
    return out


def dense_clustering(g, include_diagonal: bool = False) -> dict:
    sums = dense_clustering_sums(g, include_diagonal)
    u, d = sums["undirected"], sums["directed"]

    def ratio(x, y):
        return x / y if y else None

    return {
        "C": ratio(u["closed"], u["wedges"]),
        "C_s": ratio(u["closed_signed"], u["wedges"]),
        "S": ratio(u["closed_signed"], u["closed"]),
        "C_dir": ratio(d["closed"], d["wedges"]),
        "C_s_dir": ratio(d["closed_signed"], d["wedges"]),
        "S_dir": ratio(d["closed_signed"], d["closed"]),
    }


# -- spectral ranking ------------------------------------------------------------

def google_matrix(g, kind: str, alpha: float) -> np.ndarray:
    """Explicit teleporting matrix with uniform rows for dangling nodes."""
    n = g.n
    p = dense_matrix(g, kind)
    for i in range(n):
        if not np.any(p[i]):
            p[i] = 1.0 / n
    return (1 - alpha) * p + alpha / n * np.ones((n, n))


def dense_power_rank(g, kind: str, alpha: float, tol: float = 1e-13, max_iter: int = 200_000):
    """Dominant left eigenvector of the dense Google matrix by power iteration.

    Unit Euclidean length, sign chosen so the sum is non-negative.
    """
    _cap(g.n, MAX_REFERENCE)
    gm = google_matrix(g, kind, alpha)
    x = np.ones(g.n) / np.sqrt(g.n)
    for _ in range(max_iter):
        y = x @ gm
        y = y / np.linalg.norm(y)
        if y.sum() < 0:
            y = -y
        if np.abs(y - x).sum() < tol:
            return y
        x = y
    raise RuntimeError("dense power iteration did not converge")


def dense_dominant_eigenvector(g, kind: str, alpha: float, max_ratio: float = 0.99):
    """Dominant left eigenvector of the Google matrix by a full dense eigensolve.

    Returns ``None`` when the problem is ill-posed for power iteration: the
    dominant eigenvalue is complex, the second largest magnitude exceeds
    ``max_ratio`` times the largest, or the eigenvector sums to zero (so
    the sign convention cannot pick one). Otherwise unit length with a
    non-negative sum.
    """
    _cap(g.n, MAX_REFERENCE)
    gm = google_matrix(g, kind, alpha)
    values, vectors = np.linalg.eig(gm.T)
    order = np.argsort(-np.abs(values), kind="stable")
    lead = values[order[0]]
    if abs(lead) == 0 or abs(lead.imag) > 1e-12 * abs(lead):
        return None
    if g.n > 1 and abs(values[order[1]]) > max_ratio * abs(lead):
        return None
    x = np.real(vectors[:, order[0]])
    x = x / np.linalg.norm(x)
    if abs(x.sum()) < 1e-6:
        return None
    return -x if x.sum() < 0 else x


# -- matrix functions ------------------------------------------------------------

def exp_taylor(m: np.ndarray, terms: int = 30) -> np.ndarray:
    """Matrix exponential by scaling and squaring of a truncated Taylor series."""
    m = np.asarray(m, dtype=float)
    _cap(m.shape[0], MAX_REFERENCE)
    norm1 = np.abs(m).sum(axis=0).max() if m.size else 0.0
    s = 0
    while norm1 / 2**s > 0.5:
        s += 1
    x = m / 2**s
    result = np.eye(m.shape[0])
    term = np.eye(m.shape[0])
    for i in range(1, terms + 1):
        term = term @ x / i
        result = result + term
    for _ in range(s):
        result = result @ result
    return result


def pinv(m: np.ndarray, rcond: float = 1e-6) -> np.ndarray:
    """Pseudoinverse dropping singular values below ``rcond`` times the largest."""
    _cap(m.shape[0], MAX_REFERENCE)
    u, s, vt = np.linalg.svd(m)
    inv = np.zeros_like(s)
    if s.size and s[0] > 0:
        keep = s > rcond * s[0]
        inv[keep] = 1.0 / s[keep]
    return (vt.T * inv) @ u.T


def matrix_square(g) -> np.ndarray:
    _cap(g.n, MAX_DENSE)
    a = dense_adjacency(g)
    n = g.n
    out = np.zeros((n, n))
    for u in range(n):
        for w in np.nonzero(a[u])[0]:
            out[u] += a[u, w] * a[w]
    return out


def resistance(g) -> np.ndarray:
    """Signed resistance distances ``K_uu + K_vv - 2 K_uv`` with ``K = L^+``."""
    k = pinv(dense_matrix(g, "Laplacian"))
    d = np.diag(k)
    return d[:, None] + d[None, :] - 2 * k


def dense_reference(task: str, g, **params):
    """Dispatch one of :data:`TASKS` on a small graph."""
    if task == "clustering":
        return dense_clustering(g, params.get("include_diagonal", False))
    if task in ("pagerank", "signed_rank", "symmetric_rank"):
        kind = {"pagerank": "RowStochasticUnsigned", "signed_rank": "RowStochasticSigned",
                "symmetric_rank": "RowStochasticSymmetric"}[task]
        return dense_power_rank(g, kind, params.get("alpha", 0.15))
    if task == "eig":
        return np.linalg.eigh(dense_matrix(g, params.get("kind", "B")))
    if task == "svd":
        return np.linalg.svd(dense_matrix(g, params.get("kind", "A")))
    if task == "exp_taylor":
        return exp_taylor(dense_matrix(g, params.get("kind", "B")))
    if task == "pinv":
        return pinv(dense_matrix(g, params.get("kind", "Laplacian")))
    if task == "matrix_square":
        return matrix_square(g)
    if task == "resistance":
        return resistance(g)
    raise UsageError(f"unknown task {task!r}; expected one of {TASKS}")
