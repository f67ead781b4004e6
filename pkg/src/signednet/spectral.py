"""Sparse iterative linear algebra over graph matrix views.

Truncated symmetric eigendecompositions use a thick-restart Lanczos
iteration with full reorthogonalization; truncated SVDs use the analogous
restarted Golub-Kahan bidiagonalization. Both only touch the operator
through matrix-vector products. Spectral transforms (exponential,
pseudoinverse) act on the diagonal of a decomposition.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import ConvergenceError, UsageError
from .graph import MatrixView, SignedDigraph

PINV_CUTOFF = 1e-6
TRANSFORMS = ("identity", "exponential", "pseudoinverse")
EIG_WHICH = ("largest_magnitude", "largest_algebraic", "smallest_algebraic")

# A Krylov residual below this fraction of the norm estimate is treated as
# an exhausted subspace and replaced by a fresh random direction.
_BREAKDOWN = 1e-12
_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class SpectralDecomposition:
    """Truncated factorization ``M ~ left @ diag(spectrum) @ right.T``.

    For ``kind == "symmetric_eig"`` ``right`` is ``left``. Residuals are
    the explicit ``||M v_i - d_i u_i||`` (for SVD the larger of the two
    one-sided residuals). ``norm_estimate`` is the largest absolute
    Ritz value seen while iterating.
    """

    left: np.ndarray
    spectrum: np.ndarray
    right: np.ndarray
    kind: str
    residuals: np.ndarray
    norm_estimate: float = 0.0
    source: str = ""

    @property
    def k(self) -> int:
        return int(self.spectrum.size)

    @property
    def n(self) -> int:
        return int(self.left.shape[0])

    def truncate(self, k: int) -> "SpectralDecomposition":
        """Leading ``k`` components (spectrum order is preserved)."""
        if not 1 <= k <= self.k:
            raise UsageError(f"cannot truncate a rank-{self.k} decomposition to k={k}")
        right = self.left[:, :k] if self.kind == "symmetric_eig" else self.right[:, :k]
        return replace(
            self, left=self.left[:, :k], spectrum=self.spectrum[:k], right=right,
            residuals=self.residuals[:k],
        )

    def reconstruct(self) -> np.ndarray:
        """Dense ``U D V^T``; intended for small graphs and tests."""
        return (self.left * self.spectrum) @ self.right.T


@dataclass(frozen=True)
class TransformedKernel:
    """A decomposition with a function applied to its spectrum."""

    source: SpectralDecomposition
    transform: str
    spectrum: np.ndarray = field(repr=False)

    @property
    def left(self) -> np.ndarray:
        return self.source.left

    @property
    def right(self) -> np.ndarray:
        return self.source.right

    @property
    def n(self) -> int:
        return self.source.n

    @property
    def symmetric(self) -> bool:
        return self.source.kind == "symmetric_eig"

    def score(self, u: int, v: int) -> float:
        return kernel_score(self, u, v)

    def score_pairs(self, us, vs) -> np.ndarray:
        return kernel_scores(self, us, vs)

    def dense(self) -> np.ndarray:
        return (self.left * self.spectrum) @ self.right.T


# -- operator plumbing -------------------------------------------------------

class _Operator:
    """Minimal matvec/rmatvec wrapper over a dense or sparse matrix."""

    def __init__(self, matrix, symmetric: bool | None = None):
        self._m = matrix
        self._mt = matrix.T
        self.n = matrix.shape[0]
        if symmetric is None:
            diff = matrix - matrix.T
            symmetric = (abs(diff).max() if sp.issparse(diff) else np.abs(diff).max(initial=0.0)) == 0
        self.symmetric = bool(symmetric)

    def matvec(self, x):
        return self._m @ x

    def rmatvec(self, x):
        return self._mt @ x

    def gershgorin_bound(self) -> float:
        rows = abs(self._m).sum(axis=1)
        return float(np.max(rows)) if self.n else 0.0


def _as_operator(view):
    if isinstance(view, (MatrixView, _Operator)):
        return view
    if sp.issparse(view) or isinstance(view, np.ndarray):
        if view.ndim != 2 or view.shape[0] != view.shape[1]:
            raise UsageError("operator must be a square matrix")
        return _Operator(view)
    raise UsageError(f"unsupported operator type {type(view).__name__}")


def _random_orthogonal(basis: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    n = basis.shape[0]
    for _ in range(10):
        w = rng.standard_normal(n)
        for _ in range(2):
            w -= basis @ (basis.T @ w)
        nrm = np.linalg.norm(w)
        if nrm > 1e-8:
            return w / nrm
    raise ConvergenceError("could not extend the Krylov basis")


def _orthogonalize(w: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Two passes of classical Gram-Schmidt; returns the coefficients."""
    h = basis.T @ w
    w -= basis @ h
    h2 = basis.T @ w
    w -= basis @ h2
    return h + h2


def _fix_signs(left: np.ndarray, right: np.ndarray | None = None) -> None:
    """Make the largest-magnitude entry of each left column positive, in place."""
    if left.size == 0:
        return
    idx = np.argmax(np.abs(left), axis=0)
    flip = left[idx, np.arange(left.shape[1])] < 0
    left[:, flip] *= -1
    if right is not None:
        right[:, flip] *= -1


def _subspace_size(n: int, k: int) -> int:
    return min(n, max(2 * k + 1, k + 20))


def _order(theta: np.ndarray, which: str) -> np.ndarray:
    if which == "largest_magnitude":
        return np.lexsort((-theta, -np.abs(theta)))
    return np.argsort(-theta, kind="stable")


def _check_k(n: int, k: int) -> None:
    if n == 0:
        raise UsageError("empty operator")
    if not 1 <= k <= n:
        raise UsageError(f"k must satisfy 1 <= k <= n={n}, got {k}")


# -- symmetric eigensolver ----------------------------------------------------

def _lanczos(matvec, n, k, which, tol, max_iter, rng):
    ncv = _subspace_size(n, k)
    V = np.zeros((n, ncv))
    H = np.zeros((ncv, ncv))
    v0 = rng.standard_normal(n)
    V[:, 0] = v0 / np.linalg.norm(v0)
    start = 0
    anorm = 0.0
    res_est = np.full(k, np.inf)
    for _ in range(max_iter):
        for j in range(start, ncv):
            w = matvec(V[:, j])
            h = _orthogonalize(w, V[:, : j + 1])
            H[: j + 1, j] = h
            H[j, : j + 1] = h
            fnorm = np.linalg.norm(w)
            anorm = max(anorm, abs(h[j]), fnorm)
            if j + 1 < ncv:
                if fnorm <= _BREAKDOWN * max(anorm, _TINY):
                    V[:, j + 1] = _random_orthogonal(V[:, : j + 1], rng)
                else:
                    V[:, j + 1] = w / fnorm
        theta, S = np.linalg.eigh(H)
        order = _order(theta, which)
        theta, S = theta[order], S[:, order]
        anorm = max(anorm, float(np.abs(theta).max()))
        res_est = fnorm * np.abs(S[-1, :k])
        if ncv == n or np.all(res_est <= tol * max(anorm, _TINY)):
            return theta[:k], V @ S[:, :k], anorm
        keep = min(ncv - 1, k + (ncv - k) // 2)
        V[:, :keep] = V @ S[:, :keep]
        H[:] = 0.0
        H[np.arange(keep), np.arange(keep)] = theta[:keep]
        if fnorm <= _BREAKDOWN * anorm:
            V[:, keep] = _random_orthogonal(V[:, :keep], rng)
        else:
            V[:, keep] = w / fnorm
        start = keep
    raise ConvergenceError(
        f"Lanczos did not converge in {max_iter} restarts", residuals=res_est
    )


def truncated_eig_sym(
    view,
    k: int,
    tol: float = 1e-8,
    max_iter: int = 500,
    seed: int = 0,
    which: str = "largest_magnitude",
) -> SpectralDecomposition:
    """Leading ``k`` eigenpairs of a symmetric view.

    ``which="smallest_algebraic"`` runs the iteration on ``s*I - M`` with
    ``s`` the Gershgorin bound of ``M`` and reports Rayleigh quotients on
    ``M`` itself, in ascending order. The other orders are descending.
    """
    op = _as_operator(view)
    if not op.symmetric:
        raise UsageError(f"truncated_eig_sym needs a symmetric view, got {getattr(op, 'kind', op)!r}")
    if which not in EIG_WHICH:
        raise UsageError(f"which must be one of {EIG_WHICH}")
    n = op.n
    _check_k(n, k)
    rng = np.random.default_rng(seed)
    if which == "smallest_algebraic":
        shift = op.gershgorin_bound()

        def matvec(x):
            return shift * x - op.matvec(x)

        _, vecs, anorm = _lanczos(matvec, n, k, "largest_algebraic", tol, max_iter, rng)
    else:
        _, vecs, anorm = _lanczos(op.matvec, n, k, which, tol, max_iter, rng)

    # Rayleigh quotients on M itself avoid cancellation in shift - theta.
    mv = np.column_stack([op.matvec(vecs[:, i]) for i in range(k)])
    values = np.einsum("ij,ij->j", vecs, mv)
    if which == "smallest_algebraic":
        order = np.argsort(values, kind="stable")
    else:
        order = _order(values, which)
    vecs = np.ascontiguousarray(vecs[:, order])
    mv = np.ascontiguousarray(mv[:, order])
    values = values[order]
    _fix_signs(vecs, mv)
    residuals = np.linalg.norm(mv - vecs * values, axis=0)
    return SpectralDecomposition(
        left=vecs, spectrum=values, right=vecs, kind="symmetric_eig",
        residuals=residuals, norm_estimate=float(anorm), source=getattr(op, "kind", ""),
    )


# -- singular value decomposition ---------------------------------------------

def _bidiag(matvec, rmatvec, n, k, tol, max_iter, rng):
    ncv = _subspace_size(n, k)
    V = np.zeros((n, ncv))
    U = np.zeros((n, ncv))
    P = np.zeros((ncv, ncv))
    v0 = rng.standard_normal(n)
    V[:, 0] = v0 / np.linalg.norm(v0)
    start = 0
    anorm = 0.0
    res_est = np.full(k, np.inf)
    for _ in range(max_iter):
        for j in range(start, ncv):
            w = matvec(V[:, j])
            P[:j, j] = _orthogonalize(w, U[:, :j])
            alpha = np.linalg.norm(w)
            anorm = max(anorm, alpha)
            if alpha <= _BREAKDOWN * max(anorm, _TINY):
                U[:, j] = _random_orthogonal(U[:, :j], rng)
                P[j, j] = 0.0
            else:
                U[:, j] = w / alpha
                P[j, j] = alpha
            z = rmatvec(U[:, j])
            _orthogonalize(z, V[:, : j + 1])
            beta = np.linalg.norm(z)
            anorm = max(anorm, beta)
            if j + 1 < ncv:
                if beta <= _BREAKDOWN * max(anorm, _TINY):
                    V[:, j + 1] = _random_orthogonal(V[:, : j + 1], rng)
                else:
                    V[:, j + 1] = z / beta
        X, s, Yt = np.linalg.svd(P)
        anorm = max(anorm, float(s[0]))
        res_est = beta * np.abs(X[-1, :k])
        if ncv == n or np.all(res_est <= tol * max(anorm, _TINY)):
            return s[:k], U @ X[:, :k], V @ Yt[:k].T, anorm
        keep = min(ncv - 1, k + (ncv - k) // 2)
        V[:, :keep] = V @ Yt[:keep].T
        U[:, :keep] = U @ X[:, :keep]
        P[:] = 0.0
        P[np.arange(keep), np.arange(keep)] = s[:keep]
        if beta <= _BREAKDOWN * anorm:
            V[:, keep] = _random_orthogonal(V[:, :keep], rng)
        else:
            V[:, keep] = z / beta
        start = keep
    raise ConvergenceError(
        f"bidiagonalization did not converge in {max_iter} restarts", residuals=res_est
    )


def truncated_svd(
    view,
    k: int,
    tol: float = 1e-8,
    max_iter: int = 500,
    seed: int = 0,
) -> SpectralDecomposition:
    """Top-``k`` singular triplets, singular values non-increasing."""
    op = _as_operator(view)
    n = op.n
    _check_k(n, k)
    rng = np.random.default_rng(seed)
    s, U, V, anorm = _bidiag(op.matvec, op.rmatvec, n, k, tol, max_iter, rng)
    U = np.ascontiguousarray(U)
    V = np.ascontiguousarray(V)
    _fix_signs(U, V)
    r_right = np.column_stack([op.matvec(V[:, i]) for i in range(k)]) - U * s
    r_left = np.column_stack([op.rmatvec(U[:, i]) for i in range(k)]) - V * s
    residuals = np.maximum(np.linalg.norm(r_right, axis=0), np.linalg.norm(r_left, axis=0))
    return SpectralDecomposition(
        left=U, spectrum=s, right=V, kind="svd", residuals=residuals,
        norm_estimate=max(anorm, float(s[0])), source=getattr(op, "kind", ""),
    )


# -- power iteration ----------------------------------------------------------

def _normalize_signed(y: np.ndarray) -> np.ndarray:
    nrm = np.linalg.norm(y)
    if nrm == 0 or not np.isfinite(nrm):
        raise ConvergenceError("power iteration collapsed to the zero vector")
    y = y / nrm
    total = y.sum()
    if total < 0 or (total == 0 and y[np.argmax(np.abs(y))] < 0):
        y = -y
    return y


def dominant_left_eigenvector(
    view: MatrixView,
    alpha: float = 0.15,
    tol: float = 1e-8,
    max_iter: int = 10_000,
    x0: np.ndarray | None = None,
) -> np.ndarray:
    """Dominant left eigenvector of ``(1-alpha) P + (alpha/n) J``.

    ``P`` is the row-stochastic ``view`` with dangling rows completed to
    ``1/n``. Both the teleportation and the dangling completion are
    applied as rank-one updates. Iterates until the L1 change between
    unit-length iterates drops below ``tol``; the result has unit
    Euclidean norm and non-negative sum.
    """
    if not 0 < alpha < 1:
        raise UsageError(f"alpha must lie in (0, 1), got {alpha}")
    if view.dangling is None:
        raise UsageError(f"view {view.kind!r} is not a row-stochastic kind")
    n = view.n
    dangling = view.dangling
    x = np.full(n, 1.0 / np.sqrt(n)) if x0 is None else _normalize_signed(np.asarray(x0, float))
    delta = np.inf
    for _ in range(max_iter):
        y = view.rmatvec(x)
        y += x[dangling].sum() / n
        y *= 1.0 - alpha
        y += alpha / n * x.sum()
        y = _normalize_signed(y)
        delta = float(np.abs(y - x).sum())
        x = y
        if delta < tol:
            return x
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} steps (last delta {delta:.3g})",
        residuals=delta,
    )


# -- transforms and kernel evaluation ----------------------------------------

def _apply_transform(values: np.ndarray, transform: str) -> np.ndarray:
    if transform == "identity":
        return values.copy()
    if transform == "exponential":
        return np.exp(values)
    if transform == "pseudoinverse":
        out = np.zeros_like(values)
        if values.size:
            cutoff = PINV_CUTOFF * np.abs(values).max()
            keep = np.abs(values) > cutoff
            out[keep] = 1.0 / values[keep]
        return out
    raise UsageError(f"unknown transform {transform!r}; expected one of {TRANSFORMS}")


def spectral_transform(dec, transform: str) -> TransformedKernel:
    """Apply ``transform`` to the spectrum of a decomposition (or kernel).

    Given a :class:`TransformedKernel`, the transform composes with the
    existing spectral function.
    """
    if isinstance(dec, TransformedKernel):
        return TransformedKernel(dec.source, f"{transform}({dec.transform})",
                                 _apply_transform(dec.spectrum, transform))
    return TransformedKernel(dec, transform, _apply_transform(dec.spectrum, transform))


def kernel_score(kernel: TransformedKernel, u: int, v: int) -> float:
    n = kernel.n
    if not (0 <= u < n and 0 <= v < n):
        raise IndexError(f"node index out of range for n={n}: ({u}, {v})")
    return float(np.dot(kernel.left[u] * kernel.spectrum, kernel.right[v]))


def kernel_scores(kernel: TransformedKernel, us, vs) -> np.ndarray:
    us = np.asarray(us, dtype=np.int64)
    vs = np.asarray(vs, dtype=np.int64)
    n = kernel.n
    if us.size and (us.min() < 0 or vs.min() < 0 or us.max() >= n or vs.max() >= n):
        raise IndexError(f"node index out of range for n={n}")
    return np.einsum("ij,j,ij->i", kernel.left[us], kernel.spectrum, kernel.right[vs])


def signed_two_paths(g: SignedDigraph, us, vs, chunk: int = 65536) -> np.ndarray:
    """``(A^2)_{uv}`` for each query pair, by sparse row/column intersection."""
    us = np.asarray(us, dtype=np.int64)
    vs = np.asarray(vs, dtype=np.int64)
    if us.shape != vs.shape:
        raise UsageError("us and vs must have the same length")
    a, at = g.adjacency, g.adjacency_t
    out = np.empty(us.size, dtype=np.float64)
    for lo in range(0, us.size, chunk):
        hi = min(lo + chunk, us.size)
        prod = a[us[lo:hi]].multiply(at[vs[lo:hi]])
        out[lo:hi] = np.asarray(prod.sum(axis=1)).ravel()
    return out


# -- on-disk cache ------------------------------------------------------------

class DecompositionCache:
    """Binary ``.npz`` cache of decompositions under a directory.

    Keys combine the input digest with every parameter that affects the
    result.
    """

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def key(digest: str, view_kind: str, k: int, tol: float, seed: int, method: str) -> str:
        raw = f"{digest}|{view_kind}|{k}|{tol!r}|{seed}|{method}"
        return hashlib.sha256(raw.encode()).hexdigest()[:32]

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.npz"

    def get(self, key: str) -> SpectralDecomposition | None:
        path = self._path(key)
        if not path.exists():
            return None
        with np.load(path, allow_pickle=False) as data:
            kind = str(data["kind"])
            left = data["left"]
            return SpectralDecomposition(
                left=left, spectrum=data["spectrum"],
                right=left if kind == "symmetric_eig" else data["right"],
                kind=kind, residuals=data["residuals"],
                norm_estimate=float(data["norm_estimate"]), source=str(data["source"]),
            )

    def put(self, key: str, dec: SpectralDecomposition) -> None:
        tmp = self.directory / f".{key}.tmp.npz"
        np.savez(
            tmp, left=dec.left, spectrum=dec.spectrum, right=dec.right, kind=dec.kind,
            residuals=dec.residuals, norm_estimate=dec.norm_estimate, source=dec.source,
        )
        tmp.replace(self._path(key))

    def get_or_compute(self, key: str, compute) -> SpectralDecomposition:
        dec = self.get(key)
        if dec is None:
            dec = compute()
            self.put(key, dec)
        return dec
