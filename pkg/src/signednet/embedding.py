"""Low-dimensional node coordinates from spectral decompositions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, UsageError
from .graph import SignedDigraph, matrix_view
from .spectral import spectral_transform, truncated_eig_sym, truncated_svd

EMBED_METHODS = ("laplacian", "svd_given", "svd_received")


@dataclass(frozen=True)
class Embedding:
    method: str
    k: int
    labels: tuple[str, ...]
    coords: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def dims(self) -> int:
        return int(self.coords.shape[1])

    def rows(self):
        """``(label, x, y, ...)`` tuples in node order."""
        for label, row in zip(self.labels, self.coords.tolist()):
            yield (label, *row)


def embed(g: SignedDigraph, method: str = "laplacian", dims: int = 2, k: int | None = None,
          tol: float = 1e-8, seed: int = 0, max_iter: int = 500) -> Embedding:
    """Per-node coordinates in ``dims`` dimensions.

    ``laplacian``: the ``k`` smallest eigenpairs of the signed Laplacian are
    pseudo-inverted and the ``dims`` largest resulting kernel eigenvalues
    kept, each column scaled by the square root of its value. Squared
    distances then approximate signed resistance distances.
    ``svd_given`` / ``svd_received``: rows of ``U`` / ``V`` of a rank-``k``
    SVD of ``A`` scaled by the singular values (users described by the
    ratings they gave / received).
    """
    if method not in EMBED_METHODS:
        raise UsageError(f"unknown embedding method {method!r}; expected one of {EMBED_METHODS}")
    if dims < 1:
        raise UsageError("dims must be positive")
    if g.n <= dims:
        raise DataError(f"graph with n={g.n} nodes is too small for {dims} dimensions")
    k = dims if k is None else k
    if k < dims:
        raise UsageError(f"k={k} must be at least dims={dims}")
    k = min(k, g.n)

    if method == "laplacian":
        dec = truncated_eig_sym(matrix_view(g, "Laplacian"), k, tol=tol, max_iter=max_iter,
                                seed=seed, which="smallest_algebraic")
        kernel = spectral_transform(dec, "pseudoinverse")
        order = np.argsort(-kernel.spectrum, kind="stable")[:dims]
        weights = np.clip(kernel.spectrum[order], 0.0, None)
        coords = dec.left[:, order] * np.sqrt(weights)
    else:
        dec = truncated_svd(matrix_view(g, "A"), k, tol=tol, max_iter=max_iter, seed=seed)
        basis = dec.left if method == "svd_given" else dec.right
        weights = dec.spectrum[:dims]
        coords = basis[:, :dims] * weights
    return Embedding(method, k, g.labels, np.ascontiguousarray(coords), weights)
