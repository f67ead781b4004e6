"""Signed directed graph container, edge-list I/O and sparse matrix views."""

from __future__ import annotations

import gzip
import hashlib
import io
import warnings
from pathlib import Path
from typing import Iterable, Iterator, TextIO

import numpy as np
import scipy.sparse as sp

from .errors import DataError, DataWarning, ParseError, UsageError

DUPLICATE_POLICIES = ("keep-last", "keep-first", "error")
SELF_LOOP_POLICIES = ("drop", "error")

VIEW_KINDS = (
    "A",
    "A_abs",
    "A_transpose",
    "B",
    "B_abs",
    "RowStochasticUnsigned",
    "RowStochasticSigned",
    "RowStochasticSymmetric",
    "Laplacian",
)
SYMMETRIC_KINDS = frozenset({"B", "B_abs", "Laplacian"})


class SignedDigraph:
    """Immutable directed graph with edge weights in {-1, +1}.

    Nodes are dense indices ``0..n-1`` mapped to opaque string labels.
    Edges are stored once, sorted by ``(src, dst)``; the out-adjacency
    ``A`` and in-adjacency ``A^T`` are CSR matrices over the same edge set.

    Use :func:`load_edge_list` or :meth:`from_arrays` to build one.
    """

    __slots__ = (
        "_labels", "_index", "_src", "_dst", "_weight", "_adj", "_adj_t", "_cache",
    )

    def __init__(self, labels: Iterable[str], src, dst, weight):
        labels = tuple(labels)
        index = {label: i for i, label in enumerate(labels)}
        if len(index) != len(labels):
            raise DataError("node labels must be unique")
        n = len(labels)
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        weight = np.asarray(weight, dtype=np.int8)
        if not (src.shape == dst.shape == weight.shape) or src.ndim != 1:
            raise DataError("src, dst and weight must be 1-d arrays of equal length")
        if src.size:
            if src.min() < 0 or dst.min() < 0 or src.max() >= n or dst.max() >= n:
                raise DataError("edge endpoint out of range")
            if np.any(src == dst):
                raise DataError("self-loops are not allowed")
            if not np.all(np.abs(weight) == 1):
                raise DataError("edge weights must be -1 or +1")
        order = np.lexsort((dst, src))
        src, dst, weight = src[order], dst[order], weight[order]
        if src.size > 1:
            dup = (src[1:] == src[:-1]) & (dst[1:] == dst[:-1])
            if np.any(dup):
                raise DataError("duplicate ordered pair")
        for arr in (src, dst, weight):
            arr.setflags(write=False)

        self._labels = labels
        self._index = index
        self._src, self._dst, self._weight = src, dst, weight
        data = weight.astype(np.float64)
        self._adj = sp.csr_matrix((data, (src, dst)), shape=(n, n))
        self._adj_t = sp.csr_matrix((data, (dst, src)), shape=(n, n))
        self._cache: dict = {}

    @classmethod
    def from_arrays(cls, labels, src, dst, weight) -> "SignedDigraph":
        return cls(labels, src, dst, weight)

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[str, str, int]], labels=None) -> "SignedDigraph":
        """Build from ``(src_label, dst_label, weight)`` triples.

        Extra ``labels`` (for isolated nodes) are registered first, in order.
        """
        index: dict[str, int] = {}
        for label in labels or ():
            index.setdefault(label, len(index))
        src, dst, weight = [], [], []
        for a, b, w in edges:
            src.append(index.setdefault(a, len(index)))
            dst.append(index.setdefault(b, len(index)))
            weight.append(w)
        return cls(list(index), src, dst, weight)

    # -- basic properties -------------------------------------------------
    @property
    def n(self) -> int:
        return len(self._labels)

    @property
    def m(self) -> int:
        return int(self._src.size)

    @property
    def m_pos(self) -> int:
        return int(np.count_nonzero(self._weight > 0))

    @property
    def m_neg(self) -> int:
        return int(np.count_nonzero(self._weight < 0))

    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    @property
    def src(self) -> np.ndarray:
        return self._src

    @property
    def dst(self) -> np.ndarray:
        return self._dst

    @property
    def weight(self) -> np.ndarray:
        return self._weight

    @property
    def adjacency(self) -> sp.csr_matrix:
        """Out-adjacency ``A`` as CSR (float64). Do not modify."""
        return self._adj

    @property
    def adjacency_t(self) -> sp.csr_matrix:
        """In-adjacency ``A^T`` as CSR (float64). Do not modify."""
        return self._adj_t

    def index_of(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise DataError(f"unknown node label {label!r}") from None

    def label_of(self, i: int) -> str:
        return self._labels[i]

    def has_label(self, label: str) -> bool:
        return label in self._index

    def edges(self) -> Iterator[tuple[int, int, int]]:
        for u, v, w in zip(self._src.tolist(), self._dst.tolist(), self._weight.tolist()):
            yield u, v, w

    def weight_of(self, u: int, v: int) -> int:
        return int(self._adj[u, v])

    # -- degrees ----------------------------------------------------------
    def _count(self, key: str, idx: np.ndarray, mask=None) -> np.ndarray:
        if key not in self._cache:
            sel = idx if mask is None else idx[mask]
            self._cache[key] = np.bincount(sel, minlength=self.n).astype(np.int64)
        return self._cache[key]

    def out_degree(self) -> np.ndarray:
        return self._count("out", self._src)

    def in_degree(self) -> np.ndarray:
        return self._count("in", self._dst)

    def friend_count(self) -> np.ndarray:
        """Positive out-edges per node."""
        return self._count("friend", self._src, self._weight > 0)

    def foe_count(self) -> np.ndarray:
        """Negative out-edges per node."""
        return self._count("foe", self._src, self._weight < 0)

    def fan_count(self) -> np.ndarray:
        """Positive in-edges per node."""
        return self._count("fan", self._dst, self._weight > 0)

    def freak_count(self) -> np.ndarray:
        """Negative in-edges per node."""
        return self._count("freak", self._dst, self._weight < 0)

    # -- derived graphs ---------------------------------------------------
    def edge_subgraph(self, mask) -> "SignedDigraph":
        """Same node set, keeping only edges where ``mask`` is true."""
        mask = np.asarray(mask, dtype=bool)
        return SignedDigraph(self._labels, self._src[mask], self._dst[mask], self._weight[mask])

    def without_node_edges(self, node: int) -> "SignedDigraph":
        return self.edge_subgraph((self._src != node) & (self._dst != node))

    def negated(self) -> "SignedDigraph":
        return SignedDigraph(self._labels, self._src, self._dst, -self._weight)

    def digest(self) -> str:
        """SHA-256 over labels and the canonical edge arrays."""
        if "digest" not in self._cache:
            h = hashlib.sha256()
            h.update("\x00".join(self._labels).encode("utf-8"))
            for arr in (self._src, self._dst, self._weight):
                h.update(np.ascontiguousarray(arr).tobytes())
            self._cache["digest"] = h.hexdigest()
        return self._cache["digest"]

    def __repr__(self) -> str:
        return f"SignedDigraph(n={self.n}, m={self.m}, m_pos={self.m_pos}, m_neg={self.m_neg})"


# -- edge-list I/O ---------------------------------------------------------

def _parse_weight(token: str) -> int | None:
    try:
        value = int(token)
    except ValueError:
        try:
            value = float(token)
        except ValueError:
            return None
    if value == 1:
        return 1
    if value == -1:
        return -1
    return None


def load_edge_list(
    stream: TextIO | Iterable[str],
    on_duplicate: str = "keep-last",
    on_self_loop: str = "drop",
) -> SignedDigraph:
    """Parse ``src<TAB>dst<TAB>weight`` lines into a :class:`SignedDigraph`.

    Lines starting with ``#`` or ``%`` are comments. Fields are split on
    tabs when a tab is present, otherwise on any whitespace. Node indices
    follow first appearance. Duplicate ordered pairs are resolved per
    ``on_duplicate``; self-loops are dropped with a :class:`DataWarning`
    unless ``on_self_loop="error"``.
    """
    if on_duplicate not in DUPLICATE_POLICIES:
        raise UsageError(f"on_duplicate must be one of {DUPLICATE_POLICIES}")
    if on_self_loop not in SELF_LOOP_POLICIES:
        raise UsageError(f"on_self_loop must be one of {SELF_LOOP_POLICIES}")

    index: dict[str, int] = {}
    edges: dict[tuple[int, int], int] = {}
    data_lines = 0
    self_loops = 0
    duplicates = 0
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line[0] in "#%":
            continue
        data_lines += 1
        fields = line.split("\t") if "\t" in line else line.split()
        if len(fields) != 3:
            raise ParseError(f"expected 3 fields, got {len(fields)}", lineno)
        a, b, wtok = (f.strip() for f in fields)
        if not a or not b:
            raise ParseError("empty node label", lineno)
        w = _parse_weight(wtok)
        if w is None:
            raise ParseError(f"weight must be -1 or +1, got {wtok!r}", lineno)
        u = index.setdefault(a, len(index))
        v = index.setdefault(b, len(index))
        if u == v:
            if on_self_loop == "error":
                raise ParseError(f"self-loop on {a!r}", lineno)
            self_loops += 1
            continue
        key = (u, v)
        if key in edges:
            duplicates += 1
            if on_duplicate == "error":
                raise ParseError(f"duplicate edge {a!r} -> {b!r}", lineno)
            if on_duplicate == "keep-first":
                continue
        edges[key] = w

    if data_lines == 0:
        raise DataError("empty input: no edge lines")
    if self_loops:
        warnings.warn(f"dropped {self_loops} self-loop(s)", DataWarning, stacklevel=2)
    if duplicates and on_duplicate != "error":
        warnings.warn(
            f"resolved {duplicates} duplicate edge(s) by {on_duplicate}", DataWarning, stacklevel=2
        )
    if edges:
        pairs = np.fromiter((x for k in edges for x in k), dtype=np.int64, count=2 * len(edges))
        src, dst = pairs[0::2], pairs[1::2]
        weight = np.fromiter(edges.values(), dtype=np.int8, count=len(edges))
    else:
        src = dst = np.empty(0, dtype=np.int64)
        weight = np.empty(0, dtype=np.int8)
    return SignedDigraph(list(index), src, dst, weight)


def open_text(path: str | Path) -> TextIO:
    """Open a text file for reading, transparently decompressing ``.gz``."""
    path = Path(path)
    if path.suffix == ".gz":
        return io.TextIOWrapper(gzip.open(path, "rb"), encoding="utf-8")
    return open(path, "r", encoding="utf-8")


def read_edge_list(path: str | Path, **options) -> SignedDigraph:
    try:
        with open_text(path) as fh:
            return load_edge_list(fh, **options)
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    except (UnicodeDecodeError, gzip.BadGzipFile, EOFError) as exc:
        raise DataError(f"cannot decode {path}: {exc}") from exc


def write_edge_list(g: SignedDigraph, stream: TextIO) -> None:
    """Write edges in canonical ``(src, dst)`` order as TSV."""
    labels = g.labels
    for u, v, w in g.edges():
        stream.write(f"{labels[u]}\t{labels[v]}\t{'+1' if w > 0 else '-1'}\n")


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


# -- matrix views ----------------------------------------------------------

class MatrixView:
    """A graph matrix available only through products with vectors.

    The operator is held in sparse form; nothing dense is ever built.
    For the row-stochastic kinds, rows of nodes with zero degree are left
    at zero; callers that need a stochastic completion use
    :attr:`dangling`.
    """

    def __init__(self, graph: SignedDigraph, kind: str, matrix: sp.csr_matrix,
                 dangling: np.ndarray | None = None):
        self.graph = graph
        self.kind = kind
        self._m = matrix
        self._mt = None
        self.dangling = dangling

    @property
    def shape(self) -> tuple[int, int]:
        return self._m.shape

    @property
    def n(self) -> int:
        return self._m.shape[0]

    @property
    def symmetric(self) -> bool:
        return self.kind in SYMMETRIC_KINDS

    @property
    def dtype(self):
        return np.dtype(np.float64)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self._m @ x

    def rmatvec(self, x: np.ndarray) -> np.ndarray:
        if self._mt is None:
            self._mt = self._m.T.tocsr()
        return self._mt @ x

    def matmat(self, x: np.ndarray) -> np.ndarray:
        return self._m @ x

    def __matmul__(self, x):
        return self._m @ x

    def abs_row_sums(self) -> np.ndarray:
        return np.asarray(abs(self._m).sum(axis=1)).ravel()

    def gershgorin_bound(self) -> float:
        """Upper bound on the spectral radius: max_i sum_j |M_ij|."""
        if self.n == 0 or self._m.nnz == 0:
            return 0.0
        return float(self.abs_row_sums().max())

    def sparse(self) -> sp.csr_matrix:
        """The underlying sparse operator (read-only use)."""
        return self._m

    def __repr__(self) -> str:
        return f"MatrixView(kind={self.kind!r}, n={self.n})"


def _symmetric_sign_adjacency(g: SignedDigraph) -> sp.csr_matrix:
    b = (g.adjacency + g.adjacency_t).tocsr()
    b.eliminate_zeros()
    return b


def _row_scale(matrix: sp.csr_matrix, degree: np.ndarray) -> tuple[sp.csr_matrix, np.ndarray]:
    dangling = degree == 0
    inv = np.zeros_like(degree, dtype=np.float64)
    inv[~dangling] = 1.0 / degree[~dangling]
    return (sp.diags(inv) @ matrix).tocsr(), dangling


def matrix_view(g: SignedDigraph, kind: str) -> MatrixView:
    """Return the lazily-applied operator for one of :data:`VIEW_KINDS`.

    ``Laplacian`` is ``E - B`` with ``E_ii = sum_j |B_ij|`` taken literally:
    an edge pair ``u->v:+1``, ``v->u:-1`` cancels in ``B`` and adds nothing
    to the degree.
    """
    key = ("view", kind)
    if key in g._cache:
        return g._cache[key]
    a = g.adjacency
    dangling = None
    if kind == "A":
        mat = a
    elif kind == "A_abs":
        mat = abs(a).tocsr()
    elif kind == "A_transpose":
        mat = g.adjacency_t
    elif kind == "B":
        mat = _symmetric_sign_adjacency(g)
    elif kind == "B_abs":
        mat = (abs(a) + abs(g.adjacency_t)).tocsr()
    elif kind == "RowStochasticUnsigned":
        mat, dangling = _row_scale(abs(a).tocsr(), g.out_degree().astype(np.float64))
    elif kind == "RowStochasticSigned":
        mat, dangling = _row_scale(a, g.out_degree().astype(np.float64))
    elif kind == "RowStochasticSymmetric":
        b = _symmetric_sign_adjacency(g)
        e = np.asarray(abs(b).sum(axis=1)).ravel()
        mat, dangling = _row_scale(b, e)
    elif kind == "Laplacian":
        b = _symmetric_sign_adjacency(g)
        e = np.asarray(abs(b).sum(axis=1)).ravel()
        mat = (sp.diags(e) - b).tocsr()
        mat.eliminate_zeros()
    else:
        raise UsageError(f"unknown matrix view kind {kind!r}; expected one of {VIEW_KINDS}")
    view = MatrixView(g, kind, mat, dangling)
    g._cache[key] = view
    return view
