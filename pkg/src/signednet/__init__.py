"""Analysis of signed directed social networks.

Submodules: ``graph`` (container, I/O, matrix views), ``stats``,
``clustering``, ``spectral``, ``ranking``, ``linkpred``, ``embedding``,
``synthetic`` and ``oracle`` (dense references), plus the ``cli``.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConvergenceError,
    DataError,
    DataWarning,
    ParseError,
    SignedNetError,
    UsageError,
)
from .graph import SignedDigraph, load_edge_list, matrix_view, read_edge_list  # noqa: E402

__all__ = [
    "ConvergenceError", "DataError", "DataWarning", "ParseError", "SignedNetError", "UsageError",
    "SignedDigraph", "load_edge_list", "matrix_view", "read_edge_list", "__version__",
]
