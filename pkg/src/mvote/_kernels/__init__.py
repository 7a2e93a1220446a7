"""Hot kernels: integer max-flow and bipartite matching.

The compiled extension is used when it imports and the inputs fit in 64-bit
integers; otherwise the pure-Python twin runs. Set ``MVOTE_PURE_PYTHON=1`` to
force the fallback.
"""

import os

from . import _pykernels

try:
    if os.environ.get("MVOTE_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python kernels forced by MVOTE_PURE_PYTHON")
    from . import _ckernels
except ImportError:
    _ckernels = None

BACKEND = "cython" if _ckernels is not None else "python"

# total capacity must stay well inside a signed 64-bit accumulator
_INT64_SAFE = 1 << 62


def max_flow(cap, s, t, backend=None):
    """Maximum s-t flow over a dense integer capacity matrix.

    Returns ``(value, flow, source_side)``; see ``_pykernels.max_flow``.
    """
    impl = _pick(backend)
    if impl is _ckernels:
        total = sum(sum(row) for row in cap)
        if total >= _INT64_SAFE:
            impl = _pykernels
    return impl.max_flow(cap, s, t)


def bipartite_matching(adj, n_right, backend=None):
    """Maximum matching by augmenting paths; ``-1`` marks unmatched left vertices."""
    return _pick(backend).bipartite_matching(adj, n_right)


def _pick(backend):
    if backend is None:
        return _ckernels if _ckernels is not None else _pykernels
    if backend == "python":
        return _pykernels
    if backend == "cython":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not available")
        return _ckernels
    raise ValueError(f"unknown kernel backend {backend!r}")
