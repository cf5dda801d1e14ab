"""Backend dispatch for the hot loops.

The compiled extension ``wulffkit._kernels`` is used when it imports;
otherwise the NumPy/SciPy fallback in ``wulffkit._fallback`` is used.
``use_backend`` switches explicitly (tests and benchmarks run both).
"""

from __future__ import annotations

import numpy as np

from . import _fallback

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_BACKENDS = {"python": _fallback}
if _compiled is not None:
    _BACKENDS["compiled"] = _compiled

BACKEND = "compiled" if _compiled is not None else "python"
_impl = _BACKENDS[BACKEND]


def available_backends() -> tuple:
    return tuple(_BACKENDS)


def use_backend(name: str) -> str:
    """Select a backend by name; returns the previously active one."""
    global BACKEND, _impl
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(_BACKENDS)}")
    previous = BACKEND
    BACKEND, _impl = name, _BACKENDS[name]
    return previous


def seed_topk(x, seeds, weights, k: int) -> np.ndarray:
    """Indices of the ``k`` seeds maximising ``<x, seed> * weight``, best first."""
    return _impl.seed_topk(
        np.ascontiguousarray(x, dtype=float),
        np.ascontiguousarray(seeds, dtype=float),
        np.ascontiguousarray(weights, dtype=float),
        int(k),
    )


def directed_max_min(a, b):
    """``max_i min_j |a_i - b_j|`` and the attaining indices ``(i, j)``."""
    dist, i, j = _impl.directed_max_min(
        np.ascontiguousarray(a, dtype=float), np.ascontiguousarray(b, dtype=float)
    )
    return float(dist), int(i), int(j)
