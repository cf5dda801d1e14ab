"""Pure-Python implementations of the compiled kernels (same contracts)."""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

_CHUNK = 2048


def seed_topk(x: np.ndarray, seeds: np.ndarray, weights: np.ndarray, k: int) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=float)
    k = min(k, seeds.shape[0])
    weighted = seeds * weights[:, None]
    out = np.empty((x.shape[0], k), dtype=np.int64)
    for lo in range(0, x.shape[0], _CHUNK):
        scores = x[lo : lo + _CHUNK] @ weighted.T
        part = np.argpartition(-scores, k - 1, axis=1)[:, :k]
        top = np.take_along_axis(scores, part, axis=1)
        # descending score, lower index first on ties (as the compiled kernel)
        order = _rowwise_order(top, part)
        out[lo : lo + _CHUNK] = np.take_along_axis(part, order, axis=1)
    return out


def _rowwise_order(top: np.ndarray, part: np.ndarray) -> np.ndarray:
    by_index = np.argsort(part, axis=1, kind="stable")
    top_sorted = np.take_along_axis(top, by_index, axis=1)
    by_score = np.argsort(-top_sorted, axis=1, kind="stable")
    return np.take_along_axis(by_index, by_score, axis=1)


def directed_max_min(a: np.ndarray, b: np.ndarray):
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise ValueError("empty point set")
    tree = cKDTree(b)
    # a strided sample bounds the maximum from below; only queries whose
    # nearest neighbour lies beyond that bound need an unbounded search
    sample = np.arange(0, a.shape[0], max(1, a.shape[0] // 256))
    bound = float(tree.query(a[sample], k=1)[0].max())
    near, _ = tree.query(a, k=1, distance_upper_bound=bound)
    cand = np.flatnonzero(~(near < bound))
    dist, idx = tree.query(a[cand], k=1)
    j = int(np.argmax(dist))
    return float(dist[j]), int(cand[j]), int(idx[j])
