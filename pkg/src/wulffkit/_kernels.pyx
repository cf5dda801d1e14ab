# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops.

seed_topk      -- for each query x, the k seeds maximising <x, s_j> * w_j
directed_max_min -- max over a of min over b |a - b|, spatial-hash accelerated
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, floor, pow, INFINITY

cnp.import_array()


def seed_topk(const double[:, ::1] x, const double[:, ::1] seeds,
              const double[::1] weights, int k):
    cdef Py_ssize_t m = x.shape[0]
    cdef Py_ssize_t s = seeds.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    if d != 2 and d != 3:
        raise ValueError("points must be 2- or 3-dimensional")
    if k > s:
        k = <int>s
    # weights folded into the seeds: score_j = <x, w_j s_j>
    ws_np = np.zeros((s, 3))
    ws_np[:, :d] = np.asarray(seeds) * np.asarray(weights)[:, None]
    cdef double[:, ::1] ws = ws_np
    out = np.empty((m, k), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] idx = out
    cdef double[::1] best = np.empty(k)
    cdef Py_ssize_t i, j, pos, filled
    cdef double score, x0, x1, x2, floor_score
    for i in range(m):
        x0 = x[i, 0]
        x1 = x[i, 1]
        x2 = x[i, 2] if d == 3 else 0.0
        filled = 0
        floor_score = -INFINITY
        for j in range(s):
            score = x0 * ws[j, 0] + x1 * ws[j, 1] + x2 * ws[j, 2]
            if score <= floor_score:
                continue
            if filled < k:
                pos = filled
                filled += 1
            else:
                pos = k - 1
            # insertion keeps best[] sorted descending; ties keep the lower index
            while pos > 0 and best[pos - 1] < score:
                best[pos] = best[pos - 1]
                idx[i, pos] = idx[i, pos - 1]
                pos -= 1
            best[pos] = score
            idx[i, pos] = j
            if filled == k:
                floor_score = best[k - 1]
    return out


cdef inline Py_ssize_t _clamp(Py_ssize_t v, Py_ssize_t hi) nogil:
    if v < 0:
        return 0
    if v > hi:
        return hi
    return v


def directed_max_min(const double[:, ::1] a, const double[:, ::1] b):
    """Return (distance, index_a, index_b) of the directed Hausdorff distance."""
    cdef Py_ssize_t na = a.shape[0]
    cdef Py_ssize_t nb = b.shape[0]
    cdef Py_ssize_t d = a.shape[1]
    if na == 0 or nb == 0:
        raise ValueError("empty point set")
    if d != 2 and d != 3:
        raise ValueError("points must be 2- or 3-dimensional")

    b_np = np.asarray(b)
    lo_np = b_np.min(axis=0)
    hi_np = b_np.max(axis=0)
    extent = float(np.max(hi_np - lo_np))
    if extent <= 0.0:
        extent = 1.0
    # about two points per occupied cell on a (d-1)-dimensional sheet,
    # with the total cell count capped near 4 * nb
    cdef double cell = extent / max(1.0, pow(nb / 2.0, 1.0 / (d - 1)))
    cell = max(cell, extent / pow(4.0 * nb, 1.0 / d))
    dims_np = np.maximum(1, np.floor((hi_np - lo_np) / cell).astype(np.int64) + 1)
    if d == 2:
        dims_np = np.concatenate([dims_np, [1]])
        lo_np = np.concatenate([lo_np, [0.0]])
    cdef double[::1] lo = np.ascontiguousarray(lo_np, dtype=float)
    cdef Py_ssize_t nx = dims_np[0], ny = dims_np[1], nz = dims_np[2]

    coords = np.floor((b_np - lo_np[:d]) / cell).astype(np.int64)
    coords = np.minimum(coords, dims_np[:d] - 1)
    if d == 2:
        flat = coords[:, 0] * ny + coords[:, 1]
    else:
        flat = (coords[:, 0] * ny + coords[:, 1]) * nz + coords[:, 2]
    order_np = np.argsort(flat, kind="stable").astype(np.int64)
    counts = np.bincount(flat, minlength=nx * ny * nz)
    start_np = np.zeros(nx * ny * nz + 1, dtype=np.int64)
    np.cumsum(counts, out=start_np[1:])
    cdef cnp.int64_t[::1] order = order_np
    cdef cnp.int64_t[::1] start = start_np

    # a strided prepass finds a large running maximum early; afterwards each
    # query starts from the distance to the previous query's nearest point,
    # which often proves it cannot raise the maximum without any search
    stride = max(1, na // 256)
    visit_np = np.concatenate([np.arange(0, na, stride), np.arange(na)]).astype(np.int64)
    cdef cnp.int64_t[::1] visit = visit_np
    cdef Py_ssize_t nvisit = visit.shape[0]

    cdef double cmax = -1.0
    cdef Py_ssize_t arg_a = -1, arg_b = 0, prev_b = -1
    cdef Py_ssize_t v, i, ix, iy, iz, r, jx, jy, jz, q, cidx, bi, best_b
    cdef Py_ssize_t rmax = max(nx, max(ny, nz))
    cdef double best, dist, diff, ax, ay, az
    cdef bint stop
    for v in range(nvisit):
        i = visit[v]
        ax = a[i, 0]
        ay = a[i, 1]
        az = a[i, 2] if d == 3 else 0.0
        best = INFINITY
        best_b = -1
        if prev_b >= 0:
            diff = b[prev_b, 0] - ax
            best = diff * diff
            diff = b[prev_b, 1] - ay
            best += diff * diff
            if d == 3:
                diff = b[prev_b, 2] - az
                best += diff * diff
            best_b = prev_b
            if cmax >= 0.0 and best < cmax * cmax:
                continue  # cannot raise the running maximum
        ix = _clamp(<Py_ssize_t>floor((ax - lo[0]) / cell), nx - 1)
        iy = _clamp(<Py_ssize_t>floor((ay - lo[1]) / cell), ny - 1)
        iz = _clamp(<Py_ssize_t>floor((az - lo[2]) / cell), nz - 1) if d == 3 else 0
        stop = False
        r = 0
        while r <= rmax and not stop:
            for jx in range(ix - r, ix + r + 1):
                if jx < 0 or jx >= nx:
                    continue
                for jy in range(iy - r, iy + r + 1):
                    if jy < 0 or jy >= ny:
                        continue
                    for jz in range(iz - r, iz + r + 1):
                        if jz < 0 or jz >= nz:
                            continue
                        # only the shell of the cube at Chebyshev radius r
                        if (jx != ix - r and jx != ix + r and jy != iy - r
                                and jy != iy + r and jz != iz - r and jz != iz + r):
                            continue
                        cidx = (jx * ny + jy) * nz + jz
                        for q in range(start[cidx], start[cidx + 1]):
                            bi = order[q]
                            diff = b[bi, 0] - ax
                            dist = diff * diff
                            diff = b[bi, 1] - ay
                            dist += diff * diff
                            if d == 3:
                                diff = b[bi, 2] - az
                                dist += diff * diff
                            if dist < best or (dist == best and bi < best_b):
                                best = dist
                                best_b = bi
            # cells beyond shell r lie at least r*cell away
            if sqrt(best) <= r * cell:
                stop = True
            elif cmax >= 0.0 and best < cmax * cmax:
                stop = True
            r += 1
        prev_b = best_b
        dist = sqrt(best)
        if dist > cmax or (dist == cmax and i < arg_a):
            cmax = dist
            arg_a = i
            arg_b = best_b
    return cmax, arg_a, arg_b
