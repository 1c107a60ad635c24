"""Numba backend. Loop twins of the numpy kernels."""

import numpy as np
from numba import njit


@njit(cache=True)
def _complete_edges_jit(points, starts, counts):
    total = 0
    for c in range(len(starts)):
        k = counts[c]
        total += k * (k - 1) // 2
    ii = np.empty(total, np.int64)
    jj = np.empty(total, np.int64)
    dd = np.empty(total, np.float64)
    pos = 0
    d = points.shape[1]
    for c in range(len(starts)):
        s = starts[c]
        k = counts[c]
        for a in range(k):
            for b in range(a + 1, k):
                acc = 0.0
                for t in range(d):
                    dv = points[s + a, t] - points[s + b, t]
                    acc += dv * dv
                ii[pos] = s + a
                jj[pos] = s + b
                dd[pos] = np.sqrt(acc)
                pos += 1
    return ii, jj, dd


def complete_edges(points, starts, counts):
    return _complete_edges_jit(
        np.ascontiguousarray(points, np.float64),
        np.ascontiguousarray(starts, np.int64),
        np.ascontiguousarray(counts, np.int64),
    )


@njit(cache=True)
def _gate_chain_edges_jit(pa, pb, normals, offsets, fmats, foffs, slack):
    na = pa.shape[0]
    nb = pb.shape[0]
    k = normals.shape[0]
    m = fmats.shape[1]
    d = pa.shape[1]
    cap = na * nb
    ia = np.empty(cap, np.int64)
    ib = np.empty(cap, np.int64)
    dist = np.empty(cap, np.float64)
    pos = 0
    for i in range(na):
        for j in range(nb):
            acc = 0.0
            for t in range(d):
                dv = pb[j, t] - pa[i, t]
                acc += dv * dv
            length = np.sqrt(acc)
            if length <= 1e-12:
                continue
            prev_t = -slack
            good = True
            for g in range(k):
                den = 0.0
                num = offsets[g]
                for t in range(d):
                    den += normals[g, t] * (pb[j, t] - pa[i, t])
                    num -= normals[g, t] * pa[i, t]
                if abs(den) <= 1e-300:
                    good = False
                    break
                tg = num / den
                if tg < -slack or tg > 1.0 + slack or tg < prev_t - slack:
                    good = False
                    break
                prev_t = tg
                for r in range(m):
                    fv = foffs[g, r]
                    for t in range(d):
                        fv += fmats[g, r, t] * (pa[i, t] + tg * (pb[j, t] - pa[i, t]))
                    if fv < -slack:
                        good = False
                        break
                if not good:
                    break
            if good:
                ia[pos] = i
                ib[pos] = j
                dist[pos] = length
                pos += 1
    return ia[:pos], ib[:pos], dist[:pos]


def gate_chain_edges(pa, pb, normals, offsets, fmats, foffs, slack):
    if len(pa) == 0 or len(pb) == 0 or len(normals) == 0:
        e = np.empty(0, np.int64)
        return e, e.copy(), np.empty(0, np.float64)
    return _gate_chain_edges_jit(
        np.ascontiguousarray(pa, np.float64),
        np.ascontiguousarray(pb, np.float64),
        np.ascontiguousarray(normals, np.float64),
        np.ascontiguousarray(offsets, np.float64),
        np.ascontiguousarray(fmats, np.float64),
        np.ascontiguousarray(foffs, np.float64),
        float(slack),
    )
