"""Pure-numpy reference implementations of the graph kernels.

Semantics are shared with the numba backend; keep the two in sync.
"""

import numpy as np

_TRIU_CACHE = {}


def _triu_pairs(k):
    if k not in _TRIU_CACHE:
        _TRIU_CACHE[k] = np.triu_indices(k, 1)
    return _TRIU_CACHE[k]


def complete_edges(points, starts, counts):
    """All unordered point pairs within each cell, with euclidean lengths.

    points : (n, d) float array, cells stored contiguously
    starts, counts : (ncells,) int arrays; cell c is points[starts[c]:starts[c]+counts[c]]

    Returns (i, j, dist) with i < j global indices into points.
    """
    ii, jj, dd = [], [], []
    for s, k in zip(starts, counts):
        if k < 2:
            continue
        a, b = _triu_pairs(int(k))
        diffs = points[s + a] - points[s + b]
        ii.append(s + a)
        jj.append(s + b)
        dd.append(np.sqrt(np.einsum("ij,ij->i", diffs, diffs)))
    if not ii:
        return (
            np.empty(0, np.int64),
            np.empty(0, np.int64),
            np.empty(0, np.float64),
        )
    return (
        np.concatenate(ii).astype(np.int64),
        np.concatenate(jj).astype(np.int64),
        np.concatenate(dd),
    )


def gate_chain_edges(pa, pb, normals, offsets, fmats, foffs, slack):
    """Straight-segment edges from pa to pb through an ordered gate chain.

    A pair (p, q) is kept when the segment p -> q crosses every gate in
    order: crossing parameters t_g lie in [-slack_t, 1 + slack_t], are
    nondecreasing, and each crossing point satisfies the gate's affine
    containment functionals >= -slack.

    pa : (na, d), pb : (nb, d)
    normals : (k, d) gate plane normals, offsets : (k,) so the plane is
        dot(n, x) == offset
    fmats : (k, m, d), foffs : (k, m) affine functionals, inside means
        fmats[g] @ x + foffs[g] >= 0 componentwise
    slack : nonnegative float tolerance

    Returns (ia, ib, dist) index arrays into pa / pb.
    """
    na, nb = len(pa), len(pb)
    if na == 0 or nb == 0 or len(normals) == 0:
        e = np.empty(0, np.int64)
        return e, e.copy(), np.empty(0, np.float64)

    pan = pa @ normals.T  # (na, k)
    pbn = pb @ normals.T  # (nb, k)
    den = pbn[None, :, :] - pan[:, None, :]  # (na, nb, k)
    num = offsets[None, None, :] - pan[:, None, :]
    ok = np.abs(den) > 1e-300
    t = np.where(ok, num / np.where(ok, den, 1.0), np.inf)

    valid = np.all(ok, axis=2)
    valid &= np.all(t >= -slack, axis=2)
    valid &= np.all(t <= 1.0 + slack, axis=2)
    if t.shape[2] > 1:
        valid &= np.all(np.diff(t, axis=2) >= -slack, axis=2)

    # containment at each crossing point
    x = pa[:, None, None, :] + t[..., None] * (pb[None, :, None, :] - pa[:, None, None, :])
    # x: (na, nb, k, d); functional values: (na, nb, k, m)
    fv = np.einsum("kmd,abkd->abkm", fmats, x) + foffs[None, None, :, :]
    valid &= np.all(fv >= -slack, axis=(2, 3))

    diff = pb[None, :, :] - pa[:, None, :]
    dist = np.sqrt(np.einsum("abd,abd->ab", diff, diff))
    valid &= dist > 1e-12

    ia, ib = np.nonzero(valid)
    return ia.astype(np.int64), ib.astype(np.int64), dist[ia, ib]
