"""Geodesic distance approximation on surfaces and 4-complexes.

Both graphs share the same construction: a barycentric grid of nodes in
every cell, identified across gluings, a complete edge set inside each
cell, and shortcut edges from unfolding chains of neighboring cells into
a common chart and keeping straight segments that cross every shared
wall inside the wall. A geodesic whose cell sequence is short enough is
then represented exactly by a single graph edge; longer ones are
concatenations of exact pieces, so the grid resolution only enters
through corner terms.
"""

import math

import numpy as np
import scipy.sparse
import scipy.sparse.csgraph

from .config import Config
from .errors import InvalidInput
from .kernels import complete_edges, gate_chain_edges
from .surface import triangle_coords


def _dedupe(n_nodes, i, j, w):
    """Symmetric CSR matrix keeping the minimum weight per node pair."""
    keep = i != j
    i, j, w = i[keep], j[keep], w[keep]
    lo, hi = np.minimum(i, j), np.maximum(i, j)
    order = np.lexsort((hi, lo))
    lo, hi, w = lo[order], hi[order], w[order]
    if len(lo):
        new = np.empty(len(lo), dtype=bool)
        new[0] = True
        new[1:] = (lo[1:] != lo[:-1]) | (hi[1:] != hi[:-1])
        starts = np.nonzero(new)[0]
        w = np.minimum.reduceat(w, starts)
        lo, hi = lo[starts], hi[starts]
    mat = scipy.sparse.csr_matrix(
        (np.concatenate([w, w]), (np.concatenate([lo, hi]), np.concatenate([hi, lo]))),
        shape=(n_nodes, n_nodes),
    )
    return mat


def _grid_multi_indices(n, dims):
    """All nonnegative integer tuples of length dims summing to n."""
    if dims == 1:
        return [(n,)]
    out = []
    for head in range(n + 1):
        for rest in _grid_multi_indices(n - head, dims - 1):
            out.append((head,) + rest)
    return out


class _UnionFind:
    def __init__(self, n):
        self.parent = np.arange(n, dtype=np.int64)

    def find(self, x):
        root = x
        p = self.parent
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)

    def representatives(self):
        n = len(self.parent)
        reps = np.array([self.find(i) for i in range(n)], dtype=np.int64)
        uniq, compact = np.unique(reps, return_inverse=True)
        return compact, len(uniq)


class SurfaceGeodesicGraph:
    """Geodesic distances on a triangulated surface.

    Nodes sit on a barycentric grid in each triangle. Shortcut edges
    come from unfolding every chain of up to ``surface_unfold_depth``
    side crossings, so any geodesic crossing at most that many sides
    between two nodes is measured exactly.
    """

    def __init__(self, surface, config=None):
        self.surface = surface
        self.config = config or Config()
        self._build()

    def _build(self):
        surf = self.surface
        cfg = self.config
        n = cfg.surface_subdivision
        m = surf.num_triangles

        multis = _grid_multi_indices(n, 3)
        self._multi_index = {mi: g for g, mi in enumerate(multis)}
        G = len(multis)
        self._grid_size = G
        bary = np.array(multis, dtype=np.float64) / n  # (G, 3)

        charts = [triangle_coords(surf.lengths[t]) for t in range(m)]
        self._charts = charts
        points = np.concatenate([bary @ charts[t] for t in range(m)])  # (m*G, 2)

        uf = _UnionFind(m * G)
        for (t, k), (t2, k2) in surf.gluings.items():
            if (t, k) > (t2, k2):
                continue
            for mi, g in self._multi_index.items():
                if mi[(k + 2) % 3] != 0:
                    continue
                mi2 = [0, 0, 0]
                mi2[k2] = mi[(k + 1) % 3]
                mi2[(k2 + 1) % 3] = mi[k]
                g2 = self._multi_index[tuple(mi2)]
                uf.union(t * G + g, t2 * G + g2)
        reps, n_reps = uf.representatives()
        self._reps = reps
        self.num_nodes = n_reps

        starts = np.arange(m, dtype=np.int64) * G
        counts = np.full(m, G, dtype=np.int64)
        ii, jj, ww = complete_edges(points, starts, counts)
        edges = [(ii, jj, ww)]

        scale = float(surf.lengths.max())
        slack = 1e-9 * scale
        for t0 in range(m):
            edges.extend(self._chain_edges(t0, charts, bary, slack))

        all_i = np.concatenate([reps[e[0]] for e in edges])
        all_j = np.concatenate([reps[e[1]] for e in edges])
        all_w = np.concatenate([e[2] for e in edges])
        self._matrix = _dedupe(n_reps, all_i, all_j, all_w)
        self._dist_cache = {}

    def _chain_edges(self, t0, charts, bary, slack):
        """Unfold chains out of triangle t0 and keep valid straight edges."""
        surf = self.surface
        G = self._grid_size
        depth = self.config.surface_unfold_depth
        src = bary @ charts[t0]
        out = []
        # stack entries: (triangle, entry side, rotation, shift, gates)
        stack = []
        for k in range(3):
            stack.append((t0, k, np.eye(2), np.zeros(2), ()))
        while stack:
            t_cur, k, rot, shift, gates = stack.pop()
            t2, k2 = surf.gluings[(t_cur, k)]
            r2, v2 = _side_transition(charts, surf, t_cur, k, t2, k2)
            rot2 = rot @ r2
            shift2 = rot @ v2 + shift
            a = rot @ charts[t_cur][k] + shift
            b = rot @ charts[t_cur][(k + 1) % 3] + shift
            gates2 = gates + ((a, b),)
            tgt = (bary @ charts[t2]) @ rot2.T + shift2
            normals = np.empty((len(gates2), 2))
            offsets = np.empty(len(gates2))
            fmats = np.empty((len(gates2), 2, 2))
            foffs = np.empty((len(gates2), 2))
            for g, (ga, gb) in enumerate(gates2):
                u = gb - ga
                u = u / np.linalg.norm(u)
                normals[g] = (-u[1], u[0])
                offsets[g] = normals[g] @ ga
                fmats[g, 0] = u
                foffs[g, 0] = -u @ ga
                fmats[g, 1] = -u
                foffs[g, 1] = u @ gb
            ia, ib, w = gate_chain_edges(src, tgt, normals, offsets, fmats, foffs, slack)
            if len(ia):
                out.append((t0 * G + ia, t2 * G + ib, w))
            if len(gates2) < depth:
                for k_next in range(3):
                    if k_next == k2:
                        continue
                    stack.append((t2, k_next, rot2, shift2, gates2))
        return out

    # -- queries -------------------------------------------------------

    def vertex_node(self, vertex_id):
        """Graph node id of a surface vertex."""
        orbit_ids, _ = self.surface.vertex_orbits()
        t, c = (int(x) for x in np.argwhere(orbit_ids == vertex_id)[0])
        n = self.config.surface_subdivision
        mi = [0, 0, 0]
        mi[c] = n
        return int(self._reps[t * self._grid_size + self._multi_index[tuple(mi)]])

    def distances_from(self, node):
        if node not in self._dist_cache:
            self._dist_cache[node] = scipy.sparse.csgraph.dijkstra(
                self._matrix, indices=node
            )
        return self._dist_cache[node]

    def distance_between_vertices(self, v1, v2):
        return float(self.distances_from(self.vertex_node(v1))[self.vertex_node(v2)])

    def cone_point_distances(self, tol=1e-6):
        """Pairwise geodesic distances between cone points, in the order
        returned by ``surface.cone_points``."""
        cones = [v for v, _ in self.surface.cone_points(tol=tol)]
        nodes = [self.vertex_node(v) for v in cones]
        out = np.zeros((len(nodes), len(nodes)))
        for i, node in enumerate(nodes):
            d = self.distances_from(node)
            out[i] = [d[other] for other in nodes]
        return 0.5 * (out + out.T)


def _side_transition(charts, surf, t1, k, t2, k2):
    """Rigid motion taking triangle t2's chart across side k of t1."""
    q0 = charts[t1][k]
    q1 = charts[t1][(k + 1) % 3]
    p0 = charts[t2][(k2 + 1) % 3]
    p1 = charts[t2][k2]
    dq = q1 - q0
    dp = p1 - p0
    dq = dq / np.linalg.norm(dq)
    dp = dp / np.linalg.norm(dp)
    c = dp @ dq
    s = dp[0] * dq[1] - dp[1] * dq[0]
    rot = np.array([[c, -s], [s, c]])
    return rot, q0 - rot @ p0


class AmbientGraph:
    """Geodesic distances inside a metric simplicial 4-complex.

    Extra off-grid sample points can be attached to named simplices at
    construction; they participate in both the in-cell complete graphs
    and the unfolding shortcuts.
    """

    def __init__(self, complex4, extra_points=(), config=None):
        self.complex = complex4
        self.config = config or Config()
        self.extra_points = [
            (int(s), np.asarray(b, dtype=np.float64)) for s, b in extra_points
        ]
        for s, b in self.extra_points:
            if b.shape != (5,) or abs(b.sum() - 1.0) > 1e-9 or np.any(b < -1e-12):
                raise InvalidInput("extra points need barycentric weights (5,)")
        self._build()

    def _build(self):
        cx = self.complex
        cfg = self.config
        n = cfg.ambient_subdivision
        m = cx.num_simplices

        multis = _grid_multi_indices(n, 5)
        self._multi_index = {mi: g for g, mi in enumerate(multis)}
        G = len(multis)
        bary = np.array(multis, dtype=np.float64) / n  # (G, 5)

        extras_by_cell = {}
        for idx, (s, b) in enumerate(self.extra_points):
            extras_by_cell.setdefault(s, []).append((idx, b))

        charts = cx.charts()
        cell_points = []
        starts = np.zeros(m, dtype=np.int64)
        counts = np.zeros(m, dtype=np.int64)
        self._extra_node = {}
        pos = 0
        for s in range(m):
            pts = [bary @ charts[s]]
            for idx, b in extras_by_cell.get(s, ()):
                pts.append((b @ charts[s])[None, :])
                self._extra_node[idx] = pos + G + len(pts) - 2
            block = np.concatenate(pts)
            starts[s] = pos
            counts[s] = len(block)
            cell_points.append(block)
            pos += len(block)
        points = np.concatenate(cell_points)
        total = pos
        self._starts, self._counts = starts, counts

        uf = _UnionFind(total)
        for (s, f), (s2, f2, perm) in cx.gluings.items():
            if (s, f) > (s2, f2):
                continue
            fl = [v for v in range(5) if v != f]
            for mi, g in self._multi_index.items():
                if mi[f] != 0:
                    continue
                mi2 = [0] * 5
                for i, v in enumerate(fl):
                    mi2[perm[i]] = mi[v]
                g2 = self._multi_index[tuple(mi2)]
                uf.union(starts[s] + g, starts[s2] + g2)
        reps, n_reps = uf.representatives()
        self._reps = reps
        self.num_nodes = n_reps

        ii, jj, ww = complete_edges(points, starts, counts)
        edges = [(ii, jj, ww)]

        scale = float(cx.edge_lengths.max())
        slack = 1e-9 * scale
        for s0 in range(m):
            edges.extend(self._chain_edges(s0, charts, cell_points, slack))

        all_i = np.concatenate([reps[e[0]] for e in edges])
        all_j = np.concatenate([reps[e[1]] for e in edges])
        all_w = np.concatenate([e[2] for e in edges])
        self._matrix = _dedupe(n_reps, all_i, all_j, all_w)
        self._dist_cache = {}

    def _chain_edges(self, s0, charts, cell_points, slack):
        cx = self.complex
        depth = self.config.ambient_unfold_depth
        src = cell_points[s0]
        out = []
        stack = [(s0, f, np.eye(4), np.zeros(4), ()) for f in range(5)]
        while stack:
            s_cur, f, rot, shift, gates = stack.pop()
            s2, f2, _ = cx.gluings[(s_cur, f)]
            r2, v2 = cx.facet_transition(s_cur, f)
            rot2 = rot @ r2
            shift2 = rot @ v2 + shift
            fl = [v for v in range(5) if v != f]
            gate_pts = charts[s_cur][fl] @ rot.T + shift
            gates2 = gates + (gate_pts,)
            tgt = cell_points[s2] @ rot2.T + shift2

            k = len(gates2)
            normals = np.empty((k, 4))
            offsets = np.empty(k)
            fmats = np.empty((k, 4, 4))
            foffs = np.empty((k, 4))
            for g, q in enumerate(gates2):
                span = np.column_stack([q[1] - q[0], q[2] - q[0], q[3] - q[0]])
                u, _, _ = np.linalg.svd(span, full_matrices=True)
                nrm = u[:, 3]
                normals[g] = nrm
                offsets[g] = nrm @ q[0]
                a = np.column_stack([span, nrm])
                ainv = np.linalg.inv(a)
                r = ainv[:3]  # rows: barycentric gradients for q1..q3
                fmats[g, 1:] = r
                foffs[g, 1:] = -r @ q[0]
                fmats[g, 0] = -r.sum(axis=0)
                foffs[g, 0] = 1.0 + r.sum(axis=0) @ q[0]
            ia, ib, w = gate_chain_edges(src, tgt, normals, offsets, fmats, foffs, slack)
            if len(ia):
                out.append((self._starts[s0] + ia, self._starts[s2] + ib, w))
            if k < depth:
                for f_next in range(5):
                    if f_next == f2:
                        continue
                    stack.append((s2, f_next, rot2, shift2, gates2))
        return out

    # -- queries -------------------------------------------------------

    def vertex_node(self, s, local_vertex):
        """Graph node of local vertex ``local_vertex`` of simplex ``s``."""
        n = self.config.ambient_subdivision
        mi = [0] * 5
        mi[local_vertex] = n
        return int(self._reps[self._starts[s] + self._multi_index[tuple(mi)]])

    def extra_node(self, idx):
        """Graph node of the idx-th extra point passed at construction."""
        return int(self._reps[self._extra_node[idx]])

    def distances_from(self, node):
        if node not in self._dist_cache:
            self._dist_cache[node] = scipy.sparse.csgraph.dijkstra(
                self._matrix, indices=node
            )
        return self._dist_cache[node]

    def distance(self, node_a, node_b):
        return float(self.distances_from(node_a)[node_b])
