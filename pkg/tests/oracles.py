"""Independent brute-force references used to freeze expected values.

Deliberately simple and slow: dense barycentric grids with only in-cell
edges, plus plain Dijkstra. No unfolding, no kernels, no shared helper
code with the package internals beyond the chart layouts.
"""

import heapq
import math

import numpy as np


def _triangle_chart(lengths):
    l0, l1, l2 = (float(v) for v in lengths)
    x = (l0 * l0 + l2 * l2 - l1 * l1) / (2.0 * l0)
    y = math.sqrt(max(l2 * l2 - x * x, 0.0))
    return np.array([[0.0, 0.0], [l0, 0.0], [x, y]])


def dense_surface_distance(surface, v1, v2, n=14):
    """Geodesic distance between vertex orbits via a dense grid graph.

    Accuracy is limited by bending only at grid nodes on triangle
    boundaries; with n around 14 it lands within a couple of percent.
    """
    multis = [
        (i, j, n - i - j) for i in range(n + 1) for j in range(n + 1 - i)
    ]
    index = {mi: g for g, mi in enumerate(multis)}
    G = len(multis)
    m = surface.num_triangles

    # identify nodes across gluings with a plain dict-based merge
    parent = list(range(m * G))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for (t, k), (t2, k2) in surface.gluings.items():
        if (t, k) > (t2, k2):
            continue
        for mi, g in index.items():
            if mi[(k + 2) % 3] != 0:
                continue
            mi2 = [0, 0, 0]
            mi2[k2] = mi[(k + 1) % 3]
            mi2[(k2 + 1) % 3] = mi[k]
            union(t * G + g, t2 * G + index[tuple(mi2)])

    adj = {}
    bary = np.array(multis, dtype=np.float64) / n
    for t in range(m):
        pts = bary @ _triangle_chart(surface.lengths[t])
        for a in range(G):
            ra = find(t * G + a)
            for b in range(a + 1, G):
                rb = find(t * G + b)
                w = float(np.linalg.norm(pts[a] - pts[b]))
                adj.setdefault(ra, []).append((rb, w))
                adj.setdefault(rb, []).append((ra, w))

    orbit_ids, _ = surface.vertex_orbits()

    def vertex_node(v):
        t, c = (int(x) for x in np.argwhere(orbit_ids == v)[0])
        mi = [0, 0, 0]
        mi[c] = n
        return find(t * G + index[tuple(mi)])

    src, dst = vertex_node(v1), vertex_node(v2)
    dist = {src: 0.0}
    heap = [(0.0, src)]
    while heap:
        d, node = heapq.heappop(heap)
        if node == dst:
            return d
        if d > dist.get(node, math.inf):
            continue
        for nb, w in adj.get(node, ()):
            nd = d + w
            if nd < dist.get(nb, math.inf):
                dist[nb] = nd
                heapq.heappush(heap, (nd, nb))
    raise RuntimeError("target unreachable")


# distances frozen from closed-form unfoldings of the standard solids
CUBE_ANTIPODAL = math.sqrt(5.0)  # unit cube, opposite corners
OCTAHEDRON_ANTIPODAL = math.sqrt(3.0)  # unit octahedron, opposite vertices
TETRAHEDRON_VERTEX_PAIR = 1.0  # unit tetrahedron, any two vertices
BOX_112_ANTIPODAL = 2.0 * math.sqrt(2.0)  # 1 x 1 x 2 box, opposite corners
