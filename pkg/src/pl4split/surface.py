"""Intrinsic triangulated surfaces with edge-length metrics.

A surface is a set of triangles with per-side lengths and an involutive
side gluing. Vertex labels name points but identification is carried by
the gluing records, so repeated labels (doubled triangles, branched
covers, simplified meshes) are fine. All gluings reverse boundary
orientation, keeping the surface oriented.

Side convention: side k of a triangle joins its local vertices k and
(k + 1) % 3; the corner at local vertex k sits between sides k and
(k + 2) % 3, opposite side (k + 1) % 3.
"""

import math

import numpy as np

from .errors import InvalidInput

_TWO_PI = 2.0 * math.pi


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def triangle_coords(lengths):
    """Planar coordinates (3, 2) of a triangle, counterclockwise.

    Vertex 0 at the origin, vertex 1 on the positive x-axis.
    """
    l0, l1, l2 = (float(v) for v in lengths)
    x = (l0 * l0 + l2 * l2 - l1 * l1) / (2.0 * l0)
    y2 = l2 * l2 - x * x
    if y2 <= 0:
        raise InvalidInput(f"degenerate triangle with sides {lengths}")
    return np.array([[0.0, 0.0], [l0, 0.0], [x, math.sqrt(y2)]])


def corner_angles_from_lengths(lengths):
    """Corner angles (m, 3) from side lengths (m, 3) via the law of cosines."""
    lengths = np.asarray(lengths, dtype=np.float64)
    out = np.empty_like(lengths)
    for i in range(3):
        a = lengths[:, i]  # side from corner i
        b = lengths[:, (i + 2) % 3]  # side into corner i
        c = lengths[:, (i + 1) % 3]  # opposite side
        cosine = (a * a + b * b - c * c) / (2.0 * a * b)
        out[:, i] = np.arccos(np.clip(cosine, -1.0, 1.0))
    return out


class TriSurface:
    """Closed oriented polyhedral surface."""

    def __init__(self, triangles, lengths, gluings):
        self.triangles = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
        self.lengths = np.asarray(lengths, dtype=np.float64).reshape(-1, 3)
        if self.triangles.shape[0] != self.lengths.shape[0]:
            raise InvalidInput("triangle and length counts differ")
        self.gluings = dict(gluings)
        self._orbit_cache = None

    @classmethod
    def from_triangles(cls, triangles, lengths):
        """Derive gluings by matching vertex-label pairs.

        Each unordered label pair must bound exactly two sides, in
        opposite orders. Only usable when labels are globally faithful.
        """
        triangles = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
        sides = {}
        gluings = {}
        for t in range(triangles.shape[0]):
            for k in range(3):
                a, b = triangles[t, k], triangles[t, (k + 1) % 3]
                if a == b:
                    raise InvalidInput(f"side with equal endpoints in triangle {t}")
                key = (min(a, b), max(a, b))
                sides.setdefault(key, []).append((t, k, a))
        for key, found in sides.items():
            if len(found) != 2:
                raise InvalidInput(
                    f"edge {key} bounds {len(found)} sides, expected 2"
                )
            (t1, k1, a1), (t2, k2, a2) = found
            if a1 == a2:
                raise InvalidInput(f"edge {key} traversed twice in the same order")
            gluings[(t1, k1)] = (t2, k2)
            gluings[(t2, k2)] = (t1, k1)
        return cls(triangles, lengths, gluings)

    # -- combinatorics ------------------------------------------------

    @property
    def num_triangles(self):
        return self.triangles.shape[0]

    def num_edges(self):
        return 3 * self.num_triangles // 2

    def validate(self, tol=1e-9):
        m = self.num_triangles
        if m == 0:
            raise InvalidInput("empty surface")
        if not np.all(np.isfinite(self.lengths)) or np.any(self.lengths <= 0):
            raise InvalidInput("side lengths must be positive and finite")
        for i in range(3):
            a = self.lengths[:, i]
            b = self.lengths[:, (i + 1) % 3]
            c = self.lengths[:, (i + 2) % 3]
            if not np.all(a < b + c - 0.0):
                bad = int(np.argmin((b + c) - a))
                raise InvalidInput(f"triangle inequality fails in triangle {bad}")
        seen = set()
        for (t, k), (t2, k2) in self.gluings.items():
            if not (0 <= t < m and 0 <= k < 3):
                raise InvalidInput(f"gluing references missing side ({t}, {k})")
            if self.gluings.get((t2, k2)) != (t, k):
                raise InvalidInput(f"gluing at ({t}, {k}) is not involutive")
            if (t, k) == (t2, k2):
                raise InvalidInput(f"side ({t}, {k}) glued to itself")
            la, lb = self.lengths[t, k], self.lengths[t2, k2]
            if abs(la - lb) > tol * max(1.0, la):
                raise InvalidInput(f"glued sides ({t},{k})~({t2},{k2}) differ in length")
            seen.add((t, k))
        if len(seen) != 3 * m:
            raise InvalidInput("surface has unglued sides")
        # connectivity over the face adjacency graph
        stack, visited = [0], {0}
        while stack:
            t = stack.pop()
            for k in range(3):
                t2 = self.gluings[(t, k)][0]
                if t2 not in visited:
                    visited.add(t2)
                    stack.append(t2)
        if len(visited) != m:
            raise InvalidInput("surface is not connected")
        return self

    def _orbits(self):
        """Union-find identification of triangle corners into vertices."""
        if self._orbit_cache is not None:
            return self._orbit_cache
        m = self.num_triangles
        uf = _UnionFind(3 * m)
        for (t, k), (t2, k2) in self.gluings.items():
            # orientation-reversing: local k <-> local k2+1, k+1 <-> k2
            uf.union(3 * t + k, 3 * t2 + (k2 + 1) % 3)
            uf.union(3 * t + (k + 1) % 3, 3 * t2 + k2)
        roots = [uf.find(i) for i in range(3 * m)]
        order = {}
        ids = np.empty(3 * m, dtype=np.int64)
        for i, r in enumerate(roots):
            ids[i] = order.setdefault(r, len(order))
        self._orbit_cache = (ids.reshape(m, 3), len(order))
        return self._orbit_cache

    def vertex_orbits(self):
        """(m, 3) array of vertex ids per corner, and the vertex count."""
        return self._orbits()

    def euler_characteristic(self):
        _, nv = self._orbits()
        return nv - self.num_edges() + self.num_triangles

    # -- metric quantities --------------------------------------------

    def corner_angles(self):
        return corner_angles_from_lengths(self.lengths)

    def triangle_areas(self):
        a, b, c = self.lengths[:, 0], self.lengths[:, 1], self.lengths[:, 2]
        s = 0.5 * (a + b + c)
        return np.sqrt(np.maximum(s * (s - a) * (s - b) * (s - c), 0.0))

    def area(self):
        return float(self.triangle_areas().sum())

    def angle_defects(self):
        """Angle defect 2*pi - (cone angle) per vertex id."""
        orbit_ids, nv = self._orbits()
        sums = np.zeros(nv)
        np.add.at(sums, orbit_ids.reshape(-1), self.corner_angles().reshape(-1))
        return _TWO_PI - sums

    def cone_points(self, tol=1e-6):
        """Vertex ids with nonzero angle defect, sorted by defect."""
        defects = self.angle_defects()
        singular = [v for v in range(len(defects)) if abs(defects[v]) > tol]
        singular.sort(key=lambda v: (defects[v], v))
        return [(v, float(defects[v])) for v in singular]

    def is_nonneg_curved(self, tol=1e-6):
        return bool(np.all(self.angle_defects() >= -tol))

    def vertex_label(self, vertex_id):
        """A representative original label for a vertex id (display only)."""
        orbit_ids, _ = self._orbits()
        t, k = np.argwhere(orbit_ids == vertex_id)[0]
        return int(self.triangles[t, k])

    def copy(self):
        return TriSurface(self.triangles.copy(), self.lengths.copy(), dict(self.gluings))

    def __repr__(self):
        _, nv = self._orbits()
        return (
            f"TriSurface({self.num_triangles} triangles, {nv} vertices, "
            f"area {self.area():.6g})"
        )


# -- corner fans -------------------------------------------------------


def corner_fan(surface, t, c):
    """Cyclic list of corners (t, c) around the vertex orbit of corner c.

    Walks counterclockwise: each corner is entered through its side c
    (vertex toward local c+1) and left through side (c + 2) % 3.
    """
    fan = [(t, c)]
    while True:
        tc, cc = fan[-1]
        nxt = surface.gluings[(tc, (cc + 2) % 3)]
        if nxt == fan[0]:
            return fan
        if len(fan) > 3 * surface.num_triangles:
            raise InvalidInput("corner fan does not close")
        fan.append(nxt)


def vertex_fans(surface):
    """One corner fan per vertex id, keyed by vertex id."""
    orbit_ids, nv = surface.vertex_orbits()
    fans = {}
    for t in range(surface.num_triangles):
        for c in range(3):
            v = int(orbit_ids[t, c])
            if v not in fans:
                fans[v] = corner_fan(surface, t, c)
    for v, fan in fans.items():
        if len(fan) != int(np.sum(orbit_ids == v)):
            raise InvalidInput(f"vertex {v} has a disconnected corner fan")
    return fans


# -- builders ----------------------------------------------------------


def tetrahedron_surface(edge=1.0):
    """Boundary of the regular tetrahedron: 4 cone points of defect pi."""
    tris = [(0, 1, 2), (0, 2, 3), (0, 3, 1), (1, 3, 2)]
    lengths = np.full((4, 3), float(edge))
    return TriSurface.from_triangles(tris, lengths)


def octahedron_surface(edge=1.0):
    """Boundary of the regular octahedron: 6 cone points of defect 2*pi/3."""
    tris = [
        (0, 2, 4), (2, 1, 4), (1, 3, 4), (3, 0, 4),
        (2, 0, 5), (1, 2, 5), (3, 1, 5), (0, 3, 5),
    ]
    lengths = np.full((8, 3), float(edge))
    return TriSurface.from_triangles(tris, lengths)


def box_surface(a, b, c):
    """Boundary of an a x b x c box, faces split along a diagonal.

    Each rectangular face is split by the diagonal through its
    lowest-labeled corner, so congruent boxes triangulate identically.
    Cone points: the 8 corners, defect pi/2 each.
    """
    if min(a, b, c) <= 0:
        raise InvalidInput("box dimensions must be positive")
    corners = np.array(
        [[x, y, z] for x in (0.0, a) for y in (0.0, b) for z in (0.0, c)]
    )
    # outward-oriented quads, corner labels = bit patterns (x y z)
    quads = [
        (0, 1, 3, 2),  # x = 0
        (4, 6, 7, 5),  # x = a
        (0, 4, 5, 1),  # y = 0
        (2, 3, 7, 6),  # y = b
        (0, 2, 6, 4),  # z = 0
        (1, 5, 7, 3),  # z = c
    ]
    tris = []
    for quad in quads:
        start = quad.index(min(quad))
        w = [quad[(start + i) % 4] for i in range(4)]
        tris.append((w[0], w[1], w[2]))
        tris.append((w[0], w[2], w[3]))
    lengths = np.empty((len(tris), 3))
    for i, (p, q, r) in enumerate(tris):
        pts = corners[[p, q, r]]
        lengths[i] = [
            np.linalg.norm(pts[1] - pts[0]),
            np.linalg.norm(pts[2] - pts[1]),
            np.linalg.norm(pts[0] - pts[2]),
        ]
    return TriSurface.from_triangles(tris, lengths)


def cube_surface(edge=1.0):
    return box_surface(edge, edge, edge)


def flat_torus_surface(n=3):
    """Flat square torus from an n x n grid, n >= 3. No cone points."""
    if n < 3:
        raise InvalidInput("need n >= 3 for faithful vertex labels")
    def vid(i, j):
        return (i % n) * n + (j % n)

    tris, lengths = [], []
    r2 = math.sqrt(2.0)
    for i in range(n):
        for j in range(n):
            a, b = vid(i, j), vid(i + 1, j)
            c, d = vid(i + 1, j + 1), vid(i, j + 1)
            tris.append((a, b, c))
            lengths.append((1.0, 1.0, r2))
            tris.append((a, c, d))
            lengths.append((r2, 1.0, 1.0))
    return TriSurface.from_triangles(tris, lengths)


def subdivide(surface, rounds=1):
    """Midpoint (medial) subdivision; the metric is unchanged.

    Each triangle becomes 4; midpoint segments are parallel to the
    opposite side at half its length. New vertex labels are allocated
    one per edge orbit.
    """
    for _ in range(rounds):
        surface = _subdivide_once(surface)
    return surface


def _subdivide_once(surface):
    m = surface.num_triangles
    next_label = int(surface.triangles.max()) + 1
    mid_label = {}
    for (t, k), (t2, k2) in surface.gluings.items():
        if (t, k) not in mid_label:
            mid_label[(t, k)] = mid_label[(t2, k2)] = next_label
            next_label += 1

    tris, lengths, gluings = [], [], {}
    # sub-triangle indexing: 4*t + c for the corner triangle at local
    # vertex c, 4*t + 3 for the central (medial) one
    for t in range(m):
        v = surface.triangles[t]
        lng = surface.lengths[t]
        mid = [mid_label[(t, k)] for k in range(3)]
        for c in range(3):
            # corner triangle at local vertex c: (v_c, mid_c, mid_{c+2})
            tris.append((v[c], mid[c], mid[(c + 2) % 3]))
            lengths.append(
                (lng[c] / 2.0, lng[(c + 1) % 3] / 2.0, lng[(c + 2) % 3] / 2.0)
            )
            # inner side (mid_c -> mid_{c+2}) faces the central triangle
        tris.append((mid[0], mid[1], mid[2]))
        # central side j is parallel to original side j+2, half as long
        lengths.append((lng[2] / 2.0, lng[0] / 2.0, lng[1] / 2.0))
        # central side j joins mid_j and mid_{j+1}; it faces corner
        # triangle c = j+1 at that triangle's side 1
        for j in range(3):
            _glue(gluings, (4 * t + 3, j), (4 * t + (j + 1) % 3, 1))

    # outer halves: side k of t splits into halves near local k and k+1
    for (t, k), (t2, k2) in surface.gluings.items():
        if (t, k) > (t2, k2):
            continue
        # half near local vertex k of t = side 0 of corner triangle k;
        # matches half near local k2+1 of t2 = side 2 of corner k2+1
        _glue(gluings, (4 * t + k, 0), (4 * t2 + (k2 + 1) % 3, 2))
        _glue(gluings, (4 * t + (k + 1) % 3, 2), (4 * t2 + k2, 0))
    return TriSurface(tris, lengths, gluings)


def _glue(gluings, s1, s2):
    gluings[s1] = s2
    gluings[s2] = s1


BUILTIN_SURFACES = {
    "tetrahedron": tetrahedron_surface,
    "cube": cube_surface,
    "octahedron": octahedron_surface,
}


# -- flat-vertex removal ----------------------------------------------


def develop_star(surface, fan):
    """Planar development of the corner fan around a vertex.

    Returns (coords, labels) for the link polygon, counterclockwise:
    vertex j is the far endpoint of side c of fan corner j = (t, c),
    placed at the accumulated angle. Exact only up to the angle sum;
    intended for flat vertices.
    """
    angles = surface.corner_angles()
    theta = 0.0
    coords, labels = [], []
    for t, c in fan:
        r = surface.lengths[t, c]
        coords.append((r * math.cos(theta), r * math.sin(theta)))
        labels.append(int(surface.triangles[t, (c + 1) % 3]))
        theta += angles[t, c]
    return np.array(coords), labels


def _ear_quality(p, q, r):
    """Minimal corner angle of triangle (p, q, r); <= 0 when degenerate."""
    sides = [np.linalg.norm(q - p), np.linalg.norm(r - q), np.linalg.norm(p - r)]
    if min(sides) <= 1e-12:
        return -1.0
    area2 = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    if area2 <= 0:
        return -1.0
    angles = []
    pts = [p, q, r]
    for i in range(3):
        u = pts[(i + 1) % 3] - pts[i]
        v = pts[(i + 2) % 3] - pts[i]
        cosv = u @ v / (np.linalg.norm(u) * np.linalg.norm(v))
        angles.append(math.acos(min(1.0, max(-1.0, cosv))))
    return min(angles)


def _point_in_triangle(x, p, q, r, eps=1e-12):
    def side(a, b):
        return (b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0])

    return side(p, q) > eps and side(q, r) > eps and side(r, p) > eps


def _triangulate_polygon(coords):
    """Ear clipping of a simple CCW polygon; returns index triples.

    Backtracks over ear choices, trying better-shaped ears first: a
    greedy pick can strand collinear vertex runs (unfolded straight
    edges) in a zero-area remainder. Triples come out in clip order.
    Returns None when no nondegenerate triangulation is found.
    """
    memo = {}
    budget = [4000]

    def solve(active):
        if len(active) == 3:
            a, b, c = active
            if _ear_quality(coords[a], coords[b], coords[c]) <= 1e-9:
                return None
            return [tuple(active)]
        key = tuple(active)
        if key in memo:
            return memo[key]
        if budget[0] <= 0:
            return None
        budget[0] -= 1
        candidates = []
        for pos in range(len(active)):
            ip = active[pos - 1]
            ic = active[pos]
            inx = active[(pos + 1) % len(active)]
            q = _ear_quality(coords[ip], coords[ic], coords[inx])
            if q <= 1e-9:
                continue
            blocked = any(
                _point_in_triangle(coords[j], coords[ip], coords[ic], coords[inx])
                for j in active
                if j not in (ip, ic, inx)
            )
            if not blocked:
                candidates.append((q, pos, (ip, ic, inx)))
        candidates.sort(reverse=True)
        result = None
        for _, pos, tri in candidates:
            rest = solve(active[:pos] + active[pos + 1 :])
            if rest is not None:
                result = [tri] + rest
                break
        memo[key] = result
        return result

    return solve(list(range(len(coords))))


def remove_flat_vertex(surface, vertex_id, tol=1e-6):
    """Retriangulate the star of a flat vertex without the vertex.

    Returns the new surface, or None when this vertex cannot be removed
    (non-flat, too few surrounding corners, a link vertex lies in the
    same orbit, or retriangulation degenerates). Angle defects at all
    other vertices are preserved.
    """
    orbit_ids, _ = surface.vertex_orbits()
    defects = surface.angle_defects()
    if abs(defects[vertex_id]) > tol:
        return None
    positions = np.argwhere(orbit_ids == vertex_id)
    if len(positions) == 0:
        return None
    t0, c0 = (int(x) for x in positions[0])
    fan = corner_fan(surface, t0, c0)
    if len(fan) != len(positions) or len(fan) < 3:
        return None
    star_tris = {t for t, _ in fan}
    if len(star_tris) != len(fan):
        return None  # a triangle meets the vertex at two corners
    for t, c in fan:
        if orbit_ids[t, (c + 1) % 3] == vertex_id or orbit_ids[t, (c + 2) % 3] == vertex_id:
            return None

    coords, labels = develop_star(surface, fan)
    n = len(fan)
    ears = _triangulate_polygon(coords)
    if ears is None:
        return None

    # assemble: kept old triangles first, then the new ones
    kept = [t for t in range(surface.num_triangles) if t not in star_tris]
    remap = {t: i for i, t in enumerate(kept)}
    tris = [tuple(surface.triangles[t]) for t in kept]
    lengths = [tuple(surface.lengths[t]) for t in kept]
    gluings = {}
    for (t, k), (t2, k2) in surface.gluings.items():
        if t in remap and t2 in remap:
            gluings[(remap[t], k)] = (remap[t2], k2)

    # polygon edge j runs P_j -> P_{j+1}; it is the outer side of fan
    # corner j and must end up glued to that side's old partner
    outer_partner = {}
    for j, (t, c) in enumerate(fan):
        outer_partner[j] = surface.gluings[(t, (c + 1) % 3)]
    outer_length = {
        j: float(surface.lengths[t, (c + 1) % 3]) for j, (t, c) in enumerate(fan)
    }
    outer_side_to_polyedge = {
        (t, (c + 1) % 3): j for j, (t, c) in enumerate(fan)
    }

    # edge state per polygon edge key: original index j, or a side of an
    # already-emitted new triangle (for diagonals)
    edge_state = {(j, (j + 1) % n): ("orig", j) for j in range(n)}
    polyedge_newside = {}
    base = len(kept)
    for w, tri in enumerate(ears):
        ia, ib, ic = tri
        new_t = base + w
        tris.append((labels[ia], labels[ib], labels[ic]))
        side_keys = [(ia, ib), (ib, ic), (ic, ia)]
        lng = []
        for k, (p, q) in enumerate(side_keys):
            state = edge_state.pop((p, q), None)
            if state is None:
                # freshly created diagonal; the closing edge (ic, ia)
                # re-enters the polygon reversed as (ia, ic)
                lng.append(float(np.linalg.norm(coords[q] - coords[p])))
                edge_state[(p, q)[::-1]] = ("new", (new_t, k))
            elif state[0] == "orig":
                polyedge_newside[state[1]] = (new_t, k)
                lng.append(outer_length[state[1]])
            else:
                _glue(gluings, (new_t, k), state[1])
                # diagonal length must match the already-emitted side
                ot, ok = state[1]
                lng.append(lengths[ot][ok])
        lengths.append(tuple(lng))

    for j, (pt, pk) in outer_partner.items():
        nt, nk = polyedge_newside[j]
        if pt in remap:
            _glue(gluings, (nt, nk), (remap[pt], pk))
        else:
            j2 = outer_side_to_polyedge[(pt, pk)]
            _glue(gluings, (nt, nk), polyedge_newside[j2])

    result = TriSurface(tris, lengths, gluings)
    try:
        result.validate()
    except InvalidInput:
        return None
    return result


def simplify(surface, tol=1e-6, max_rounds=None):
    """Remove flat vertices until none can be removed.

    The metric is unchanged: each removal retriangulates the planar
    development of a flat star. Cone points and their defects are
    preserved exactly.
    """
    if max_rounds is None:
        max_rounds = 4 * surface.num_triangles + 16
    current = surface
    for _ in range(max_rounds):
        defects = current.angle_defects()
        flats = [v for v in np.argsort(np.abs(defects)) if abs(defects[v]) <= tol]
        nxt = None
        for v in flats:
            nxt = remove_flat_vertex(current, int(v), tol=tol)
            if nxt is not None:
                break
        if nxt is None:
            return current
        current = nxt
    return current


# -- isometry testing --------------------------------------------------


def surfaces_isometric(s1, s2, tol=5e-3, distance_tol=None, config=None):
    """Decide isometry of two cone surfaces by their singular data.

    Both surfaces are simplified, then compared on Euler characteristic,
    area, the multiset of angle defects, and the matrix of pairwise
    geodesic distances between cone points (up to relabeling). Surfaces
    without cone points are compared on area and characteristic only,
    which is complete for flat tori of the shapes produced here.
    """
    from .metricgraph import SurfaceGeodesicGraph

    s1, s2 = simplify(s1, tol=1e-9), simplify(s2, tol=1e-9)
    if s1.euler_characteristic() != s2.euler_characteristic():
        return False
    a1, a2 = s1.area(), s2.area()
    scale = max(a1, a2)
    if abs(a1 - a2) > tol * scale:
        return False
    cones1 = s1.cone_points(tol=1e-6)
    cones2 = s2.cone_points(tol=1e-6)
    if len(cones1) != len(cones2):
        return False
    if len(cones1) == 0:
        return True
    d1 = [d for _, d in cones1]
    d2 = [d for _, d in cones2]
    if np.abs(np.array(d1) - np.array(d2)).max() > tol:
        return False

    if distance_tol is None:
        distance_tol = 5e-3
    g1 = SurfaceGeodesicGraph(s1, config=config)
    g2 = SurfaceGeodesicGraph(s2, config=config)
    m1 = g1.cone_point_distances()
    m2 = g2.cone_point_distances()
    diam = max(m1.max(), m2.max())
    return _match_matrices(d1, d2, m1, m2, tol, distance_tol * diam)


def _match_matrices(d1, d2, m1, m2, defect_tol, dist_tol):
    """Backtracking search for a defect- and distance-preserving bijection."""
    n = len(d1)
    assignment = [-1] * n
    used = [False] * n

    def feasible(i, j):
        if abs(d1[i] - d2[j]) > defect_tol:
            return False
        for i2 in range(i):
            if abs(m1[i, i2] - m2[j, assignment[i2]]) > dist_tol:
                return False
        return True

    def search(i):
        if i == n:
            return True
        for j in range(n):
            if not used[j] and feasible(i, j):
                used[j] = True
                assignment[i] = j
                if search(i + 1):
                    return True
                used[j] = False
                assignment[i] = -1
        return False

    return search(0)


# -- file io -----------------------------------------------------------


def save_surface(surface, path):
    """Write a .surf file; floats round-trip bit exactly."""
    _, nv = surface.vertex_orbits()
    lines = [f"# polyhedral surface: {surface.num_triangles} triangles", f"v {nv}"]
    for t in range(surface.num_triangles):
        a, b, c = (int(x) for x in surface.triangles[t])
        lines.append(f"t {a} {b} {c}")
    for (t, k), (t2, k2) in sorted(surface.gluings.items()):
        if (t, k) > (t2, k2):
            continue
        lines.append(f"e {t} {k} {t2} {k2} {float(surface.lengths[t, k])!r}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_surface(path):
    tris, pairs = [], []
    with open(path) as fh:
        for ln, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            try:
                if parts[0] == "v":
                    int(parts[1])
                elif parts[0] == "t":
                    tris.append(tuple(int(x) for x in parts[1:4]))
                elif parts[0] == "e":
                    t, k, t2, k2 = (int(x) for x in parts[1:5])
                    pairs.append((t, k, t2, k2, float(parts[5])))
                else:
                    raise InvalidInput(f"unknown record {parts[0]!r} at line {ln}")
            except (IndexError, ValueError) as exc:
                raise InvalidInput(f"malformed surface record at line {ln}") from exc
    if not tris:
        raise InvalidInput("surface file has no triangles")
    lengths = np.zeros((len(tris), 3))
    filled = np.zeros((len(tris), 3), dtype=bool)
    gluings = {}
    for t, k, t2, k2, length in pairs:
        if not (0 <= t < len(tris) and 0 <= t2 < len(tris)):
            raise InvalidInput("gluing references a missing triangle")
        _glue(gluings, (t, k), (t2, k2))
        lengths[t, k] = lengths[t2, k2] = length
        filled[t, k] = filled[t2, k2] = True
    if not filled.all():
        raise InvalidInput("some sides have no gluing record")
    return TriSurface(tris, lengths, gluings)
