"""Metric simplicial complexes of dimension 4.

A complex is a list of flat 4-simplices, each carrying its 10 edge
lengths, together with involutive facet gluings. Vertex labels name
points; identification is carried entirely by the gluing records, so
repeated labels (doubled complexes, branched covers) are supported.

Every simplex gets a canonical chart: vertex 0 at the origin and the
Gram matrix factored by Cholesky, so charts are deterministic functions
of the edge lengths. Curvature is concentrated on triangles; the cone
angle around a triangle is the sum of the dihedral angles of the
simplices meeting it.
"""

import dataclasses
import itertools
import math

import numpy as np

from .errors import InvalidInput
from .surface import TriSurface, triangle_coords

_TWO_PI = 2.0 * math.pi

# canonical order of the 10 vertex pairs of a 4-simplex
PAIRS4 = [
    (0, 1), (0, 2), (0, 3), (0, 4),
    (1, 2), (1, 3), (1, 4),
    (2, 3), (2, 4), (3, 4),
]
PAIR_INDEX = {p: k for k, p in enumerate(PAIRS4)}
# triangle k is the vertex triple complementary to edge pair k; the
# dihedral angle along triangle k opens between the two facets opposite
# the pair's endpoints
TRIPLES4 = [tuple(sorted(set(range(5)) - set(p))) for p in PAIRS4]
TRIPLE_INDEX = {t: k for k, t in enumerate(TRIPLES4)}


def facet_locals(f):
    """Local vertices of the facet opposite local vertex f, ascending."""
    return tuple(v for v in range(5) if v != f)


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

    def compress(self, n):
        order = {}
        ids = np.empty(n, dtype=np.int64)
        for i in range(n):
            r = self.find(i)
            ids[i] = order.setdefault(r, len(order))
        return ids, len(order)


class MetricComplex4:
    """Closed metric simplicial 4-manifold (facet-glued 4-simplices)."""

    def __init__(self, simplices, edge_lengths, gluings):
        self.simplices = np.asarray(simplices, dtype=np.int64).reshape(-1, 5)
        self.edge_lengths = np.asarray(edge_lengths, dtype=np.float64).reshape(-1, 10)
        if self.simplices.shape[0] != self.edge_lengths.shape[0]:
            raise InvalidInput("simplex and edge-length counts differ")
        self.gluings = dict(gluings)
        self._charts = None
        self._dihedral = None
        self._transition_cache = {}
        self._vertex_orbit_cache = None
        self._triangle_orbit_cache = None
        self._edge_orbit_cache = None

    @classmethod
    def from_labels(cls, simplices, edge_lengths):
        """Derive facet gluings by matching vertex-label 4-sets.

        Labels must be faithful: distinct within each simplex, and each
        facet label set shared by exactly two simplices.
        """
        simplices = np.asarray(simplices, dtype=np.int64).reshape(-1, 5)
        m = simplices.shape[0]
        facets = {}
        for s in range(m):
            labels = simplices[s]
            if len(set(int(x) for x in labels)) != 5:
                raise InvalidInput(f"simplex {s} repeats a vertex label")
            for f in range(5):
                key = frozenset(int(labels[v]) for v in facet_locals(f))
                facets.setdefault(key, []).append((s, f))
        gluings = {}
        for key, found in facets.items():
            if len(found) != 2:
                raise InvalidInput(
                    f"facet {sorted(key)} bounds {len(found)} simplices, expected 2"
                )
            (s1, f1), (s2, f2) = found
            pos2 = {int(simplices[s2][v]): v for v in facet_locals(f2)}
            perm12 = tuple(pos2[int(simplices[s1][v])] for v in facet_locals(f1))
            pos1 = {int(simplices[s1][v]): v for v in facet_locals(f1)}
            perm21 = tuple(pos1[int(simplices[s2][v])] for v in facet_locals(f2))
            gluings[(s1, f1)] = (s2, f2, perm12)
            gluings[(s2, f2)] = (s1, f1, perm21)
        return cls(simplices, edge_lengths, gluings)

    @property
    def num_simplices(self):
        return self.simplices.shape[0]

    def edge_length(self, s, u, v):
        return float(self.edge_lengths[s, PAIR_INDEX[(min(u, v), max(u, v))]])

    # -- charts and volumes --------------------------------------------

    def charts(self):
        """Canonical coordinates (m, 5, 4) per simplex, vertex 0 at 0."""
        if self._charts is not None:
            return self._charts
        m = self.num_simplices
        gram = np.empty((m, 4, 4))
        d0 = self.edge_lengths[:, :4]  # lengths 0-1, 0-2, 0-3, 0-4
        for i in range(4):
            for j in range(i, 4):
                if i == j:
                    gram[:, i, i] = d0[:, i] ** 2
                else:
                    dij = self.edge_lengths[:, PAIR_INDEX[(i + 1, j + 1)]]
                    val = 0.5 * (d0[:, i] ** 2 + d0[:, j] ** 2 - dij**2)
                    gram[:, i, j] = gram[:, j, i] = val
        try:
            low = np.linalg.cholesky(gram)
        except np.linalg.LinAlgError:
            for s in range(m):
                try:
                    np.linalg.cholesky(gram[s])
                except np.linalg.LinAlgError:
                    raise InvalidInput(
                        f"simplex {s} is degenerate for its edge lengths"
                    ) from None
            raise
        charts = np.zeros((m, 5, 4))
        charts[:, 1:, :] = low
        self._charts = charts
        return charts

    def volumes(self):
        charts = self.charts()
        diag = charts[:, 1:, :].diagonal(axis1=1, axis2=2)
        return np.abs(diag.prod(axis=1)) / 24.0

    def total_volume(self):
        return float(self.volumes().sum())

    def dihedral_angles(self):
        """(m, 10) dihedral angles; column k is at triangle TRIPLES4[k]."""
        if self._dihedral is not None:
            return self._dihedral
        charts = self.charts()
        m = self.num_simplices
        out = np.empty((m, 10))
        for k, (i, j) in enumerate(PAIRS4):
            t0, t1, t2 = TRIPLES4[k]
            base = charts[:, t0]
            e1 = charts[:, t1] - base
            e2 = charts[:, t2] - base
            e1 = e1 / np.linalg.norm(e1, axis=1, keepdims=True)
            e2 = e2 - np.einsum("md,md->m", e2, e1)[:, None] * e1
            e2 = e2 / np.linalg.norm(e2, axis=1, keepdims=True)

            def transverse(vec):
                vec = vec - np.einsum("md,md->m", vec, e1)[:, None] * e1
                vec = vec - np.einsum("md,md->m", vec, e2)[:, None] * e2
                return vec / np.linalg.norm(vec, axis=1, keepdims=True)

            u = transverse(charts[:, i] - base)
            w = transverse(charts[:, j] - base)
            cosv = np.clip(np.einsum("md,md->m", u, w), -1.0, 1.0)
            out[:, k] = np.arccos(cosv)
        self._dihedral = out
        return out

    # -- validation ------------------------------------------------------

    def validate(self, tol=1e-9):
        m = self.num_simplices
        if m == 0:
            raise InvalidInput("empty complex")
        if not np.all(np.isfinite(self.edge_lengths)) or np.any(self.edge_lengths <= 0):
            raise InvalidInput("edge lengths must be positive and finite")
        self.charts()  # raises on degenerate simplices
        scale = float(self.edge_lengths.max())
        seen = set()
        for (s, f), (s2, f2, perm) in self.gluings.items():
            if not (0 <= s < m and 0 <= f < 5):
                raise InvalidInput(f"gluing references missing facet ({s}, {f})")
            if sorted(perm) != sorted(facet_locals(f2)):
                raise InvalidInput(f"bad permutation in gluing at ({s}, {f})")
            back = self.gluings.get((s2, f2))
            if back is None or back[:2] != (s, f):
                raise InvalidInput(f"gluing at ({s}, {f}) is not involutive")
            fl = facet_locals(f)
            inverse = {perm[i]: fl[i] for i in range(4)}
            if tuple(inverse[v] for v in facet_locals(f2)) != back[2]:
                raise InvalidInput(f"gluing at ({s}, {f}) has inconsistent inverse")
            if (s, f) == (s2, f2):
                raise InvalidInput(f"facet ({s}, {f}) glued to itself")
            for i in range(4):
                for j in range(i + 1, 4):
                    la = self.edge_length(s, fl[i], fl[j])
                    lb = self.edge_length(s2, perm[i], perm[j])
                    if abs(la - lb) > tol * max(1.0, scale):
                        raise InvalidInput(
                            f"glued facets ({s},{f})~({s2},{f2}) differ in metric"
                        )
            seen.add((s, f))
        if len(seen) != 5 * m:
            raise InvalidInput("complex has unglued facets")
        stack, visited = [0], {0}
        while stack:
            s = stack.pop()
            for f in range(5):
                s2 = self.gluings[(s, f)][0]
                if s2 not in visited:
                    visited.add(s2)
                    stack.append(s2)
        if len(visited) != m:
            raise InvalidInput("complex is not connected")
        return self

    # -- orbits ----------------------------------------------------------

    def vertex_orbits(self):
        """(m, 5) vertex ids per corner, and the vertex count."""
        if self._vertex_orbit_cache is None:
            m = self.num_simplices
            uf = _UnionFind(5 * m)
            for (s, f), (s2, f2, perm) in self.gluings.items():
                fl = facet_locals(f)
                for i in range(4):
                    uf.union(5 * s + fl[i], 5 * s2 + perm[i])
            ids, count = uf.compress(5 * m)
            self._vertex_orbit_cache = (ids.reshape(m, 5), count)
        return self._vertex_orbit_cache

    def triangle_orbits(self):
        """(m, 10) triangle ids per slot, and the triangle count.

        Slot k of a simplex is the triangle spanned by TRIPLES4[k].
        """
        if self._triangle_orbit_cache is None:
            m = self.num_simplices
            uf = _UnionFind(10 * m)
            for (s, f), (s2, f2, perm) in self.gluings.items():
                fl = facet_locals(f)
                pos = {fl[i]: i for i in range(4)}
                for triple in itertools.combinations(fl, 3):
                    k = TRIPLE_INDEX[triple]
                    mapped = tuple(sorted(perm[pos[v]] for v in triple))
                    uf.union(10 * s + k, 10 * s2 + TRIPLE_INDEX[mapped])
            ids, count = uf.compress(10 * m)
            self._triangle_orbit_cache = (ids.reshape(m, 10), count)
        return self._triangle_orbit_cache

    def edge_orbits(self):
        """(m, 10) edge ids per pair slot, and the edge count."""
        if self._edge_orbit_cache is None:
            m = self.num_simplices
            uf = _UnionFind(10 * m)
            for (s, f), (s2, f2, perm) in self.gluings.items():
                fl = facet_locals(f)
                pos = {fl[i]: i for i in range(4)}
                for pair in itertools.combinations(fl, 2):
                    k = PAIR_INDEX[pair]
                    mapped = tuple(sorted(perm[pos[v]] for v in pair))
                    uf.union(10 * s + k, 10 * s2 + PAIR_INDEX[mapped])
            ids, count = uf.compress(10 * m)
            self._edge_orbit_cache = (ids.reshape(m, 10), count)
        return self._edge_orbit_cache

    def cone_angles(self):
        """Total angle around each triangle orbit."""
        slot_ids, count = self.triangle_orbits()
        angles = np.zeros(count)
        np.add.at(angles, slot_ids.reshape(-1), self.dihedral_angles().reshape(-1))
        return angles

    def is_nonneg_curved(self, tol=1e-7):
        return bool(np.all(self.cone_angles() <= _TWO_PI + tol))

    def worst_cone_angle(self):
        return float(self.cone_angles().max())

    # -- transitions -----------------------------------------------------

    def facet_transition(self, s, f):
        """Rigid motion (rot, shift) placing the glued neighbor's chart
        across facet f of simplex s, in s's chart coordinates."""
        key = (s, f)
        if key in self._transition_cache:
            return self._transition_cache[key]
        s2, f2, perm = self.gluings[key]
        charts = self.charts()
        fl = facet_locals(f)
        p = charts[s][list(fl)]
        q = charts[s2][list(perm)]
        frame_p = _facet_frame(p, charts[s][f], away=True)
        frame_q = _facet_frame(q, charts[s2][f2], away=False)
        rot = frame_p @ frame_q.T
        shift = p[0] - rot @ q[0]
        self._transition_cache[key] = (rot, shift)
        return rot, shift

    def dual_graph_tree(self):
        """BFS spanning tree of the facet adjacency graph, from simplex 0.

        Returns (order, parent) where parent[s] = (s_prev, f_prev) with
        gluings[(s_prev, f_prev)] leading to s. Deterministic: facets are
        explored in increasing index order.
        """
        parent = {0: None}
        order = [0]
        queue = [0]
        head = 0
        while head < len(queue):
            s = queue[head]
            head += 1
            for f in range(5):
                s2 = self.gluings[(s, f)][0]
                if s2 not in parent:
                    parent[s2] = (s, f)
                    order.append(s2)
                    queue.append(s2)
        return order, parent

    def copy(self):
        return MetricComplex4(
            self.simplices.copy(), self.edge_lengths.copy(), dict(self.gluings)
        )

    def __repr__(self):
        return (
            f"MetricComplex4({self.num_simplices} simplices, "
            f"volume {self.total_volume():.6g})"
        )


def _facet_frame(p, off_vertex, away):
    """Orthonormal 4x4 frame adapted to a tetrahedron p (4 points).

    First three columns: Gram-Schmidt of the edge vectors from p[0];
    fourth: unit normal, pointing away from (away=True) or toward the
    off-facet vertex.
    """
    cols = []
    for i in range(1, 4):
        v = p[i] - p[0]
        for c in cols:
            v = v - (v @ c) * c
        n = np.linalg.norm(v)
        if n <= 1e-14:
            raise InvalidInput("degenerate facet frame")
        cols.append(v / n)
    span = np.column_stack(cols)
    u, _, _ = np.linalg.svd(span, full_matrices=True)
    normal = u[:, 3]
    side = normal @ (off_vertex - p[0])
    if (side > 0) == away:
        normal = -normal
    return np.column_stack([span, normal])


# -- products -----------------------------------------------------------

# the six monotone staircase paths through a 3 x 3 grid of vertex pairs,
# each a maximal chain from (0, 0) to (2, 2)
_STAIR_PATHS = []
for pattern in sorted(set(itertools.permutations("PPQQ"))):
    path = [(0, 0)]
    for step in pattern:
        i, j = path[-1]
        path.append((i + 1, j) if step == "P" else (i, j + 1))
    _STAIR_PATHS.append(tuple(path))


def _ordered_triangle_data(surface):
    """Per triangle: global vertex ids ascending and matching 2D coords."""
    orbit_ids, count = surface.vertex_orbits()
    data = []
    for t in range(surface.num_triangles):
        ids = [int(orbit_ids[t, c]) for c in range(3)]
        if len(set(ids)) != 3:
            raise InvalidInput(
                "product construction needs triangles with three distinct vertices"
            )
        order = np.argsort(ids)
        chart = triangle_coords(surface.lengths[t])
        data.append(([ids[c] for c in order], chart[order]))
    return data, count


def product_complex(p_surface, q_surface):
    """Staircase triangulation of the metric product of two surfaces.

    Every pair of triangles contributes six 4-simplices, one per
    monotone path through the grid of vertex pairs; using globally
    sorted vertex ids on each factor makes neighboring prisms induce
    identical wall triangulations, so facets match up by labels. The
    product vertex (i, j) gets label i * nQ + j.

    Singular triangles {cone point} x (triangle of Q), and symmetric,
    appear as honest faces of the staircase simplices.
    """
    p_data, n_p = _ordered_triangle_data(p_surface)
    q_data, n_q = _ordered_triangle_data(q_surface)
    simplices = []
    lengths = []
    provenance = []
    for sp, (u_ids, u_xy) in enumerate(p_data):
        for sq, (w_ids, w_xy) in enumerate(q_data):
            for path_idx, path in enumerate(_STAIR_PATHS):
                labels = [u_ids[i] * n_q + w_ids[j] for i, j in path]
                coords = np.array(
                    [np.concatenate([u_xy[i], w_xy[j]]) for i, j in path]
                )
                row = [
                    float(np.linalg.norm(coords[b] - coords[a]))
                    for a, b in PAIRS4
                ]
                simplices.append(labels)
                lengths.append(row)
                provenance.append((sp, sq, path_idx))
    cx = MetricComplex4.from_labels(simplices, lengths)
    cx.product_provenance = np.array(provenance, dtype=np.int64)
    return cx


# -- singular census ------------------------------------------------------


@dataclasses.dataclass
class Stratum:
    """Connected singular surface with a constant transverse cone angle."""

    surface: TriSurface
    cone_angle: float
    triangle_orbit_ids: list
    ambient_slots: list  # per surface triangle: (simplex, ordered local triple)
    vertex_map: dict  # surface vertex id -> ambient vertex orbit id


@dataclasses.dataclass
class Codim4Vertex:
    """Ambient vertex where strata cross or carry intrinsic curvature."""

    ambient_vertex: int
    incidences: list  # (stratum index, surface vertex id, intrinsic angle)


@dataclasses.dataclass
class SingularCensus:
    strata: list
    codim4_vertices: list
    flags: list  # human-readable violations of the clean-structure rules
    cone_angles: np.ndarray  # per triangle orbit

    @property
    def clean(self):
        return not self.flags


def singular_census(cx, tol_angle=1e-7):
    """Extract the singular strata of a complex as intrinsic surfaces.

    Singular triangle orbits (cone angle away from 2 pi) are grouped
    into connected strata across shared edges; each stratum is oriented
    and assembled into a TriSurface. Deviations from the structure of a
    nonnegatively curved product (an edge meeting a number of singular
    triangles other than 0 or 2, mismatched angles along a stratum,
    unorientable strata) are reported in flags rather than raised.
    """
    tri_ids, tri_count = cx.triangle_orbits()
    edge_ids, _ = cx.edge_orbits()
    vert_ids, _ = cx.vertex_orbits()
    angles = cx.cone_angles()

    singular = [k for k in range(tri_count) if abs(angles[k] - _TWO_PI) > tol_angle]
    flags = []
    if not singular:
        return SingularCensus([], [], flags, angles)
    singular_set = set(singular)

    # one representative slot per singular triangle orbit
    rep_slot = {}
    for s in range(cx.num_simplices):
        for k in range(10):
            orbit = int(tri_ids[s, k])
            if orbit in singular_set and orbit not in rep_slot:
                rep_slot[orbit] = (s, k)

    # describe each singular triangle through its representative:
    # corners as ambient vertex orbits, sides as ambient edge orbits
    corner_ids = {}
    side_edge = {}
    side_len = {}
    for orbit, (s, k) in rep_slot.items():
        triple = TRIPLES4[k]
        corners = tuple(int(vert_ids[s, v]) for v in triple)
        if len(set(corners)) != 3:
            flags.append(f"singular triangle {orbit} has repeated vertices")
            continue
        corner_ids[orbit] = corners
        for j in range(3):
            u, v = triple[j], triple[(j + 1) % 3]
            pair = (min(u, v), max(u, v))
            side_edge[(orbit, j)] = int(edge_ids[s, PAIR_INDEX[pair]])
            side_len[(orbit, j)] = cx.edge_length(s, u, v)
    if flags:
        return SingularCensus([], [], flags, angles)

    by_edge = {}
    for (orbit, j), e in side_edge.items():
        by_edge.setdefault(e, []).append((orbit, j))
    side_partner = {}
    for e, sides in by_edge.items():
        if len(sides) != 2:
            flags.append(
                f"edge {e} meets {len(sides)} singular triangle sides, expected 2"
            )
            continue
        (o1, j1), (o2, j2) = sides
        if abs(angles[o1] - angles[o2]) > tol_angle:
            flags.append(f"cone angle changes across edge {e}")
        side_partner[(o1, j1)] = (o2, j2)
        side_partner[(o2, j2)] = (o1, j1)
    if flags:
        return SingularCensus([], [], flags, angles)

    # connected components, with orientation chosen during the sweep:
    # flipping a triangle reverses its corner order
    strata = []
    assigned = {}
    for start in singular:
        if start in assigned:
            continue
        component = {}
        queue = [(start, False)]
        component[start] = False
        ok = True
        while queue:
            orbit, flipped = queue.pop()
            for j in range(3):
                o2, j2 = side_partner[(orbit, j)]
                if o2 in component:
                    continue
                # the shared side must be traversed oppositely; flip the
                # neighbor when it currently runs parallel
                flip2 = _sides_parallel(
                    corner_ids[orbit], flipped, j, corner_ids[o2], False, j2
                )
                component[o2] = flip2
                queue.append((o2, flip2))
        for orbit in component:
            assigned[orbit] = len(strata)
        # verify orientation consistency on every side
        for orbit, flipped in component.items():
            for j in range(3):
                o2, j2 = side_partner[(orbit, j)]
                if _sides_parallel(
                    corner_ids[orbit], flipped, j, corner_ids[o2], component[o2], j2
                ):
                    flags.append(f"stratum through triangle {start} is unorientable")
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        strata.append(_assemble_stratum(
            cx, sorted(component), component, corner_ids, side_partner,
            side_len, rep_slot, angles,
        ))
    if flags:
        return SingularCensus([], [], flags, angles)

    codim4 = _find_codim4(strata, tol_angle)
    return SingularCensus(strata, codim4, flags, angles)


def _oriented_corners(corners, flipped):
    return (corners[0], corners[2], corners[1]) if flipped else corners


def _oriented_side(corners, flipped, j):
    """Directed vertex pair of original side j after optional flip."""
    a, b = corners[j], corners[(j + 1) % 3]
    return (b, a) if flipped else (a, b)


def _sides_parallel(c1, f1, j1, c2, f2, j2):
    """True when the two directed sides traverse the edge the same way."""
    return _oriented_side(c1, f1, j1) == _oriented_side(c2, f2, j2)


def _assemble_stratum(cx, orbits, flip, corner_ids, side_partner, side_len,
                      rep_slot, angles):
    row_of = {orbit: i for i, orbit in enumerate(orbits)}
    tris = []
    lengths = []
    gluings = {}
    ambient_slots = []
    for orbit in orbits:
        flipped = flip[orbit]
        corners = _oriented_corners(corner_ids[orbit], flipped)
        tris.append(corners)
        # oriented side k joins oriented corners k, k+1; map back to the
        # original side index to look up lengths and partners
        orig_of = [2, 1, 0] if flipped else [0, 1, 2]
        lengths.append([side_len[(orbit, orig_of[k])] for k in range(3)])
        row = row_of[orbit]
        for k in range(3):
            o2, j2 = side_partner[(orbit, orig_of[k])]
            orig2 = [2, 1, 0] if flip[o2] else [0, 1, 2]
            k2 = orig2.index(j2)
            gluings[(row, k)] = (row_of[o2], k2)
        s, slot = rep_slot[orbit]
        triple = TRIPLES4[slot]
        ordered = (triple[0], triple[2], triple[1]) if flipped else triple
        ambient_slots.append((s, ordered))
    surface = TriSurface(tris, lengths, gluings)
    surface.validate()
    vert_ids, _ = cx.vertex_orbits()
    surf_orbits, nv = surface.vertex_orbits()
    vertex_map = {}
    for t in range(surface.num_triangles):
        s, triple = ambient_slots[t]
        for c in range(3):
            sv = int(surf_orbits[t, c])
            av = int(vert_ids[s, triple[c]])
            if vertex_map.setdefault(sv, av) != av:
                raise InvalidInput("stratum vertex identification is inconsistent")
    return Stratum(
        surface=surface,
        cone_angle=float(angles[orbits[0]]),
        triangle_orbit_ids=list(orbits),
        ambient_slots=ambient_slots,
        vertex_map=vertex_map,
    )


def _find_codim4(strata, tol_angle):
    incident = {}
    for idx, stratum in enumerate(strata):
        defects = stratum.surface.angle_defects()
        for sv, av in stratum.vertex_map.items():
            intrinsic = _TWO_PI - float(defects[sv])
            incident.setdefault(av, []).append((idx, sv, intrinsic))
    out = []
    for av, items in sorted(incident.items()):
        curved = any(abs(angle - _TWO_PI) > tol_angle for _, _, angle in items)
        if len(items) >= 2 or curved:
            out.append(Codim4Vertex(ambient_vertex=av, incidences=items))
    return out


# -- file io -----------------------------------------------------------


def save_complex(cx, path):
    """Write a .plc4 file; floats round-trip bit exactly."""
    lines = [f"# metric 4-complex: {cx.num_simplices} simplices"]
    for s in range(cx.num_simplices):
        labels = " ".join(str(int(x)) for x in cx.simplices[s])
        row = " ".join(repr(float(x)) for x in cx.edge_lengths[s])
        lines.append(f"s {labels} {row}")
    for (s, f), (s2, f2, perm) in sorted(cx.gluings.items()):
        if (s, f) > (s2, f2):
            continue
        lines.append(f"g {s} {f} {s2} {f2} " + " ".join(str(p) for p in perm))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_complex(path):
    simplices, lengths, records = [], [], []
    with open(path) as fh:
        for ln, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            try:
                if parts[0] == "s":
                    if len(parts) != 16:
                        raise ValueError("needs 5 labels and 10 lengths")
                    simplices.append([int(x) for x in parts[1:6]])
                    lengths.append([float(x) for x in parts[6:16]])
                elif parts[0] == "g":
                    if len(parts) != 9:
                        raise ValueError("needs 4 indices and a permutation")
                    records.append([int(x) for x in parts[1:]])
                else:
                    raise ValueError(f"unknown record {parts[0]!r}")
            except ValueError as exc:
                raise InvalidInput(f"malformed complex record at line {ln}") from exc
    if not simplices:
        raise InvalidInput("complex file has no simplices")
    gluings = {}
    for s, f, s2, f2, p0, p1, p2, p3 in records:
        perm = (p0, p1, p2, p3)
        if not (0 <= s < len(simplices) and 0 <= s2 < len(simplices)):
            raise InvalidInput("gluing references a missing simplex")
        if sorted(perm) != sorted(facet_locals(f2)):
            raise InvalidInput(f"bad permutation in gluing record ({s}, {f})")
        gluings[(s, f)] = (s2, f2, perm)
        fl = facet_locals(f)
        inverse = {perm[i]: fl[i] for i in range(4)}
        gluings[(s2, f2)] = (s, f, tuple(inverse[v] for v in facet_locals(f2)))
    cx = MetricComplex4(simplices, lengths, gluings)
    missing = {(s, f) for s in range(cx.num_simplices) for f in range(5)} - set(gluings)
    if missing:
        raise InvalidInput("some facets have no gluing record")
    return cx
