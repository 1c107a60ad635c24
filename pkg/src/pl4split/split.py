"""Splitting a nonnegatively curved complex into a product of surfaces.

The pipeline: census the singular strata, take holonomy generators,
solve for invariant antisymmetric forms, extract the orthogonal pair of
parallel plane fields, check every stratum is tangent to one of them,
classify the codimension-4 vertices as cone-times-cone crossings, trace
one leaf of each field, and verify the product of the two leaves
reproduces the input metrically.
"""

import collections
import dataclasses
import json
import math

import numpy as np

from .complex4 import TRIPLES4, product_complex, singular_census
from .config import Config
from .errors import (
    DegenerateSlice,
    HypothesisViolation,
    Misaligned,
    NonClosingLeaf,
    NotProductLike,
    Pl4Error,
    SeedSingular,
    WrongDimension,
)
from .forms import (
    betti_check,
    connectivity_caveat,
    extract_distributions,
    invariant_forms,
)
from .holonomy import holonomy_generators, is_unitary_holonomy
from .metricgraph import AmbientGraph, SurfaceGeodesicGraph
from .surface import TriSurface, simplify

_TWO_PI = 2.0 * math.pi

PARALLEL_ALPHA = "parallel_alpha"
PARALLEL_BETA = "parallel_beta"
MISALIGNED = "misaligned"


# -- stratum alignment ---------------------------------------------------


@dataclasses.dataclass
class StratumAlignment:
    """How one singular stratum sits against the two plane fields."""

    stratum: int
    tag: str
    residual_alpha: float
    residual_beta: float


def _slot_projector(charts, slot):
    """Projector onto the tangent plane of a triangle slot, in its chart."""
    s, triple = slot
    a, b, c = triple
    e1 = charts[s][b] - charts[s][a]
    e2 = charts[s][c] - charts[s][a]
    e1 = e1 / np.linalg.norm(e1)
    e2 = e2 - (e2 @ e1) * e1
    e2 = e2 / np.linalg.norm(e2)
    return np.outer(e1, e1) + np.outer(e2, e2)


def align_strata(cx, dist, census, tol=1e-6):
    """Tag each stratum by the plane field its triangles are tangent to.

    Every ambient slot of the stratum is compared; the residual is the
    worst sup-norm deviation between the slot's tangent projector and
    the field's projector in the same chart. A stratum matching neither
    field within tol is tagged misaligned.
    """
    charts = cx.charts()
    table = []
    for idx, stratum in enumerate(census.strata):
        worst_a = 0.0
        worst_b = 0.0
        for slot in stratum.ambient_slots:
            t_proj = _slot_projector(charts, slot)
            s = slot[0]
            worst_a = max(worst_a, float(np.abs(t_proj - dist.alpha_projector(s)).max()))
            worst_b = max(worst_b, float(np.abs(t_proj - dist.beta_projector(s)).max()))
        if worst_a <= tol:
            tag = PARALLEL_ALPHA
        elif worst_b <= tol:
            tag = PARALLEL_BETA
        else:
            tag = MISALIGNED
        table.append(StratumAlignment(idx, tag, worst_a, worst_b))
    return table


# -- codimension-4 classification ----------------------------------------


@dataclasses.dataclass
class Codim4Structure:
    """A vertex where strata of the two families cross.

    angle_alpha is the cone angle of the alpha factor there: the
    intrinsic vertex angle of the alpha-tangent strata, which must agree
    with the transverse cone angle of the beta-tangent strata.
    """

    ambient_vertex: int
    angle_alpha: float
    angle_beta: float
    alpha_strata: list
    beta_strata: list
    orthogonality: float


def classify_codim4(cx, dist, census, alignment, developer, config=None):
    """Cross-check every codimension-4 vertex as a product of two cones.

    Raises NotProductLike when a vertex misses one family entirely, when
    the intrinsic and transverse angle readings disagree, or when an
    angle exceeds 2 pi.
    """
    cfg = config or Config()
    charts = cx.charts()
    tags = {a.stratum: a.tag for a in alignment}
    structures = []
    for vert in census.codim4_vertices:
        groups = {PARALLEL_ALPHA: [], PARALLEL_BETA: []}
        for stratum_idx, surf_vertex, intrinsic in vert.incidences:
            tag = tags[stratum_idx]
            if tag == MISALIGNED:
                raise NotProductLike(
                    f"vertex {vert.ambient_vertex} meets a misaligned stratum"
                )
            groups[tag].append((stratum_idx, surf_vertex, intrinsic))
        for tag in (PARALLEL_ALPHA, PARALLEL_BETA):
            if not groups[tag]:
                raise NotProductLike(
                    f"vertex {vert.ambient_vertex} has no incident "
                    f"{tag.split('_')[1]}-tangent stratum"
                )
        angles = {}
        for tag, other in (
            (PARALLEL_ALPHA, PARALLEL_BETA),
            (PARALLEL_BETA, PARALLEL_ALPHA),
        ):
            intrinsic = [inc[2] for inc in groups[tag]]
            transverse = [census.strata[inc[0]].cone_angle for inc in groups[other]]
            readings = intrinsic + transverse
            spread = max(readings) - min(readings)
            if spread > cfg.tol_angle:
                raise NotProductLike(
                    f"vertex {vert.ambient_vertex}: intrinsic and transverse "
                    f"angle readings spread {spread:.3e}"
                )
            angle = float(np.mean(readings))
            if angle > _TWO_PI + cfg.tol_angle:
                raise NotProductLike(
                    f"vertex {vert.ambient_vertex}: cone angle {angle:.6f} "
                    "exceeds 2 pi"
                )
            angles[tag] = angle
        # chart-level orthogonality of the two families' tangent planes,
        # compared in the base chart
        worst = 0.0
        base_proj = {}
        for tag in (PARALLEL_ALPHA, PARALLEL_BETA):
            projs = []
            for stratum_idx, _, _ in groups[tag]:
                slot = census.strata[stratum_idx].ambient_slots[0]
                rot, _ = developer.to_base(slot[0])
                projs.append(rot @ _slot_projector(charts, slot) @ rot.T)
            base_proj[tag] = projs
        for pa in base_proj[PARALLEL_ALPHA]:
            for pb in base_proj[PARALLEL_BETA]:
                worst = max(worst, float(np.abs(pa @ pb).max()))
        if worst > cfg.tol_orthogonal:
            raise NotProductLike(
                f"vertex {vert.ambient_vertex}: families not orthogonal "
                f"(residual {worst:.3e})"
            )
        structures.append(
            Codim4Structure(
                ambient_vertex=vert.ambient_vertex,
                angle_alpha=angles[PARALLEL_ALPHA],
                angle_beta=angles[PARALLEL_BETA],
                alpha_strata=sorted(inc[0] for inc in groups[PARALLEL_ALPHA]),
                beta_strata=sorted(inc[0] for inc in groups[PARALLEL_BETA]),
                orthogonality=worst,
            )
        )
    return structures


def stratum_separation(cx, census):
    """Half the smallest chart distance between distinct strata.

    Sampled over simplices carrying triangles of two different strata,
    with vertex, edge-midpoint, and centroid probes per triangle. Falls
    back to half the minimum edge length when no simplex hosts two.
    """
    charts = cx.charts()
    tri_ids, _ = cx.triangle_orbits()
    owner = {}
    for idx, stratum in enumerate(census.strata):
        for oid in stratum.triangle_orbit_ids:
            owner[oid] = idx
    best = math.inf
    for s in range(cx.num_simplices):
        slots = [
            (k, owner[tri_ids[s, k]])
            for k in range(10)
            if tri_ids[s, k] in owner
        ]
        if len({o for _, o in slots}) < 2:
            continue
        probes = {}
        for k, o in slots:
            pts = charts[s][list(TRIPLES4[k])]
            probes[k] = np.vstack(
                [pts, (pts + np.roll(pts, 1, axis=0)) / 2.0, pts.mean(axis=0)]
            )
        for i, (k1, o1) in enumerate(slots):
            for k2, o2 in slots[i + 1 :]:
                if o1 == o2:
                    continue
                diff = probes[k1][:, None, :] - probes[k2][None, :, :]
                d = float(np.sqrt((diff**2).sum(axis=2)).min())
                best = min(best, d)
    if not math.isfinite(best):
        best = float(cx.edge_lengths.min())
    return best / 2.0


# -- leaf tracing ---------------------------------------------------------


@dataclasses.dataclass
class Leaf:
    """One traced leaf of a parallel plane field.

    visits holds, per sliced simplex polygon: the simplex, the CCW
    polygon in plane coordinates, the base point of the plane in chart
    coordinates, and the orthonormal plane frame used.
    """

    which: str
    seed: tuple
    surface: TriSurface
    visits: list
    states: int

    def polygon_point(self, visit_idx, st):
        s, poly, x, u, v = self.visits[visit_idx]
        return s, x + st[0] * u + st[1] * v


def _barycentric_functionals(chart):
    """Gradients and offsets with lambda_i(y) = grads[i] @ y + offs[i]."""
    v0 = chart[0]
    rows = np.linalg.inv((chart[1:] - v0).T)
    grads = np.empty((5, 4))
    grads[1:] = rows
    grads[0] = -rows.sum(axis=0)
    offs = np.empty(5)
    offs[1:] = -rows @ v0
    offs[0] = 1.0 + float((rows @ v0).sum())
    return grads, offs


def _point_triangle_distance(p, tri):
    """Euclidean distance from p to a triangle given by 3 chart points."""
    a, b, c = tri
    e1, e2 = b - a, c - a
    g = np.array([[e1 @ e1, e1 @ e2], [e1 @ e2, e2 @ e2]])
    rhs = np.array([e1 @ (p - a), e2 @ (p - a)])
    st = np.linalg.solve(g, rhs)
    if st[0] >= 0 and st[1] >= 0 and st.sum() <= 1:
        foot = a + st[0] * e1 + st[1] * e2
        return float(np.linalg.norm(p - foot))
    best = math.inf
    for q, r in ((a, b), (b, c), (c, a)):
        d = r - q
        t = float(np.clip((p - q) @ d / (d @ d), 0.0, 1.0))
        best = min(best, float(np.linalg.norm(p - (q + t * d))))
    return best


def _clip_polygon(lines, eps_line, center, half):
    """Clip a large CCW box by the half-planes a*s + b*t + c >= 0.

    Returns the CCW vertex array, or None when the intersection is
    empty or degenerate at the per-line tolerances eps_line.
    """
    poly = [
        np.array([center[0] - half, center[1] - half]),
        np.array([center[0] + half, center[1] - half]),
        np.array([center[0] + half, center[1] + half]),
        np.array([center[0] - half, center[1] + half]),
    ]
    for (a, b, c), eps in zip(lines, eps_line):
        if not poly:
            return None
        vals = [a * p[0] + b * p[1] + c for p in poly]
        nxt = []
        n = len(poly)
        for i in range(n):
            j = (i + 1) % n
            vi, vj = vals[i], vals[j]
            if vi >= -eps:
                nxt.append(poly[i])
            if (vi > eps and vj < -eps) or (vi < -eps and vj > eps):
                t = vi / (vi - vj)
                nxt.append(poly[i] + t * (poly[j] - poly[i]))
        poly = nxt
    if len(poly) < 3:
        return None
    snap = float(min(eps_line))
    out = []
    for p in poly:
        if not out or np.linalg.norm(p - out[-1]) > snap:
            out.append(p)
    while len(out) >= 2 and np.linalg.norm(out[0] - out[-1]) <= snap:
        out.pop()
    if len(out) < 3:
        return None
    keep = []
    k = len(out)
    for i in range(k):
        prev, cur, nxt_ = out[i - 1], out[i], out[(i + 1) % k]
        cross = (cur[0] - prev[0]) * (nxt_[1] - cur[1]) - (cur[1] - prev[1]) * (
            nxt_[0] - cur[0]
        )
        span = max(np.linalg.norm(cur - prev), np.linalg.norm(nxt_ - cur))
        if abs(cross) > snap * span:
            keep.append(i)
    if len(keep) < 3:
        return None
    return np.array([out[i] for i in keep])


def trace_leaf(cx, dist, which="alpha", seed=None, config=None):
    """Trace the leaf of one plane field through a seed point.

    The affine 2-plane through the seed parallel to the chosen field is
    intersected with every reachable simplex; crossings continue through
    facet gluings. Polygon corners land on 2-faces of the complex (the
    cone points of the leaf when those faces are singular) and the
    resulting polygon complex is fan-triangulated into a TriSurface.
    """
    cfg = config or Config()
    charts = cx.charts()
    m = cx.num_simplices
    scale = float(cx.edge_lengths.max())
    diam = scale
    snap = cfg.tol_snap * scale
    planes = dist.alpha if which == "alpha" else dist.beta
    transverse = dist.beta if which == "alpha" else dist.alpha
    tri_ids, _ = cx.triangle_orbits()
    angles = cx.cone_angles()
    singular = np.abs(angles - _TWO_PI) > cfg.tol_angle

    if seed is None:
        seed = (0, np.full(5, 0.2))
    s0 = int(seed[0])
    bary0 = np.asarray(seed[1], dtype=np.float64)
    x0 = bary0 @ charts[s0]
    for k in range(10):
        if singular[tri_ids[s0, k]]:
            tri = charts[s0][list(TRIPLES4[k])]
            if _point_triangle_distance(x0, tri) <= snap:
                raise SeedSingular(
                    f"seed point sits on a singular triangle of simplex {s0}"
                )

    functionals = {}

    def funcs(s):
        if s not in functionals:
            functionals[s] = _barycentric_functionals(charts[s])
        return functionals[s]

    quantum = 1e-6 * scale
    budget = cfg.trace_budget_multiplier * m
    visits = []
    edge_records = {}
    queue = collections.deque([(s0, x0)])
    seen = set()
    states = 0
    while queue:
        s, x = queue.popleft()
        w = transverse[s]
        key = (
            s,
            int(round(float(x @ w.u) / quantum)),
            int(round(float(x @ w.v) / quantum)),
        )
        if key in seen:
            continue
        seen.add(key)
        states += 1
        if states > budget:
            raise NonClosingLeaf(
                f"leaf exceeded budget of {budget} simplex slices"
            )
        grads, offs = funcs(s)
        u, v = planes[s].u, planes[s].v
        a = grads @ u
        b = grads @ v
        c = grads @ x + offs
        gnorm = np.hypot(a, b)
        for i in range(5):
            if gnorm[i] < 1e-12 / scale and abs(c[i]) <= cfg.tol_snap:
                raise DegenerateSlice(
                    f"slicing plane lies inside facet {i} of simplex {s}"
                )
        eps_line = snap * np.maximum(gnorm, 1e-30)
        centroid = charts[s].mean(axis=0)
        center = ((centroid - x) @ u, (centroid - x) @ v)
        poly = _clip_polygon(
            np.column_stack([a, b, c]), eps_line, center, 3.0 * diam
        )
        if poly is None:
            continue
        corner_vals = poly @ np.vstack([a, b]) + c
        near = np.abs(corner_vals) <= 2.0 * eps_line
        if np.any(near.sum(axis=1) >= 3):
            raise DegenerateSlice(
                f"slicing plane passes through the codim-3 skeleton at "
                f"simplex {s}"
            )
        vid = len(visits)
        visits.append((s, poly, x.copy(), u.copy(), v.copy()))
        k = len(poly)
        for j in range(k):
            mid = (poly[j] + poly[(j + 1) % k]) / 2.0
            vals = np.abs(mid @ np.vstack([a, b]) + c)
            on = [i for i in range(5) if vals[i] <= 2.0 * eps_line[i]]
            if len(on) != 1:
                raise DegenerateSlice(
                    f"polygon side not on a single facet at simplex {s}"
                )
            f = on[0]
            s2, f2, _ = cx.gluings[(s, f)]
            rot, shift = cx.facet_transition(s, f)
            queue.append((s2, rot.T @ (x - shift)))
            p = x + poly[j][0] * u + poly[j][1] * v
            q = x + poly[(j + 1) % k][0] * u + poly[(j + 1) % k][1] * v
            if (s, f) <= (s2, f2):
                gkey, ends = (s, f, s2, f2), np.vstack([p, q])
            else:
                r2, t2 = cx.facet_transition(s2, f2)
                ends = np.vstack([r2 @ p + t2, r2 @ q + t2])
                gkey = (s2, f2, s, f)
            edge_records.setdefault(gkey, []).append((vid, j, ends))

    surface = _assemble_leaf(visits, edge_records, snap)
    return Leaf(which=which, seed=(s0, bary0), surface=surface, visits=visits,
                states=states)


def _assemble_leaf(visits, edge_records, snap):
    """Fan-triangulate the visit polygons and glue matched sides."""
    tri_rows = []
    len_rows = []
    gluings = {}
    side_slot = []

    def glue(t1, s1, t2, s2):
        gluings[(t1, s1)] = (t2, s2)
        gluings[(t2, s2)] = (t1, s1)

    for vid, (_, poly, _, _, _) in enumerate(visits):
        k = len(poly)
        base = len(tri_rows)
        labels = [vid * 8 + c for c in range(k)]
        for i in range(1, k - 1):
            p0, pi, pj = poly[0], poly[i], poly[i + 1]
            tri_rows.append((labels[0], labels[i], labels[i + 1]))
            len_rows.append(
                (
                    np.linalg.norm(pi - p0),
                    np.linalg.norm(pj - pi),
                    np.linalg.norm(p0 - pj),
                )
            )
        for i in range(1, k - 2):
            glue(base + i - 1, 2, base + i, 0)
        smap = {0: (base, 0), k - 1: (base + k - 3, 2)}
        for j in range(1, k - 1):
            smap[j] = (base + j - 1, 1)
        side_slot.append(smap)

    unmatched = 0
    for gkey, entries in edge_records.items():
        used = [False] * len(entries)
        for i, (vi, ji, ei) in enumerate(entries):
            if used[i]:
                continue
            partner = None
            for j in range(i + 1, len(entries)):
                if used[j]:
                    continue
                vj, jj, ej = entries[j]
                straight = max(
                    np.linalg.norm(ei[0] - ej[1]), np.linalg.norm(ei[1] - ej[0])
                )
                same = max(
                    np.linalg.norm(ei[0] - ej[0]), np.linalg.norm(ei[1] - ej[1])
                )
                if min(straight, same) <= 10.0 * snap:
                    partner = j
                    break
            if partner is None:
                unmatched += 1
                continue
            used[i] = used[partner] = True
            vj, jj, _ = entries[partner]
            glue(*side_slot[vi][ji], *side_slot[vj][jj])
    if unmatched:
        raise NonClosingLeaf(f"{unmatched} leaf boundary sides found no partner")

    triangles = np.array(tri_rows, dtype=np.int64)
    lengths = np.array(len_rows, dtype=np.float64)
    surface = TriSurface(triangles, lengths, gluings)
    surface.validate()
    return surface


def leaf_samples(cx, leaf, per_edge=4, ring=True):
    """Barycentric sample points covering a leaf, for distance probes."""
    charts = cx.charts()
    out = []
    for s, poly, x, u, v in leaf.visits:
        grads, offs = _barycentric_functionals(charts[s])
        centroid2 = poly.mean(axis=0)
        pts2 = [centroid2]
        k = len(poly)
        for j in range(k):
            nxt = poly[(j + 1) % k]
            for step in range(per_edge):
                pts2.append(poly[j] + (step / per_edge) * (nxt - poly[j]))
            if ring:
                pts2.append((poly[j] + centroid2) / 2.0)
        for st in pts2:
            p = x + st[0] * u + st[1] * v
            bary = grads @ p + offs
            bary = np.clip(bary, 0.0, None)
            out.append((s, bary / bary.sum()))
    return out


def _leaf_point_bary(cx, leaf, visit_idx):
    s, poly, x, u, v = leaf.visits[visit_idx]
    grads, offs = _barycentric_functionals(cx.charts()[s])
    st = poly.mean(axis=0)
    p = x + st[0] * u + st[1] * v
    bary = np.clip(grads @ p + offs, 0.0, None)
    return s, bary / bary.sum()


def shifted_seed(cx, dist, which, seed, fraction=0.35):
    """A seed for a parallel nearby leaf: step along the transverse field."""
    charts = cx.charts()
    s0 = int(seed[0])
    bary = np.asarray(seed[1], dtype=np.float64)
    x0 = bary @ charts[s0]
    w = (dist.beta if which == "alpha" else dist.alpha)[s0].u
    grads, offs = _barycentric_functionals(charts[s0])
    lam = grads @ x0 + offs
    d = grads @ w
    t_max = math.inf
    for i in range(5):
        if d[i] < -1e-15:
            t_max = min(t_max, lam[i] / -d[i])
    x1 = x0 + fraction * t_max * w
    bary1 = np.clip(grads @ x1 + offs, 0.0, None)
    return (s0, bary1 / bary1.sum())


def leaf_distance_consistency(cx, source_leaf, target_leaf, config=None,
                              graph=None, extra_base=0):
    """Spread of ambient distances from points of one leaf to another leaf.

    For a true product every point of a leaf sits at the same distance
    from any fixed parallel leaf; the returned deviation is the largest
    relative disagreement between sampled source points.
    """
    cfg = config or Config()
    n_src = min(3, len(source_leaf.visits))
    src_idx = [
        (i * len(source_leaf.visits)) // n_src for i in range(n_src)
    ]
    sources = [_leaf_point_bary(cx, source_leaf, i) for i in src_idx]
    targets = leaf_samples(cx, target_leaf)
    if graph is None:
        graph = AmbientGraph(cx, extra_points=sources + targets, config=cfg)
        extra_base = 0
    dists = []
    for i in range(len(sources)):
        d = graph.distances_from(graph.extra_node(extra_base + i))
        tnodes = [
            graph.extra_node(extra_base + len(sources) + j)
            for j in range(len(targets))
        ]
        dists.append(float(min(d[t] for t in tnodes)))
    top = max(dists)
    deviation = (top - min(dists)) / max(top, 1e-12)
    return {
        "distances": dists,
        "deviation": deviation,
        "ok": deviation <= cfg.tol_distance,
    }


# -- verification ---------------------------------------------------------


@dataclasses.dataclass
class VerificationResult:
    census_match: bool
    census_detail: str
    volume_ok: bool
    volume_error: float
    distance_ok: bool
    distance_error: float
    leaf_ok: bool
    leaf_deviation: float

    @property
    def passed(self):
        return (
            self.census_match
            and self.volume_ok
            and self.distance_ok
            and self.leaf_ok
        )

    def to_dict(self):
        return {
            "census_match": self.census_match,
            "census_detail": self.census_detail,
            "volume_ok": self.volume_ok,
            "volume_error": self.volume_error,
            "distance_ok": self.distance_ok,
            "distance_error": self.distance_error,
            "leaf_ok": self.leaf_ok,
            "leaf_deviation": self.leaf_deviation,
        }


def _census_summary_sets(census):
    return sorted(
        (st.cone_angle, float(st.surface.euler_characteristic()),
         st.surface.area())
        for st in census.strata
    )


def _merge_readings(readings, tol=1e-6):
    """Sorted distinct values, merging anything closer than tol."""
    out = []
    for r in sorted(readings):
        if not out or r - out[-1] > tol:
            out.append(r)
    return tuple(out)


def _codim4_angle_pairs(census):
    pairs = []
    for vert in census.codim4_vertices:
        readings = [census.strata[i].cone_angle for i, _, _ in vert.incidences]
        readings += [a for _, _, a in vert.incidences]
        pairs.append(_merge_readings(readings))
    return sorted(pairs)


def _multisets_close(a, b, tol=1e-6):
    """Elementwise comparison of two sorted lists of numeric tuples."""
    if len(a) != len(b):
        return False
    for ta, tb in zip(a, b):
        if len(ta) != len(tb):
            return False
        for xa, xb in zip(ta, tb):
            if abs(xa - xb) > tol:
                return False
    return True


def verify_product(cx, factor_alpha, factor_beta, config=None, leaves=None):
    """Check that the product of the two factors reproduces the input.

    Rebuilds the product complex of the factors and compares the
    singular census, conserves the total volume, matches the sampled
    geodesic distance spectrum between codimension-4 vertices, and (when
    traced leaves are supplied) checks leaf distance consistency.
    """
    cfg = config or Config()
    census_m = singular_census(cx, tol_angle=cfg.tol_angle)

    census_match = True
    detail = "census multisets agree"
    try:
        prod = product_complex(factor_alpha, factor_beta)
        census_p = singular_census(prod, tol_angle=cfg.tol_angle)
        if census_p.flags or census_m.flags:
            census_match = False
            detail = "census flags: " + "; ".join(census_p.flags + census_m.flags)
        elif not _multisets_close(
            _census_summary_sets(census_p), _census_summary_sets(census_m)
        ):
            census_match = False
            detail = (
                f"stratum multisets differ: product {_census_summary_sets(census_p)}"
                f" vs input {_census_summary_sets(census_m)}"
            )
        elif len(census_p.codim4_vertices) != len(census_m.codim4_vertices):
            census_match = False
            detail = (
                f"codim-4 counts differ: product {len(census_p.codim4_vertices)}"
                f" vs input {len(census_m.codim4_vertices)}"
            )
        elif not _multisets_close(
            _codim4_angle_pairs(census_p), _codim4_angle_pairs(census_m)
        ):
            census_match = False
            detail = "codim-4 angle multisets differ"
    except Pl4Error as exc:
        census_match = False
        detail = f"product census failed: {exc}"

    vol = cx.total_volume()
    vol_err = abs(vol - factor_alpha.area() * factor_beta.area()) / max(vol, 1e-300)
    volume_ok = vol_err <= cfg.tol_volume

    sources = []
    targets = []
    n_src = 0
    if leaves is not None:
        source_leaf, target_leaf = leaves
        n_src = min(3, len(source_leaf.visits))
        src_idx = [(i * len(source_leaf.visits)) // n_src for i in range(n_src)]
        sources = [_leaf_point_bary(cx, source_leaf, i) for i in src_idx]
        targets = leaf_samples(cx, target_leaf)
    graph = AmbientGraph(cx, extra_points=sources + targets, config=cfg)

    distance_ok, distance_error = _distance_spectra_match(
        cx, census_m, factor_alpha, factor_beta, graph, cfg
    )

    leaf_ok, leaf_dev = True, 0.0
    if leaves is not None:
        res = leaf_distance_consistency(
            cx, source_leaf, target_leaf, config=cfg, graph=graph, extra_base=0
        )
        leaf_ok, leaf_dev = res["ok"], res["deviation"]

    return VerificationResult(
        census_match=census_match,
        census_detail=detail,
        volume_ok=volume_ok,
        volume_error=float(vol_err),
        distance_ok=distance_ok,
        distance_error=float(distance_error),
        leaf_ok=leaf_ok,
        leaf_deviation=float(leaf_dev),
    )


def _distance_spectra_match(cx, census, fa, fb, graph, cfg):
    """Compare codim-4 pairwise distances against the factor prediction."""
    vert_ids, _ = cx.vertex_orbits()
    nodes = []
    for vert in census.codim4_vertices:
        s, local = (int(t) for t in np.argwhere(vert_ids == vert.ambient_vertex)[0])
        nodes.append(graph.vertex_node(s, local))
    spectrum_m = []
    for i in range(len(nodes)):
        d = graph.distances_from(nodes[i])
        for j in range(i + 1, len(nodes)):
            spectrum_m.append(float(d[nodes[j]]))
    spectrum_m.sort()

    ga = SurfaceGeodesicGraph(fa, config=cfg)
    gb = SurfaceGeodesicGraph(fb, config=cfg)
    da = ga.cone_point_distances(tol=cfg.tol_defect)
    db = gb.cone_point_distances(tol=cfg.tol_defect)
    na, nb = da.shape[0], db.shape[0]
    spectrum_p = []
    for i in range(na):
        for j in range(nb):
            for i2 in range(na):
                for j2 in range(nb):
                    if (i2, j2) <= (i, j):
                        continue
                    spectrum_p.append(math.hypot(da[i, i2], db[j, j2]))
    spectrum_p.sort()

    if len(spectrum_m) != len(spectrum_p):
        return False, math.inf
    if not spectrum_m:
        return True, 0.0
    worst = 0.0
    for a, b in zip(spectrum_m, spectrum_p):
        worst = max(worst, abs(a - b) / max(b, 1e-12))
    return worst <= cfg.tol_distance, worst


# -- the decomposition pipeline -------------------------------------------


@dataclasses.dataclass
class SplitReport:
    """Everything decompose learned, in one serializable record."""

    config: Config
    verdict: str = "Failure"
    failure_stage: str = ""
    failure_type: str = ""
    failure_message: str = ""
    input: dict = dataclasses.field(default_factory=dict)
    census: dict = dataclasses.field(default_factory=dict)
    holonomy: dict = dataclasses.field(default_factory=dict)
    forms: dict = dataclasses.field(default_factory=dict)
    distributions: dict = dataclasses.field(default_factory=dict)
    alignment: list = dataclasses.field(default_factory=list)
    codim4: list = dataclasses.field(default_factory=list)
    radii: dict = dataclasses.field(default_factory=dict)
    leaves: dict = dataclasses.field(default_factory=dict)
    verification: dict = dataclasses.field(default_factory=dict)
    factor_alpha: TriSurface = None
    factor_beta: TriSurface = None
    exception: Pl4Error = None

    def to_dict(self):
        return _jsonable(
            {
                "verdict": self.verdict,
                "failure": {
                    "stage": self.failure_stage,
                    "type": self.failure_type,
                    "message": self.failure_message,
                },
                "input": self.input,
                "census": self.census,
                "holonomy": self.holonomy,
                "forms": self.forms,
                "distributions": self.distributions,
                "alignment": self.alignment,
                "codim4": self.codim4,
                "radii": self.radii,
                "leaves": self.leaves,
                "verification": self.verification,
                "config": self.config.to_dict(),
            }
        )

    def to_text(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj]
    return obj


def _leaf_stats(leaf):
    defects = leaf.surface.angle_defects()
    cones = leaf.surface.cone_points()
    return {
        "which": leaf.which,
        "polygons": len(leaf.visits),
        "triangles": leaf.surface.num_triangles,
        "area": leaf.surface.area(),
        "euler": leaf.surface.euler_characteristic(),
        "total_defect": float(defects.sum()),
        "cone_angles": sorted(round(_TWO_PI - d, 9) for _, d in cones),
    }


def _traced(cx, dist, which, seed, cfg):
    """trace_leaf with deterministic reseeding on degenerate slices."""
    rng = np.random.default_rng(cfg.seed)
    attempt_seed = seed
    for attempt in range(8):
        try:
            return trace_leaf(cx, dist, which=which, seed=attempt_seed, config=cfg)
        except (DegenerateSlice, SeedSingular):
            if attempt == 7:
                raise
            s0 = 0 if seed is None else int(seed[0])
            bary = np.full(5, 0.2) + 0.08 * rng.uniform(-1.0, 1.0, size=5)
            bary = np.clip(bary, 0.02, None)
            attempt_seed = (s0, bary / bary.sum())
    raise AssertionError("unreachable")


def decompose(cx, config=None):
    """Run the full splitting pipeline and report every stage.

    Never raises for mathematical failures: the first failing stage is
    recorded and the verdict stays Failure. The stages are census,
    holonomy, forms, betti_check, distributions, alignment, codim4,
    leaves, verification.
    """
    cfg = config or Config()
    report = SplitReport(config=cfg)
    report.input = {
        "simplices": cx.num_simplices,
        "volume": cx.total_volume(),
        "worst_cone_angle": cx.worst_cone_angle(),
        "nonneg_curved": bool(cx.is_nonneg_curved(tol=cfg.tol_angle)),
    }

    stage = "census"
    try:
        census = singular_census(cx, tol_angle=cfg.tol_angle)
        report.census = {
            "strata": [
                {
                    "index": i,
                    "cone_angle": st.cone_angle,
                    "euler": st.surface.euler_characteristic(),
                    "area": st.surface.area(),
                    "triangles": st.surface.num_triangles,
                }
                for i, st in enumerate(census.strata)
            ],
            "codim4_count": len(census.codim4_vertices),
            "flags": list(census.flags),
        }
        if not census.clean:
            raise HypothesisViolation(
                "singular set is not a clean surface system: "
                + "; ".join(census.flags)
            )

        stage = "holonomy"
        generators, developer = holonomy_generators(cx, census)
        unitary = is_unitary_holonomy(generators, tol=cfg.tol_orthogonal)
        report.holonomy = {
            "generators": len(generators),
            "unitary": bool(unitary),
        }
        if not unitary:
            raise HypothesisViolation(
                "stratum holonomy does not preserve the invariant-form pair"
            )

        stage = "forms"
        basis = invariant_forms(generators, tol=cfg.tol_orthogonal)
        caveat = connectivity_caveat(generators, basis)
        report.forms = {"dimension": basis.dim, "connectivity_caveat": bool(caveat)}

        stage = "betti_check"
        if not betti_check(basis, expected=2):
            raise WrongDimension(basis.dim)

        stage = "distributions"
        dist = extract_distributions(
            basis, generators, cx=cx, developer=developer, config=cfg
        )
        report.distributions = {
            "lam": dist.lam,
            "mu": dist.mu,
            "eigen_moduli": list(dist.eigen_moduli),
            "transport_deviation": dist.transport_deviation,
        }

        stage = "alignment"
        table = align_strata(cx, dist, census)
        report.alignment = [
            {
                "stratum": row.stratum,
                "tag": row.tag,
                "residual_alpha": row.residual_alpha,
                "residual_beta": row.residual_beta,
            }
            for row in table
        ]
        bad = [row.stratum for row in table if row.tag == MISALIGNED]
        if bad:
            raise Misaligned(
                f"strata {bad} are tangent to neither invariant plane field"
            )

        stage = "codim4"
        structures = classify_codim4(cx, dist, census, table, developer, config=cfg)
        report.codim4 = [
            {
                "vertex": st.ambient_vertex,
                "angle_alpha": st.angle_alpha,
                "angle_beta": st.angle_beta,
                "alpha_strata": st.alpha_strata,
                "beta_strata": st.beta_strata,
                "orthogonality": st.orthogonality,
            }
            for st in structures
        ]
        delta = stratum_separation(cx, census)
        report.radii = {"delta": delta, "epsilon": delta / 3.0}

        stage = "leaves"
        leaf_alpha = _traced(cx, dist, "alpha", None, cfg)
        leaf_beta = _traced(cx, dist, "beta", None, cfg)
        target_seed = shifted_seed(cx, dist, "alpha", leaf_alpha.seed)
        leaf_target = _traced(cx, dist, "alpha", target_seed, cfg)
        report.factor_alpha = simplify(leaf_alpha.surface, tol=cfg.tol_defect)
        report.factor_beta = simplify(leaf_beta.surface, tol=cfg.tol_defect)
        report.leaves = {
            "alpha": _leaf_stats(leaf_alpha),
            "beta": _leaf_stats(leaf_beta),
        }

        stage = "verification"
        result = verify_product(
            cx,
            report.factor_alpha,
            report.factor_beta,
            config=cfg,
            leaves=(leaf_alpha, leaf_target),
        )
        report.verification = result.to_dict()
        if not result.passed:
            failed = [
                name
                for name, ok in (
                    ("census", result.census_match),
                    ("volume", result.volume_ok),
                    ("distances", result.distance_ok),
                    ("leaf-consistency", result.leaf_ok),
                )
                if not ok
            ]
            raise HypothesisViolation(
                "product verification failed: " + ", ".join(failed)
            )
    except Pl4Error as exc:
        report.verdict = "Failure"
        report.failure_stage = stage
        report.failure_type = type(exc).__name__
        report.failure_message = str(exc)
        report.exception = exc
        return report

    report.verdict = "Success"
    return report
