"""Metric 4-complex construction, products, and the singular census."""

import math

import numpy as np
import pytest

from pl4split.complex4 import (
    PAIRS4,
    MetricComplex4,
    facet_locals,
    load_complex,
    product_complex,
    save_complex,
    singular_census,
)
from pl4split.config import Config
from pl4split.errors import InvalidInput
from pl4split.metricgraph import AmbientGraph, SurfaceGeodesicGraph
from pl4split.surface import (
    cube_surface,
    flat_torus_surface,
    octahedron_surface,
    tetrahedron_surface,
)

TWO_PI = 2.0 * math.pi


def regular_simplex_pair():
    """Two unit regular 4-simplices glued along all five facets."""
    simplices = [[0, 1, 2, 3, 4], [0, 1, 2, 3, 4]]
    lengths = [[1.0] * 10] * 2
    gluings = {}
    for f in range(5):
        perm = facet_locals(f)
        gluings[(0, f)] = (1, f, perm)
        gluings[(1, f)] = (0, f, perm)
    return MetricComplex4(simplices, lengths, gluings)


class TestBasics:
    def test_regular_simplex_chart_and_volume(self):
        cx = regular_simplex_pair()
        cx.validate()
        charts = cx.charts()
        # all pairwise distances 1
        for s in range(2):
            for a in range(5):
                for b in range(a + 1, 5):
                    d = np.linalg.norm(charts[s, a] - charts[s, b])
                    assert d == pytest.approx(1.0, abs=1e-12)
        # unit regular 4-simplex volume: sqrt(5) / 96
        assert cx.volumes()[0] == pytest.approx(math.sqrt(5) / 96, rel=1e-12)

    def test_regular_simplex_dihedral(self):
        cx = regular_simplex_pair()
        want = math.acos(1.0 / 4.0)
        assert np.allclose(cx.dihedral_angles(), want, atol=1e-12)

    def test_doubled_simplex_cone_angles(self):
        # two simplices around each triangle: cone angle 2*acos(1/4),
        # far below 2 pi, so every triangle is singular
        cx = regular_simplex_pair()
        angles = cx.cone_angles()
        assert angles.shape == (10,)
        assert np.allclose(angles, 2 * math.acos(0.25), atol=1e-12)
        assert cx.is_nonneg_curved()

    def test_orbit_counts_doubled_simplex(self):
        cx = regular_simplex_pair()
        _, nv = cx.vertex_orbits()
        _, ne = cx.edge_orbits()
        _, nt = cx.triangle_orbits()
        assert (nv, ne, nt) == (5, 10, 10)

    def test_validate_rejects_metric_mismatch(self):
        cx = regular_simplex_pair()
        cx.edge_lengths = cx.edge_lengths.copy()
        cx.edge_lengths[1, 0] = 1.25
        with pytest.raises(InvalidInput, match="metric|degenerate"):
            cx.validate()

    def test_validate_rejects_unglued(self):
        cx = regular_simplex_pair()
        del cx.gluings[(0, 0)]
        with pytest.raises(InvalidInput, match="involutive|unglued"):
            cx.validate()

    def test_degenerate_lengths_rejected(self):
        lengths = [[1.0] * 10] * 2
        lengths[0] = [1.0, 1.0, 1.0, 2.5, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]
        lengths[1] = list(lengths[0])
        cx = regular_simplex_pair()
        cx2 = MetricComplex4(cx.simplices, lengths, cx.gluings)
        with pytest.raises(InvalidInput):
            cx2.validate()

    def test_from_labels_requires_distinct(self):
        with pytest.raises(InvalidInput, match="repeats"):
            MetricComplex4.from_labels([[0, 0, 1, 2, 3]], [[1.0] * 10])

    def test_from_labels_requires_closed(self):
        with pytest.raises(InvalidInput, match="expected 2"):
            MetricComplex4.from_labels([[0, 1, 2, 3, 4]], [[1.0] * 10])


class TestProducts:
    def test_tetra_product_counts(self):
        P = tetrahedron_surface()
        cx = product_complex(P, P)
        assert cx.num_simplices == 6 * 4 * 4
        cx.validate()
        _, nv = cx.vertex_orbits()
        assert nv == 16

    def test_tetra_product_volume(self):
        P = tetrahedron_surface()
        cx = product_complex(P, P)
        assert cx.total_volume() == pytest.approx(P.area() ** 2, rel=1e-9)

    def test_mixed_product(self):
        P = tetrahedron_surface()
        Q = cube_surface()
        cx = product_complex(P, Q)
        assert cx.num_simplices == 6 * 4 * 12
        cx.validate()
        assert cx.total_volume() == pytest.approx(P.area() * Q.area(), rel=1e-9)
        assert cx.is_nonneg_curved()

    def test_cube_product_counts(self):
        Q = cube_surface()
        cx = product_complex(Q, Q)
        assert cx.num_simplices == 864
        cx.validate()
        assert cx.total_volume() == pytest.approx(36.0, rel=1e-9)

    def test_flat_torus_product_is_flat(self):
        T = flat_torus_surface(3)
        cx = product_complex(T, T)
        assert cx.num_simplices == 6 * 18 * 18
        assert np.allclose(cx.cone_angles(), TWO_PI, atol=1e-9)
        census = singular_census(cx)
        assert census.strata == [] and census.clean

    def test_product_cone_angle_spectrum(self):
        P = tetrahedron_surface()
        cx = product_complex(P, P)
        angles = cx.cone_angles()
        singular = angles[np.abs(angles - TWO_PI) > 1e-7]
        # 8 stratum spheres, 4 triangles each
        assert singular.shape == (32,)
        assert np.allclose(singular, math.pi, atol=1e-9)


class TestTransitions:
    def test_facet_transitions_match_gluing(self):
        P = tetrahedron_surface()
        cx = product_complex(P, P)
        charts = cx.charts()
        for (s, f) in list(cx.gluings)[::37]:
            s2, f2, perm = cx.gluings[(s, f)]
            rot, shift = cx.facet_transition(s, f)
            assert np.allclose(rot @ rot.T, np.eye(4), atol=1e-10)
            fl = facet_locals(f)
            mapped = charts[s2][list(perm)] @ rot.T + shift
            assert np.allclose(mapped, charts[s][list(fl)], atol=1e-9)
            # the partner's off-facet vertex lands strictly on the far side
            base = charts[s][list(fl)]
            normal = np.linalg.svd(
                (base[1:] - base[0]).T, full_matrices=True
            )[0][:, 3]
            side_own = normal @ (charts[s][f] - base[0])
            far = rot @ charts[s2][f2] + shift
            side_far = normal @ (far - base[0])
            assert side_own * side_far < 0

    def test_dual_graph_tree(self):
        P = tetrahedron_surface()
        cx = product_complex(P, P)
        order, parent = cx.dual_graph_tree()
        assert sorted(order) == list(range(cx.num_simplices))
        assert order[0] == 0 and parent[0] is None
        for s in order[1:]:
            prev, f = parent[s]
            assert cx.gluings[(prev, f)][0] == s
        # deterministic
        assert cx.dual_graph_tree()[0] == order


class TestCensus:
    def test_tetra_census(self):
        P = tetrahedron_surface()
        census = singular_census(product_complex(P, P))
        assert census.clean
        assert len(census.strata) == 8
        for st in census.strata:
            assert st.cone_angle == pytest.approx(math.pi, abs=1e-9)
            assert st.surface.euler_characteristic() == 2
            assert st.surface.num_triangles == 4
            assert st.surface.area() == pytest.approx(P.area(), rel=1e-9)
            assert len(st.vertex_map) == 4
        assert len(census.codim4_vertices) == 16
        for v in census.codim4_vertices:
            assert len(v.incidences) == 2
            for _, _, angle in v.incidences:
                assert angle == pytest.approx(math.pi, abs=1e-9)

    def test_cube_census(self):
        census = singular_census(product_complex(cube_surface(), cube_surface()))
        assert census.clean
        assert len(census.strata) == 16
        for st in census.strata:
            assert st.cone_angle == pytest.approx(1.5 * math.pi, abs=1e-9)
            assert st.surface.euler_characteristic() == 2
            assert st.surface.area() == pytest.approx(6.0, rel=1e-9)
        assert len(census.codim4_vertices) == 64
        angles = {
            round(a, 9)
            for v in census.codim4_vertices
            for _, _, a in v.incidences
        }
        assert angles == {round(1.5 * math.pi, 9)}

    def test_mixed_census_distinguishes_factors(self):
        P = tetrahedron_surface()
        Q = octahedron_surface()
        census = singular_census(product_complex(P, Q))
        assert census.clean
        # 4 spheres shaped like Q with tetra cone angle, 6 shaped like P
        by_angle = {}
        for st in census.strata:
            by_angle.setdefault(round(st.cone_angle, 6), []).append(st)
        tetra_angle = round(math.pi, 6)
        octa_angle = round(4 * math.pi / 3, 6)
        assert set(by_angle) == {tetra_angle, octa_angle}
        assert len(by_angle[tetra_angle]) == 4
        assert len(by_angle[octa_angle]) == 6
        for st in by_angle[tetra_angle]:
            assert st.surface.area() == pytest.approx(Q.area(), rel=1e-9)
        for st in by_angle[octa_angle]:
            assert st.surface.area() == pytest.approx(P.area(), rel=1e-9)
        assert len(census.codim4_vertices) == 24

    def test_stratum_vertex_map_targets_codim4(self):
        P = tetrahedron_surface()
        census = singular_census(product_complex(P, P))
        crossing = {v.ambient_vertex for v in census.codim4_vertices}
        mapped = set()
        for st in census.strata:
            mapped.update(st.vertex_map.values())
        assert mapped == crossing

    def test_census_flags_doubled_simplex(self):
        # every triangle singular with equal angles, but the "strata"
        # are not surfaces: each edge meets 8 singular triangle sides
        cx = regular_simplex_pair()
        census = singular_census(cx)
        assert not census.clean
        assert any("expected 2" in f for f in census.flags)


class TestProductMetric:
    def test_vertex_distances_split(self):
        P = tetrahedron_surface()
        cx = product_complex(P, P)
        cfg = Config()
        g = AmbientGraph(cx, config=cfg)
        sg = SurfaceGeodesicGraph(P, config=cfg)
        corner = {}
        for s in range(cx.num_simplices):
            for v in range(5):
                corner.setdefault(int(cx.simplices[s, v]), (s, v))
        assert len(corner) == 16
        dP = np.array(
            [[sg.distance_between_vertices(a, b) for b in range(4)] for a in range(4)]
        )
        for ip1, iq1 in [(0, 0), (1, 2)]:
            dist = g.distances_from(g.vertex_node(*corner[ip1 * 4 + iq1]))
            for ip2 in range(4):
                for iq2 in range(4):
                    got = dist[g.vertex_node(*corner[ip2 * 4 + iq2])]
                    want = math.hypot(dP[ip1, ip2], dP[iq1, iq2])
                    assert got == pytest.approx(want, abs=1e-9)


class TestFileIO:
    def test_round_trip(self, tmp_path):
        P = tetrahedron_surface()
        cx = product_complex(P, P)
        path = tmp_path / "prod.plc4"
        save_complex(cx, path)
        cx2 = load_complex(path)
        assert np.array_equal(cx.simplices, cx2.simplices)
        assert np.array_equal(cx.edge_lengths, cx2.edge_lengths)
        assert cx.gluings == cx2.gluings
        cx2.validate()

    def test_rejects_garbage(self, tmp_path):
        path = tmp_path / "bad.plc4"
        path.write_text("s 0 1 2 3\n")
        with pytest.raises(InvalidInput, match="malformed"):
            load_complex(path)

    def test_rejects_missing_gluing(self, tmp_path):
        path = tmp_path / "open.plc4"
        row = " ".join(["1.0"] * 10)
        path.write_text(f"s 0 1 2 3 4 {row}\n")
        with pytest.raises(InvalidInput, match="no gluing"):
            load_complex(path)

    def test_rejects_empty(self, tmp_path):
        path = tmp_path / "empty.plc4"
        path.write_text("# nothing\n")
        with pytest.raises(InvalidInput, match="no simplices"):
            load_complex(path)
