import math

import numpy as np
import pytest

from pl4split import surface as sf
from pl4split.errors import InvalidInput

TWO_PI = 2.0 * math.pi


def builders():
    return {
        "tetrahedron": sf.tetrahedron_surface(),
        "cube": sf.cube_surface(),
        "octahedron": sf.octahedron_surface(),
        "box123": sf.box_surface(1.0, 2.0, 3.0),
        "torus3": sf.flat_torus_surface(3),
    }


class TestBuilders:
    @pytest.mark.parametrize("name", ["tetrahedron", "cube", "octahedron", "box123", "torus3"])
    def test_valid(self, name):
        builders()[name].validate()

    def test_counts_and_characteristic(self):
        b = builders()
        assert b["tetrahedron"].num_triangles == 4
        assert b["cube"].num_triangles == 12
        assert b["octahedron"].num_triangles == 8
        assert b["torus3"].num_triangles == 18
        for name in ("tetrahedron", "cube", "octahedron", "box123"):
            assert b[name].euler_characteristic() == 2
        assert b["torus3"].euler_characteristic() == 0

    def test_areas(self):
        b = builders()
        assert np.isclose(b["tetrahedron"].area(), math.sqrt(3.0))
        assert np.isclose(b["cube"].area(), 6.0)
        assert np.isclose(b["octahedron"].area(), 2.0 * math.sqrt(3.0))
        assert np.isclose(b["box123"].area(), 2.0 * (2.0 + 6.0 + 3.0))
        assert np.isclose(b["torus3"].area(), 9.0)

    def test_defects(self):
        b = builders()
        expected = {
            "tetrahedron": [math.pi] * 4,
            "cube": [math.pi / 2] * 8,
            "octahedron": [TWO_PI / 3] * 6,
            "box123": [math.pi / 2] * 8,
            "torus3": [0.0] * 9,
        }
        for name, exp in expected.items():
            got = np.sort(b[name].angle_defects())
            np.testing.assert_allclose(got, np.sort(exp), atol=1e-9)

    @pytest.mark.parametrize("name", ["tetrahedron", "cube", "octahedron", "box123", "torus3"])
    def test_gauss_bonnet(self, name):
        s = builders()[name]
        total = s.angle_defects().sum()
        assert np.isclose(total, TWO_PI * s.euler_characteristic(), atol=1e-8)

    def test_all_nonneg_curved(self):
        for s in builders().values():
            assert s.is_nonneg_curved()

    def test_torus_needs_three(self):
        with pytest.raises(InvalidInput):
            sf.flat_torus_surface(2)

    def test_box_rejects_flat(self):
        with pytest.raises(InvalidInput):
            sf.box_surface(1.0, 0.0, 2.0)


class TestValidation:
    def test_from_triangles_rejects_open(self):
        with pytest.raises(InvalidInput):
            sf.TriSurface.from_triangles([(0, 1, 2)], [(1.0, 1.0, 1.0)])

    def test_rejects_triangle_inequality(self):
        tris = [(0, 1, 2), (0, 2, 1)]
        with pytest.raises(InvalidInput):
            sf.TriSurface.from_triangles(tris, [(1.0, 1.0, 3.0)] * 2).validate()

    def test_doubled_triangle_is_valid(self):
        s = sf.TriSurface.from_triangles(
            [(0, 1, 2), (0, 2, 1)], [(1.0, 1.0, 1.0), (1.0, 1.0, 1.0)]
        ).validate()
        assert s.euler_characteristic() == 2
        np.testing.assert_allclose(s.angle_defects(), [4 * math.pi / 3] * 3)

    def test_rejects_length_mismatch(self):
        s = sf.tetrahedron_surface()
        s.lengths[0, 0] = 1.5
        with pytest.raises(InvalidInput):
            s.validate()

    def test_rejects_disconnected(self):
        a = sf.tetrahedron_surface()
        tris = np.vstack([a.triangles, a.triangles + 10])
        lengths = np.vstack([a.lengths, a.lengths])
        gluings = dict(a.gluings)
        for (t, k), (t2, k2) in a.gluings.items():
            gluings[(t + 4, k)] = (t2 + 4, k2)
        with pytest.raises(InvalidInput):
            sf.TriSurface(tris, lengths, gluings).validate()


class TestFans:
    def test_fan_sizes(self):
        s = sf.octahedron_surface()
        fans = sf.vertex_fans(s)
        assert sorted(len(f) for f in fans.values()) == [4] * 6

    def test_fan_closes_consistently(self):
        s = sf.cube_surface()
        orbit_ids, _ = s.vertex_orbits()
        for t in range(s.num_triangles):
            for c in range(3):
                fan = sf.corner_fan(s, t, c)
                assert (t, c) in fan
                orbits = {int(orbit_ids[ft, fc]) for ft, fc in fan}
                assert orbits == {int(orbit_ids[t, c])}


class TestSubdivide:
    @pytest.mark.parametrize("name", ["tetrahedron", "cube", "box123", "torus3"])
    def test_preserves_metric_summary(self, name):
        s = builders()[name]
        s2 = sf.subdivide(s)
        s2.validate()
        assert s2.num_triangles == 4 * s.num_triangles
        assert np.isclose(s2.area(), s.area())
        assert s2.euler_characteristic() == s.euler_characteristic()
        d1 = np.sort(s.angle_defects())
        d2 = np.sort(s2.angle_defects())
        # subdivision adds flat vertices only
        np.testing.assert_allclose(d2[-len(d1):], d1, atol=1e-9)
        np.testing.assert_allclose(d2[: len(d2) - len(d1)], 0.0, atol=1e-9)

    def test_two_rounds(self):
        s = sf.subdivide(sf.tetrahedron_surface(), rounds=2)
        s.validate()
        assert s.num_triangles == 64
        assert np.isclose(s.area(), math.sqrt(3.0))


class TestSimplify:
    def test_removes_all_flat_vertices(self):
        s = sf.subdivide(sf.tetrahedron_surface())
        out = sf.simplify(s)
        out.validate()
        _, nv = out.vertex_orbits()
        assert nv == 4
        assert out.num_triangles == 4
        assert np.isclose(out.area(), math.sqrt(3.0))
        np.testing.assert_allclose(np.sort(out.angle_defects()), [math.pi] * 4, atol=1e-9)

    def test_cube_roundtrip(self):
        s = sf.subdivide(sf.cube_surface())
        out = sf.simplify(s)
        out.validate()
        _, nv = out.vertex_orbits()
        assert nv == 8
        assert out.num_triangles == 12
        assert np.isclose(out.area(), 6.0)

    def test_flat_torus_is_irreducible_only_at_the_end(self):
        # every vertex is flat; simplification bottoms out at some small
        # valid torus rather than destroying the surface
        s = sf.flat_torus_surface(3)
        out = sf.simplify(s)
        out.validate()
        assert out.euler_characteristic() == 0
        assert np.isclose(out.area(), 9.0)

    def test_single_removal_preserves_defects(self):
        s = sf.subdivide(sf.octahedron_surface())
        defects_before = np.sort(s.angle_defects())
        flat = int(np.argmin(np.abs(s.angle_defects())))
        out = sf.remove_flat_vertex(s, flat)
        assert out is not None
        out.validate()
        d = np.sort(out.angle_defects())
        np.testing.assert_allclose(d, defects_before[1:], atol=1e-9)
        assert np.isclose(out.area(), s.area())

    def test_refuses_cone_vertex(self):
        s = sf.tetrahedron_surface()
        assert sf.remove_flat_vertex(s, 0) is None


class TestIsometry:
    def test_identical(self):
        assert sf.surfaces_isometric(sf.cube_surface(), sf.cube_surface())

    def test_subdivided_copy(self):
        assert sf.surfaces_isometric(
            sf.subdivide(sf.cube_surface()), sf.cube_surface()
        )

    def test_relabeled_box(self):
        assert sf.surfaces_isometric(
            sf.box_surface(1.0, 2.0, 3.0), sf.box_surface(3.0, 1.0, 2.0)
        )

    def test_distinguishes_solids(self):
        assert not sf.surfaces_isometric(sf.cube_surface(), sf.octahedron_surface())

    def test_distinguishes_scale(self):
        assert not sf.surfaces_isometric(
            sf.cube_surface(), sf.box_surface(1.0, 1.0, 1.01)
        )

    def test_same_defects_same_area_different_shape(self):
        # eight pi/2 cones and area 22 on both sides; only the cone
        # distance matrix tells them apart
        assert not sf.surfaces_isometric(
            sf.box_surface(1.0, 1.0, 5.0), sf.box_surface(1.0, 2.0, 3.0)
        )

    def test_flat_tori_by_area(self):
        assert sf.surfaces_isometric(
            sf.flat_torus_surface(3), sf.flat_torus_surface(3)
        )


class TestFileIO:
    @pytest.mark.parametrize("name", ["tetrahedron", "cube", "octahedron", "box123", "torus3"])
    def test_round_trip(self, tmp_path, name):
        s = builders()[name]
        path = tmp_path / f"{name}.surf"
        sf.save_surface(s, path)
        back = sf.load_surface(path)
        back.validate()
        np.testing.assert_array_equal(back.triangles, s.triangles)
        assert back.gluings == s.gluings
        # bit-exact lengths
        assert back.lengths.tobytes() == s.lengths.tobytes()

    def test_rejects_garbage(self, tmp_path):
        path = tmp_path / "bad.surf"
        path.write_text("t 0 1\n")
        with pytest.raises(InvalidInput):
            sf.load_surface(path)

    def test_rejects_unglued(self, tmp_path):
        path = tmp_path / "open.surf"
        path.write_text("t 0 1 2\nt 0 2 1\ne 0 0 1 2 1.0\n")
        with pytest.raises(InvalidInput):
            sf.load_surface(path)
