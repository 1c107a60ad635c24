"""Developing maps, stratum loops, and the unitary holonomy check."""

import math

import numpy as np
import pytest

from pl4split.complex4 import TRIPLE_INDEX, product_complex, singular_census
from pl4split.fixtures import fan_double, flat_torus4
from pl4split.holonomy import (
    TreeDeveloper,
    compose,
    develop_chain,
    fan_walk,
    holonomy_generators,
    invert,
    is_unitary_holonomy,
    rotation_angle,
)
from pl4split.surface import cube_surface, tetrahedron_surface


def plane_rotation(i, j, theta):
    g = np.eye(4)
    c, s = math.cos(theta), math.sin(theta)
    g[i, i] = g[j, j] = c
    g[i, j], g[j, i] = -s, s
    return g


def first_singular_slot(cx, census):
    s, triple = census.strata[0].ambient_slots[0]
    return s, TRIPLE_INDEX[tuple(sorted(triple))]


class TestFanWalk:
    def test_loop_closes_and_fixes_triangle(self):
        cx = product_complex(tetrahedron_surface(), tetrahedron_surface())
        census = singular_census(cx)
        s0, k0 = first_singular_slot(cx, census)
        crossings = fan_walk(cx, s0, k0)
        assert crossings[0][0] == s0
        rot, shift = develop_chain(cx, crossings)
        # the loop holonomy fixes the triangle pointwise
        from pl4split.complex4 import TRIPLES4

        charts = cx.charts()
        for v in TRIPLES4[k0]:
            moved = rot @ charts[s0, v] + shift
            assert np.allclose(moved, charts[s0, v], atol=1e-10)
        assert np.allclose(rot @ rot.T, np.eye(4), atol=1e-12)
        assert np.linalg.det(rot) == pytest.approx(1.0, abs=1e-9)

    def test_loop_angle_matches_cone_angle(self):
        cx = product_complex(tetrahedron_surface(), tetrahedron_surface())
        census = singular_census(cx)
        s0, k0 = first_singular_slot(cx, census)
        rot, _ = develop_chain(cx, fan_walk(cx, s0, k0))
        assert rotation_angle(rot) == pytest.approx(math.pi, abs=1e-9)

    def test_flat_triangle_loop_is_identity(self):
        cx = product_complex(tetrahedron_surface(), tetrahedron_surface())
        angles = cx.cone_angles()
        tri_ids, _ = cx.triangle_orbits()
        flat_slot = None
        for s in range(cx.num_simplices):
            for k in range(10):
                if abs(angles[tri_ids[s, k]] - 2 * math.pi) < 1e-9:
                    flat_slot = (s, k)
                    break
            if flat_slot:
                break
        rot, shift = develop_chain(cx, fan_walk(cx, *flat_slot))
        assert np.allclose(rot, np.eye(4), atol=1e-10)
        assert np.allclose(shift, 0.0, atol=1e-9)


class TestMotions:
    def test_compose_invert(self):
        rng = np.random.default_rng(3)
        q, _ = np.linalg.qr(rng.normal(size=(4, 4)))
        motion = (q, rng.normal(size=4))
        rot, shift = compose(motion, invert(motion))
        assert np.allclose(rot, np.eye(4), atol=1e-12)
        assert np.allclose(shift, 0.0, atol=1e-12)


class TestGenerators:
    def test_product_generator_angles(self):
        for surface, want in [
            (tetrahedron_surface(), math.pi),
            (cube_surface(), math.pi / 2),  # 3 pi / 2 mod 2 pi
        ]:
            cx = product_complex(surface, surface)
            census = singular_census(cx)
            gens, _ = holonomy_generators(cx, census)
            assert len(gens) == len(census.strata)
            for g in gens:
                assert np.allclose(g @ g.T, np.eye(4), atol=1e-10)
                assert np.linalg.det(g) == pytest.approx(1.0, abs=1e-9)
                assert rotation_angle(g) == pytest.approx(want, abs=1e-9)

    def test_fan_double_generator_angle(self):
        cx = fan_double()
        census = singular_census(cx, tol_angle=1e-7)
        # census is flagged (not clean strata), so walk the core directly
        angles = cx.cone_angles()
        tri_ids, _ = cx.triangle_orbits()
        core = None
        for s in range(cx.num_simplices):
            for k in range(10):
                if abs(angles[tri_ids[s, k]] - 5 * math.acos(0.25)) < 1e-9:
                    core = (s, k)
                    break
            if core:
                break
        assert core is not None
        rot, _ = develop_chain(cx, fan_walk(cx, *core))
        want = abs(5 * math.acos(0.25) - 2 * math.pi)
        assert rotation_angle(rot) == pytest.approx(want, abs=1e-9)

    def test_torus_has_trivial_rotational_holonomy(self):
        cx = flat_torus4(3)
        dev = TreeDeveloper(cx)
        worst = 0.0
        for (s, f), (s2, f2, perm) in cx.gluings.items():
            if (s, f) > (s2, f2):
                continue
            trans = cx.facet_transition(s, f)
            lhs = compose(dev.to_base(s), trans)
            rhs = dev.to_base(s2)
            worst = max(worst, float(np.abs(lhs[0] - rhs[0]).max()))
        assert worst < 1e-9  # translations only: linear parts all match


class TestUnitary:
    def test_products_are_unitary(self):
        for surface in (tetrahedron_surface(), cube_surface()):
            cx = product_complex(surface, surface)
            census = singular_census(cx)
            gens, _ = holonomy_generators(cx, census)
            assert is_unitary_holonomy(gens)

    def test_empty_is_unitary(self):
        assert is_unitary_holonomy([])

    def test_single_plane_rotation_is_unitary(self):
        assert is_unitary_holonomy([plane_rotation(0, 1, 1.0)])

    def test_skew_pair_is_not_unitary(self):
        g1 = plane_rotation(0, 1, math.pi / 2)
        g2 = plane_rotation(1, 2, math.pi / 2)
        assert not is_unitary_holonomy([g1, g2])
