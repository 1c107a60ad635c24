"""Developing maps and holonomy of loops around singular strata.

Away from its singular triangles a complex is flat, so a chain of
adjacent simplices develops isometrically into the chart of the first
one. The holonomy of a loop is the rigid motion comparing the start
chart with its developed image after going around; for the small loop
circling a singular triangle this motion fixes the triangle's plane and
rotates the transverse plane by the cone angle.

All generators are conjugated into the chart of simplex 0 along the
breadth-first spanning tree of the dual graph, so they live in one
common frame and their matrix products are meaningful.
"""

import numpy as np

from .complex4 import PAIRS4, TRIPLE_INDEX, TRIPLES4, facet_locals
from .errors import InvalidInput
from .tensor4 import selfdual_form


def fan_walk(cx, s0, k0):
    """Facet crossings circling triangle slot k0 of simplex s0.

    Returns a list of (simplex, facet) crossings whose gluings traverse
    the full fan and return to the starting slot.
    """
    i0, j0 = PAIRS4[k0]
    crossings = []
    s, triple, leave = s0, TRIPLES4[k0], j0
    for _ in range(40 * cx.num_simplices):
        crossings.append((s, leave))
        s2, f2, perm = cx.gluings[(s, leave)]
        fl = facet_locals(leave)
        pos = {fl[n]: n for n in range(4)}
        triple2 = tuple(sorted(perm[pos[v]] for v in triple))
        pair2 = PAIRS4[TRIPLE_INDEX[triple2]]
        leave2 = pair2[0] if pair2[1] == f2 else pair2[1]
        if leave2 == f2:
            raise InvalidInput("fan walk re-entered through its exit facet")
        s, triple, leave = s2, triple2, leave2
        if (s, triple) == (s0, TRIPLES4[k0]):
            return crossings
    raise InvalidInput("fan walk did not close")


def compose(motion_a, motion_b):
    """Composite rigid motion a(b(x)) from (rot, shift) pairs."""
    ra, va = motion_a
    rb, vb = motion_b
    return ra @ rb, ra @ vb + va


def invert(motion):
    rot, shift = motion
    return rot.T, -rot.T @ shift


def develop_chain(cx, crossings):
    """Rigid motion mapping the final chart into the first one.

    crossings is a list of (simplex, facet) pairs; each step maps the
    glued neighbor's chart into the current frame.
    """
    rot, shift = np.eye(4), np.zeros(4)
    for s, f in crossings:
        rot, shift = compose((rot, shift), cx.facet_transition(s, f))
    return rot, shift


class TreeDeveloper:
    """Developing maps of all simplices along the dual spanning tree."""

    def __init__(self, cx):
        self.complex = cx
        order, parent = cx.dual_graph_tree()
        self.order = order
        self._dev = {0: (np.eye(4), np.zeros(4))}
        for s in order[1:]:
            prev, f = parent[s]
            self._dev[s] = compose(self._dev[prev], cx.facet_transition(prev, f))

    def to_base(self, s):
        """Motion taking chart coordinates of simplex s to base coordinates."""
        return self._dev[s]

    def holonomy_around(self, s0, k0):
        """Affine holonomy of the loop circling triangle slot (s0, k0),
        conjugated into the base chart."""
        loop = develop_chain(self.complex, fan_walk(self.complex, s0, k0))
        g = self._dev[s0]
        return compose(g, compose(loop, invert(g)))


def rotation_angle(rot):
    """Rotation angle of a motion fixing a 2-plane: from the trace."""
    c = 0.5 * (np.trace(rot) - 2.0)
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


def holonomy_generators(cx, census):
    """One holonomy generator per singular stratum, in the base chart.

    Returns (generators, developer): generators is a list of 4x4
    rotation matrices, ordered like census.strata.
    """
    dev = TreeDeveloper(cx)
    generators = []
    for stratum in census.strata:
        s, triple = stratum.ambient_slots[0]
        k = TRIPLE_INDEX[tuple(sorted(triple))]
        rot, _ = dev.holonomy_around(s, k)
        generators.append(rot)
    return generators, dev


def is_unitary_holonomy(generators, tol=1e-9):
    """True when some self-dual form is invariant under every generator.

    A nonzero invariant self-dual form squares to a negative multiple of
    the identity, so after scaling it is an orthogonal complex structure
    and the generators lie in the corresponding unitary group. With no
    generators at all the answer is trivially true.
    """
    if not generators:
        return True
    basis = [selfdual_form(1, 0, 0), selfdual_form(0, 1, 0), selfdual_form(0, 0, 1)]
    rows = []
    for g in generators:
        cols = []
        for form in basis:
            moved = g @ form.matrix @ g.T - form.matrix
            cols.append(moved[np.triu_indices(4, k=1)])
        rows.append(np.column_stack(cols))
    system = np.vstack(rows)
    sing = np.linalg.svd(system, compute_uv=False)
    return bool(sing[-1] <= tol * max(1.0, sing[0]))
