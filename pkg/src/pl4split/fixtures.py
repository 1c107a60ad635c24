"""Hand-built complexes exercising the failure paths.

These are negative controls: inputs that are perfectly well-formed
complexes but violate one of the structural hypotheses the decomposition
relies on, each in exactly one way.
"""

import numpy as np

from .complex4 import MetricComplex4, facet_locals, product_complex
from .surface import flat_torus_surface, subdivide, tetrahedron_surface


def fan_double():
    """Closed complex with a cone angle far above 2 pi.

    Five unit regular 4-simplices share the triangle {0, 1, 2} in a
    cyclic fan (total dihedral angle 5 acos(1/4), already past 2 pi);
    doubling the fan across its boundary tetrahedra closes it up and
    doubles the core angle to 10 acos(1/4).
    """
    apex = [3 + i for i in range(5)]
    simplices = []
    for s in range(5):
        simplices.append([0, 1, 2, apex[s], apex[(s + 1) % 5]])
    simplices = simplices + simplices  # mirror copy
    lengths = [[1.0] * 10] * 10
    gluings = {}
    for copy in (0, 5):
        for s in range(5):
            a, b = copy + s, copy + (s + 1) % 5
            # shared wall {0, 1, 2, apex[s + 1]}: facet 3 of a, facet 4 of b
            gluings[(a, 3)] = (b, 4, (0, 1, 2, 3))
            gluings[(b, 4)] = (a, 3, (0, 1, 2, 4))
    for s in range(5):
        for f in range(3):
            perm = facet_locals(f)
            gluings[(s, f)] = (s + 5, f, perm)
            gluings[(s + 5, f)] = (s, f, perm)
    return MetricComplex4(simplices, lengths, gluings)


def branched_double_cover():
    """Double cover of a product, branched over a diagonal torus.

    Base: the product of two once-subdivided tetrahedron surfaces. The
    branch surface is (boundary of M) x (boundary of M') where M, M'
    are the central triangles of one subdivided face on each factor;
    those boundaries are closed midpoint loops, so the branch surface is
    a torus whose tangent planes mix the two factor directions.

    Marking the nine facet gluings interior to M x (boundary loop) and
    swapping sheets exactly across marked facets yields monodromy 1
    around the torus triangles and 0 elsewhere: the covering complex is
    flat except for the inherited factor strata (cone angle pi) and the
    branch torus, whose cone angle doubles to 4 pi. Every census check
    stays clean; only stratum alignment can reject it.
    """
    P = subdivide(tetrahedron_surface())
    base = product_complex(P, P)
    prov = base.product_provenance
    mid = 3  # central triangle of the first subdivided face
    partners = {P.gluings[(mid, k)][0] for k in range(3)}

    marked = set()
    for (s, f), (s2, f2, perm) in base.gluings.items():
        if (s, f) > (s2, f2):
            continue
        if prov[s, 0] != mid or prov[s2, 0] != mid:
            continue
        qa, qb = int(prov[s, 1]), int(prov[s2, 1])
        if (qa == mid and qb in partners) or (qb == mid and qa in partners):
            marked.add((s, f))
    if len(marked) != 9:
        raise AssertionError(f"expected 9 branch facets, found {len(marked)}")

    m = base.num_simplices
    gluings = {}
    for (s, f), (s2, f2, perm) in base.gluings.items():
        swap = 1 if ((s, f) in marked or (s2, f2) in marked) else 0
        for sheet in (0, 1):
            gluings[(s + sheet * m, f)] = (s2 + (sheet ^ swap) * m, f2, perm)
    simplices = np.vstack([base.simplices, base.simplices])
    lengths = np.vstack([base.edge_lengths, base.edge_lengths])
    return MetricComplex4(simplices, lengths, gluings)


def flat_torus4(n=3):
    """Flat 4-torus: product of two flat square tori, no singular set."""
    T = flat_torus_surface(n)
    return product_complex(T, T)
