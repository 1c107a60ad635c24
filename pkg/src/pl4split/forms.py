"""Holonomy-invariant 2-forms and the parallel plane distributions.

On a flat complex, a parallel 2-form is determined by its value at one
base chart together with invariance under every holonomy generator, so
the space of parallel forms is the null space of a small linear system
over the 6-dimensional space of antisymmetric matrices. When that space
is 2-dimensional, a generic combination of the two basis forms has
separated eigenvalue moduli and its eigenplanes cut every tangent space
into two orthogonal oriented 2-planes; transporting the pair along the
dual spanning tree yields the two plane distributions.

The degenerate case, where no combination separates, happens exactly
when both forms have the same duality kind. That forces a third
independent invariant form to exist, contradicting the 2-dimensional
count; the third form is returned as a checkable certificate.
"""

import dataclasses

import numpy as np

from .errors import (
    ContradictionWitness,
    HypothesisViolation,
    InvalidInput,
    NoDistinctCombo,
    NotSelfDualPair,
    WrongDimension,
)
from .holonomy import TreeDeveloper
from .tensor4 import (
    ANTI_SELF_DUAL,
    SELF_DUAL,
    AntisymForm,
    OrientedPlane,
    eigen_planes,
    find_distinct_combination,
    invariant_antisymmetric_forms,
    third_form_witness,
)

_MIRROR = np.diag([-1.0, 1.0, 1.0, 1.0])


@dataclasses.dataclass
class InvariantFormBasis:
    """Frobenius-orthonormal basis of generator-invariant 2-forms."""

    basis: list

    @property
    def dim(self):
        return len(self.basis)


def invariant_forms(generators, tol=1e-9):
    """Solve {omega antisymmetric : g omega g^T = omega for all g}."""
    return InvariantFormBasis(invariant_antisymmetric_forms(generators, tol=tol))


def betti_check(form_basis, expected=2):
    """True when the invariant-form dimension matches the expectation."""
    return form_basis.dim == expected


def connectivity_caveat(generators, form_basis, expected=2):
    """Heuristic flag: invariant forms may overcount parallel forms.

    Stratum loops only exhaust the holonomy when the flat part is simply
    connected; with no singular strata at all, or with more invariant
    forms than expected, the dimension is merely an upper bound.
    """
    return len(generators) == 0 or form_basis.dim > expected


@dataclasses.dataclass
class DistributionPair:
    """Two orthogonal oriented plane fields, one pair per simplex.

    alpha carries the eigenplane of the larger modulus of the chosen
    combination, beta its orthogonal complement; both are transported
    from the base chart along the dual spanning tree.
    """

    alpha: list
    beta: list
    lam: float
    mu: float
    combination: AntisymForm
    eigen_moduli: tuple
    transport_deviation: float

    def alpha_projector(self, s):
        return self.alpha[s].projector()

    def beta_projector(self, s):
        return self.beta[s].projector()


def _mirror_form(form):
    return AntisymForm.from_matrix(_MIRROR @ form.matrix @ _MIRROR)


def _contradiction(f1, f2, generators, tol):
    """Build the third invariant form certifying the degenerate case."""
    try:
        witness = third_form_witness(f1, f2)
        kind = SELF_DUAL
    except NotSelfDualPair:
        witness_mirrored = third_form_witness(_mirror_form(f1), _mirror_form(f2))
        witness = _mirror_form(witness_mirrored)
        kind = ANTI_SELF_DUAL
    worst = 0.0
    for g in generators:
        worst = max(worst, float(np.abs(g @ witness.matrix - witness.matrix @ g).max()))
    if worst > tol:
        raise HypothesisViolation(
            f"degenerate form pair, but the completed third form is not "
            f"invariant (residual {worst:.2e}); holonomy data is inconsistent"
        )
    raise ContradictionWitness(
        f"both invariant forms are {kind}: a third invariant form exists "
        f"(commutation residual {worst:.2e}), so the 2-dimensional form "
        f"space hypothesis fails",
        third_form=witness,
        kind=kind,
    )


def extract_distributions(form_basis, generators, cx=None, developer=None,
                          config=None):
    """Turn a 2-dimensional invariant form basis into two plane fields.

    Needs the complex for transport; the degenerate branches fire before
    transport, so cx may be omitted when only they are exercised.
    Raises WrongDimension unless dim = 2 and ContradictionWitness when
    both basis forms share one duality kind.
    """
    from .config import Config

    cfg = config or Config()
    if form_basis.dim != 2:
        raise WrongDimension(
            f"invariant form space has dimension {form_basis.dim}, expected 2",
            dimension=form_basis.dim,
        )
    f1, f2 = form_basis.basis
    try:
        lam, mu, combo, moduli = find_distinct_combination(
            f1, f2, separation=cfg.eigen_separation, seed=cfg.seed
        )
    except NoDistinctCombo:
        _contradiction(f1, f2, generators, cfg.tol_orthogonal)
    plane_a, plane_b = eigen_planes(combo, separation=cfg.eigen_separation)
    if cx is None:
        raise InvalidInput("plane transport needs the complex")
    dev = developer or TreeDeveloper(cx)

    alpha, beta = [], []
    for s in range(cx.num_simplices):
        rot, _ = dev.to_base(s)
        alpha.append(OrientedPlane(rot.T @ plane_a.u, rot.T @ plane_a.v))
        beta.append(OrientedPlane(rot.T @ plane_b.u, rot.T @ plane_b.v))

    worst = 0.0
    for (s, f), (s2, f2, perm) in cx.gluings.items():
        if (s, f) > (s2, f2):
            continue
        rot, _ = cx.facet_transition(s, f)
        for field in (alpha, beta):
            moved = rot @ field[s2].projector() @ rot.T
            worst = max(worst, float(np.abs(moved - field[s].projector()).max()))
    if worst > cfg.tol_orthogonal * 1e3:
        raise HypothesisViolation(
            f"plane fields are not parallel: transport disagrees across a "
            f"gluing by {worst:.2e}"
        )
    return DistributionPair(
        alpha=alpha,
        beta=beta,
        lam=lam,
        mu=mu,
        combination=combo,
        eigen_moduli=moduli,
        transport_deviation=worst,
    )
