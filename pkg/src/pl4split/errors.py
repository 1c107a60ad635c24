"""Exception hierarchy shared across the package.

The CLI maps InvalidInput to exit code 3 and HypothesisViolation to
exit code 2; everything else is a bug.
"""


class Pl4Error(Exception):
    pass


class InvalidInput(Pl4Error):
    """Malformed file, inconsistent metric data, failed validation."""


class HypothesisViolation(Pl4Error):
    """Input is well formed but violates the structural hypotheses."""


class NoDistinctCombo(Pl4Error):
    """No sampled combination of two forms had distinct eigenvalue pairs."""


class RepeatedEigenvalues(Pl4Error):
    """Eigenplane extraction needs a strictly separated eigenvalue pair."""


class NotSelfDualPair(Pl4Error):
    """Third-form completion needs two self-dual unit forms."""


class ContradictionWitness(HypothesisViolation):
    """Both invariant forms of one duality kind: impossible for genuine input.

    Carries the completed third form; every holonomy generator commutes
    with it, which certifies the contradiction.
    """

    def __init__(self, message, third_form=None, kind=None):
        super().__init__(message)
        self.third_form = third_form
        self.kind = kind


class WrongDimension(HypothesisViolation):
    def __init__(self, message, dimension=None):
        super().__init__(message)
        self.dimension = dimension


class NonClosingLeaf(HypothesisViolation):
    """Leaf tracing exhausted its budget or left unmatched polygon edges."""


class NotProductLike(HypothesisViolation):
    """A codimension-4 vertex without the two-cone-family structure."""


class Misaligned(HypothesisViolation):
    """A singular stratum tangent to neither invariant plane field."""


class DegenerateSlice(Pl4Error):
    """Slicing plane grazes a low-dimensional face; reseed the trace."""


class SeedSingular(Pl4Error):
    """Leaf tracing must start away from the singular strata."""


def exit_code_for(exc):
    if isinstance(exc, HypothesisViolation):
        return 2
    if isinstance(exc, (InvalidInput, FileNotFoundError, OSError)):
        return 3
    return 1
