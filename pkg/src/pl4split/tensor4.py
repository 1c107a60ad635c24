"""Linear algebra of antisymmetric 4x4 matrices (2-forms on R^4).

Covers the spectral structure of 2-forms, the self-dual / anti-self-dual
split of orthogonal antisymmetric matrices, oriented eigenplane
extraction, matrix commutants, and the quaternion-style SU(2) block
parametrization used for the unitary holonomy test.

Eigenvalues of an antisymmetric A are +-ai, +-bi with a >= b >= 0; the
pair (a, b) is recovered in closed form from the Frobenius norm and the
Pfaffian, never from a general eigensolver:

    a^2 + b^2 = ||A||_F^2 / 2        a * b = |Pf(A)|
"""

import dataclasses

import numpy as np

from .errors import (
    NoDistinctCombo,
    NotSelfDualPair,
    RepeatedEigenvalues,
)

DEFAULT_TOL = 1e-9

# row, col positions of the 6 independent entries, lexicographic
_UPPER = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


class AntisymForm:
    """Antisymmetric 4x4 matrix stored as its 6 upper entries."""

    __slots__ = ("upper",)

    def __init__(self, upper):
        upper = np.asarray(upper, dtype=np.float64)
        if upper.shape != (6,):
            raise ValueError("expected 6 upper-triangle entries")
        self.upper = upper

    @classmethod
    def from_matrix(cls, mat, tol=DEFAULT_TOL):
        mat = np.asarray(mat, dtype=np.float64)
        if mat.shape != (4, 4):
            raise ValueError("expected a 4x4 matrix")
        scale = max(1.0, np.abs(mat).max())
        if np.abs(mat + mat.T).max() > tol * scale:
            raise ValueError("matrix is not antisymmetric")
        return cls(np.array([mat[i, j] for i, j in _UPPER]))

    @property
    def matrix(self):
        m = np.zeros((4, 4))
        for k, (i, j) in enumerate(_UPPER):
            m[i, j] = self.upper[k]
            m[j, i] = -self.upper[k]
        return m

    def pfaffian(self):
        a01, a02, a03, a12, a13, a23 = self.upper
        return a01 * a23 - a02 * a13 + a03 * a12

    def frobenius(self):
        return np.sqrt(2.0 * float(self.upper @ self.upper))

    def __add__(self, other):
        return AntisymForm(self.upper + other.upper)

    def __sub__(self, other):
        return AntisymForm(self.upper - other.upper)

    def __mul__(self, scalar):
        return AntisymForm(self.upper * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return AntisymForm(-self.upper)

    def __repr__(self):
        return f"AntisymForm({np.array2string(self.upper, precision=6)})"


def _as_form(obj):
    if isinstance(obj, AntisymForm):
        return obj
    return AntisymForm.from_matrix(obj)


def eigen_pairs(form):
    """Spectral moduli (a, b), a >= b >= 0, of an antisymmetric matrix."""
    f = _as_form(form)
    s = float(f.upper @ f.upper)  # = ||A||_F^2 / 2 = a^2 + b^2
    p = abs(f.pfaffian())  # = a * b
    disc = max(s * s - 4.0 * p * p, 0.0)
    root = np.sqrt(disc)
    a2 = 0.5 * (s + root)
    b2 = max(0.5 * (s - root), 0.0)
    return np.sqrt(a2), np.sqrt(b2)


def is_scalar_multiple_of_orthogonal(mat, tol=DEFAULT_TOL):
    """Whether M M^T is a nonnegative multiple of the identity.

    For antisymmetric input this is exactly the repeated-eigenvalue case
    a == b.
    """
    mat = np.asarray(mat, dtype=np.float64)
    gram = mat @ mat.T
    c = np.trace(gram) / 4.0
    return bool(np.abs(gram - c * np.eye(4)).max() <= tol * max(1.0, c))


def selfdual_form(a, b, c):
    """Orthogonal antisymmetric matrix with Pfaffian +1, given a^2+b^2+c^2=1.

    The family is the unit sphere of the self-dual 2-forms; (1, 0, 0)
    gives the standard complex structure J.
    """
    return AntisymForm(np.array([a, b, c, c, -b, a], dtype=np.float64))


def antiselfdual_form(a, b, c):
    """Orthogonal antisymmetric matrix with Pfaffian -1 (anti-self-dual)."""
    return AntisymForm(np.array([a, b, c, -c, b, -a], dtype=np.float64))


def standard_complex_form():
    """J: rotation by pi/2 in the (e1,e2)- and (e3,e4)-planes."""
    return selfdual_form(1.0, 0.0, 0.0)


def conjugate_antiselfdual_form():
    """K: J's anti-self-dual twin, rotating the (e3,e4)-plane backwards."""
    return antiselfdual_form(1.0, 0.0, 0.0)


SELF_DUAL = "self_dual"
ANTI_SELF_DUAL = "anti_self_dual"


@dataclasses.dataclass
class KindClassification:
    kind: str | None  # SELF_DUAL, ANTI_SELF_DUAL or None
    params: tuple[float, float, float] | None
    residual: float

    @property
    def applicable(self):
        return self.kind is not None


def classify_kind(mat, tol=DEFAULT_TOL):
    """Sort an orthogonal antisymmetric matrix into its duality family.

    Reads (a, b, c) from the first row and compares against both
    template completions. Non-orthogonal or non-antisymmetric input is
    reported as not applicable rather than raised.
    """
    mat = np.asarray(mat, dtype=np.float64)
    if np.abs(mat + mat.T).max() > tol:
        return KindClassification(None, None, np.inf)
    if np.abs(mat @ mat.T - np.eye(4)).max() > tol:
        return KindClassification(None, None, np.inf)
    a, b, c = mat[0, 1], mat[0, 2], mat[0, 3]
    res_sd = np.abs(selfdual_form(a, b, c).matrix - mat).max()
    res_asd = np.abs(antiselfdual_form(a, b, c).matrix - mat).max()
    if res_sd <= tol:
        return KindClassification(SELF_DUAL, (a, b, c), float(res_sd))
    if res_asd <= tol:
        return KindClassification(ANTI_SELF_DUAL, (a, b, c), float(res_asd))
    return KindClassification(None, None, float(min(res_sd, res_asd)))


def find_distinct_combination(f1, f2, separation=1e-6, seed=0):
    """Search lam*f1 + mu*f2 for a combination with separated moduli.

    Tries the fixed grid lam=1, mu in {1,-1,1/2,-1/2,2,-2} first, then
    seeded random coefficients, 64 candidates total. Separation is
    relative to the Frobenius norm of the combination.

    Returns (lam, mu, form, (a, b)). Raises NoDistinctCombo when every
    candidate has a repeated pair, which is the signature of two forms
    of the same duality kind.
    """
    f1, f2 = _as_form(f1), _as_form(f2)
    stack = np.vstack([f1.upper, f2.upper])
    svals = np.linalg.svd(stack, compute_uv=False)
    if svals[-1] <= 1e-12 * max(svals[0], 1e-300):
        raise ValueError("forms are linearly dependent")

    candidates = [(1.0, 1.0), (1.0, -1.0), (1.0, 0.5), (1.0, -0.5), (1.0, 2.0), (1.0, -2.0)]
    rng = np.random.default_rng(seed)
    while len(candidates) < 64:
        lam, mu = rng.normal(size=2)
        if abs(lam) < 1e-3 or abs(mu) < 1e-3:
            continue
        candidates.append((float(lam), float(mu)))

    for lam, mu in candidates:
        combo = lam * f1 + mu * f2
        norm = combo.frobenius()
        if norm <= 1e-300:
            continue
        a, b = eigen_pairs(combo)
        if a - b > separation * norm:
            return lam, mu, combo, (a, b)
    raise NoDistinctCombo(
        "no combination with separated eigenvalue moduli among 64 candidates"
    )


@dataclasses.dataclass
class OrientedPlane:
    """2-plane through the origin with an ordered orthonormal basis."""

    u: np.ndarray
    v: np.ndarray

    def projector(self):
        return np.outer(self.u, self.u) + np.outer(self.v, self.v)

    def area_form(self):
        return np.outer(self.u, self.v) - np.outer(self.v, self.u)

    def contains(self, w, tol=DEFAULT_TOL):
        w = np.asarray(w, dtype=np.float64)
        n = np.linalg.norm(w)
        if n == 0:
            return True
        r = w - self.projector() @ w
        return bool(np.linalg.norm(r) <= tol * n)


def eigen_planes(form, separation=1e-6):
    """Oriented invariant planes of an antisymmetric matrix.

    First plane: eigenplane of the larger modulus a, oriented so the
    form restricts to +a times its area form. Second plane: orthogonal
    complement, oriented so the pair is positively oriented in R^4.
    Raises RepeatedEigenvalues when a and b are not separated.
    """
    f = _as_form(form)
    a, b = eigen_pairs(f)
    norm = f.frobenius()
    if a - b <= separation * max(norm, 1e-300):
        raise RepeatedEigenvalues(f"eigenvalue moduli not separated: ({a}, {b})")
    mat = f.matrix
    # -A^2 is symmetric PSD with eigenvalues a^2, a^2, b^2, b^2
    evals, evecs = np.linalg.eigh(mat.T @ mat)
    u, v = evecs[:, 3], evecs[:, 2]
    if u @ mat @ v < 0:
        v = -v
    w, x = evecs[:, 1], evecs[:, 0]
    if np.linalg.det(np.column_stack([u, v, w, x])) < 0:
        x = -x
    return OrientedPlane(u, v), OrientedPlane(w, x)


def commutant_basis(mats, tol=DEFAULT_TOL):
    """Orthonormal basis of {X : XM = MX for every M}, as 4x4 matrices."""
    mats = [np.asarray(m, dtype=np.float64) for m in mats]
    eye = np.eye(4)
    if not mats:
        rows = np.zeros((1, 16))
    else:
        rows = np.vstack([np.kron(m.T, eye) - np.kron(eye, m) for m in mats])
    _, svals, vt = np.linalg.svd(rows)
    smax = svals[0] if len(svals) else 0.0
    cutoff = max(tol * max(smax, 1.0), 1e-12)
    rank = int(np.sum(svals > cutoff))
    basis = [vt[k].reshape(4, 4) for k in range(rank, 16)]
    return [_fix_sign_matrix(b) for b in basis]


def _fix_sign_matrix(mat):
    flat = mat.reshape(-1)
    k = int(np.argmax(np.abs(flat)))
    return -mat if flat[k] < 0 else mat


def invariant_antisymmetric_forms(mats, tol=DEFAULT_TOL):
    """Basis of antisymmetric X with g X g^T = X for every g.

    For orthogonal g this is the antisymmetric slice of the commutant.
    Basis elements are Frobenius-orthonormal; signs are fixed by making
    each element's largest-magnitude entry positive.
    """
    mats = [np.asarray(m, dtype=np.float64) for m in mats]
    basis6 = [AntisymForm(row).matrix for row in np.eye(6)]
    if not mats:
        rows = np.zeros((1, 6))
    else:
        blocks = []
        for g in mats:
            cols = []
            for e in basis6:
                img = g @ e @ g.T - e
                cols.append([img[i, j] for i, j in _UPPER])
            blocks.append(np.array(cols).T)
        rows = np.vstack(blocks)
    _, svals, vt = np.linalg.svd(rows)
    smax = svals[0] if len(svals) else 0.0
    cutoff = max(tol * max(smax, 1.0), 1e-12)
    rank = int(np.sum(svals > cutoff))
    out = []
    for k in range(rank, 6):
        vec = vt[k] / np.sqrt(2.0)  # matrix Frobenius norm 1
        idx = int(np.argmax(np.abs(vec)))
        if vec[idx] < 0:
            vec = -vec
        out.append(AntisymForm(vec))
    return out


def third_form_witness(f1, f2, tol=1e-7):
    """Complete two independent self-dual forms to the orthogonal third.

    Inputs may carry arbitrary positive scale; they are rescaled to
    orthogonal matrices before classification. Raises NotSelfDualPair
    unless both classify self-dual. The result commutes with everything
    that commutes with both inputs.
    """
    vecs = []
    for f in (f1, f2):
        f = _as_form(f)
        norm = f.frobenius()
        if norm <= 1e-300:
            raise NotSelfDualPair("zero form")
        mat = f.matrix * (2.0 / norm)
        cls = classify_kind(mat, tol=tol)
        if cls.kind != SELF_DUAL:
            raise NotSelfDualPair(f"form classifies as {cls.kind}")
        vecs.append(np.array(cls.params))
    cross = np.cross(vecs[0], vecs[1])
    n = np.linalg.norm(cross)
    if n <= tol:
        raise ValueError("forms are parallel; no third direction")
    cross /= n
    return selfdual_form(*cross)


@dataclasses.dataclass
class SU2Form:
    """Unit quaternion acting on R^4 = C^2 by complex 2x2 blocks.

    The associated real matrix is orthogonal and commutes with every
    self-dual form; these matrices exhaust that commutant inside O(4).
    """

    z1: complex
    z2: complex

    def __post_init__(self):
        n = abs(self.z1) ** 2 + abs(self.z2) ** 2
        if abs(n - 1.0) > 1e-9:
            raise ValueError("need |z1|^2 + |z2|^2 == 1")

    @property
    def matrix(self):
        return complex_block_matrix(
            [[self.z1, self.z2], [-np.conj(self.z2), np.conj(self.z1)]]
        )


def complex_block_matrix(zmat):
    """Real 4x4 form of a complex 2x2 matrix, blocks [[x, -y], [y, x]]."""
    out = np.zeros((4, 4))
    for i in range(2):
        for j in range(2):
            z = complex(zmat[i][j])
            out[2 * i, 2 * j] = z.real
            out[2 * i, 2 * j + 1] = -z.imag
            out[2 * i + 1, 2 * j] = z.imag
            out[2 * i + 1, 2 * j + 1] = z.real
    return out


def random_rotation(rng):
    """Haar-ish random element of SO(4) via QR with sign fixing."""
    q, r = np.linalg.qr(rng.normal(size=(4, 4)))
    q = q @ np.diag(np.sign(np.diag(r)))
    if np.linalg.det(q) < 0:
        q[:, [0, 1]] = q[:, [1, 0]]
    return q


def random_su2(rng):
    z = rng.normal(size=4)
    z /= np.linalg.norm(z)
    return SU2Form(complex(z[0], z[1]), complex(z[2], z[3]))


def random_u2_not_su2(rng, min_phase=0.3):
    """Orthogonal matrix commuting with J whose complex determinant is not 1."""
    theta = rng.uniform(min_phase, 2 * np.pi - min_phase)
    base = random_su2(rng)
    u = np.array(
        [[base.z1, base.z2], [-np.conj(base.z2), np.conj(base.z1)]], dtype=complex
    )
    phase = np.array([[np.exp(1j * theta), 0.0], [0.0, 1.0]], dtype=complex)
    return complex_block_matrix(u @ phase)


def random_selfdual(rng, max_axis=None):
    """Random unit self-dual form; optionally bound |a| away from 1."""
    while True:
        v = rng.normal(size=3)
        n = np.linalg.norm(v)
        if n < 1e-6:
            continue
        v /= n
        if max_axis is not None and abs(v[0]) > max_axis:
            continue
        return selfdual_form(*v)


def random_antiselfdual(rng):
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    return antiselfdual_form(*v)
