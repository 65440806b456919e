"""Isometries of the complex hyperbolic plane: elements of SU(2,1).

A matrix A represents a holomorphic isometry when A* J A = J for the declared
Hermitian form J and det A = 1 (the constructor rescales by a cube root of the
determinant, so elements are considered projectively, up to cube roots of
unity).  Classification is by eigenvalue moduli: a loxodromic element has
moduli {r, 1, 1/r} with r > 1 and translates along the unique geodesic joining
its two null fixed points.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import (
    BadParameter,
    FormMismatch,
    InternalError,
    NotBoundary,
    NotUnitaryForForm,
    NumericalFailure,
    UnsupportedConversion,
    WrongClass,
)
from .forms import FormKind, HermitianForm, SignClass, ball_form, siegel_form
from .hyperbolic import BallPoint, BoundaryPoint, Geodesic, distance

FORM_PRESERVATION_TOL = 1e-10
LOXODROMIC_MODULUS_TOL = 1e-8
DIAGONALIZABLE_COND_LIMIT = 1e8
EIGEN_RESIDUAL_TOL = 1e-8
# Null-lift accuracy for fixed points of defective (parabolic) matrices scales
# like eps^(1/3), so their boundary snap tolerance is much looser.
PARABOLIC_SNAP_TOL = 1e-4


class IsometryType(enum.Enum):
    LOXODROMIC = "loxodromic"
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"


class SpecialUnitaryElement:
    """A 3x3 complex matrix preserving a Hermitian form, det normalized to 1."""

    __slots__ = ("matrix", "form", "det")

    def __init__(self, matrix, form: HermitianForm):
        built = verify_membership(matrix, form)
        self.matrix = built.matrix
        self.form = built.form
        self.det = built.det

    @classmethod
    def _trusted(cls, matrix: np.ndarray, form: HermitianForm) -> "SpecialUnitaryElement":
        g = object.__new__(cls)
        matrix = np.ascontiguousarray(matrix, dtype=complex)
        matrix.setflags(write=False)
        g.matrix = matrix
        g.form = form
        g.det = complex(np.linalg.det(matrix))
        return g

    def form_defect(self) -> float:
        j = self.form.matrix
        return float(np.max(np.abs(self.matrix.conj().T @ j @ self.matrix - j)))

    def apply(self, p: BallPoint) -> BallPoint:
        return apply(self, p)

    def inverse(self) -> "SpecialUnitaryElement":
        j = self.form.matrix
        inv = np.linalg.solve(j, self.matrix.conj().T @ j)
        return SpecialUnitaryElement._trusted(inv, self.form)

    def __matmul__(self, other: "SpecialUnitaryElement") -> "SpecialUnitaryElement":
        if not self.form.same_as(other.form):
            raise FormMismatch("cannot compose elements preserving different forms")
        return SpecialUnitaryElement._trusted(self.matrix @ other.matrix, self.form)

    def power(self, n: int) -> "SpecialUnitaryElement":
        if n == 0:
            return SpecialUnitaryElement._trusted(np.eye(3, dtype=complex), self.form)
        base = self if n > 0 else self.inverse()
        out = base
        for _ in range(abs(n) - 1):
            out = out @ base
        return out

    def __repr__(self):
        return f"SpecialUnitaryElement(form={self.form.kind.value}, det={self.det:.3g})"


def verify_membership(matrix, form: HermitianForm) -> SpecialUnitaryElement:
    """Validate A* J A = J and rescale by a cube root of det to det 1."""
    a = np.asarray(matrix, dtype=complex)
    if a.shape != (3, 3):
        raise NotUnitaryForForm(f"matrix must be 3x3, got {a.shape}")
    d = complex(np.linalg.det(a))
    if abs(d) < 1e-14:
        raise NotUnitaryForForm("matrix is singular")
    j = form.matrix
    defect = float(np.max(np.abs(a.conj().T @ j @ a - j)))
    if defect >= FORM_PRESERVATION_TOL:
        raise NotUnitaryForForm(
            f"max |A*JA - J| = {defect:.3e} >= {FORM_PRESERVATION_TOL}"
        )
    if abs(d - 1.0) > 1e-14:
        a = a * d ** (-1.0 / 3.0)
    return SpecialUnitaryElement._trusted(a, form)


def apply(g: SpecialUnitaryElement, p: BallPoint) -> BallPoint:
    """Projective action on the lift, dehomogenized back to ball coordinates."""
    if g.form.kind is not FormKind.BALL:
        raise FormMismatch(
            "apply expects a ball-form element; convert with change_form first"
        )
    try:
        return BallPoint.from_lift(g.matrix @ p.nlift)
    except Exception as exc:  # image of an interior point must be interior
        raise InternalError(f"isometry image left the ball: {exc}") from exc


@dataclass(frozen=True)
class IsometryClass:
    """Classification label plus the spectral evidence that produced it."""

    label: IsometryType
    eigenvalue_moduli: tuple[float, ...]
    eigenvalue_args: tuple[float, ...]
    sign_classes: tuple[SignClass, ...]
    eigenvector_condition: float


def _eigensystem(g: SpecialUnitaryElement):
    try:
        vals, vecs = np.linalg.eig(g.matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigensolver failed: {exc}") from exc
    order = np.argsort(-np.abs(vals))
    return vals[order], vecs[:, order]


def classify(g: SpecialUnitaryElement) -> IsometryClass:
    """Three-way dynamical type from eigenvalue moduli and fixed-point signs.

    Eigenvalues of a matrix within eps of a Jordan block scatter by about
    eps^(1/3) (~1e-5), so a modulus excess inside that noise band combined
    with a catastrophically ill-conditioned eigenbasis is read as parabolic,
    not loxodromic; exact triangular parabolics classify cleanly either way.
    """
    vals, vecs = _eigensystem(g)
    moduli = tuple(float(m) for m in np.abs(vals))
    args = tuple(float(a) for a in np.angle(vals))
    signs = tuple(
        _sign_class_of(vecs[:, i], g.form) for i in range(3)
    )
    cond = float(np.linalg.cond(vecs))

    modulus_noise_band = moduli[0] < 1.0 + 1e-5 and cond > DIAGONALIZABLE_COND_LIMIT
    if moduli[0] > 1.0 + LOXODROMIC_MODULUS_TOL and not modulus_noise_band:
        label = IsometryType.LOXODROMIC
    elif cond > DIAGONALIZABLE_COND_LIMIT:
        label = IsometryType.PARABOLIC
    elif _has_negative_eigenvector(vals, vecs, g.form):
        label = IsometryType.ELLIPTIC
    else:
        label = IsometryType.PARABOLIC
    return IsometryClass(label, moduli, args, signs, cond)


def _sign_class_of(v: np.ndarray, form: HermitianForm) -> SignClass:
    v = v / np.max(np.abs(v))
    s = form.pairing(v, v).real
    if s < -1e-9:
        return SignClass.NEGATIVE
    if s > 1e-9:
        return SignClass.POSITIVE
    return SignClass.NULL


def _has_negative_eigenvector(vals, vecs, form: HermitianForm) -> bool:
    """Whether some eigenspace contains a negative vector.

    Eigenvalues are grouped by closeness and the form is restricted to each
    group; a negative eigenvalue of the restricted Gram matrix certifies an
    interior fixed point even when the individual basis vectors returned by
    the eigensolver are null or positive.
    """
    used = [False] * 3
    j = form.matrix
    for i in range(3):
        if used[i]:
            continue
        group = [i]
        used[i] = True
        for l in range(i + 1, 3):
            if not used[l] and abs(vals[i] - vals[l]) < 1e-6:
                group.append(l)
                used[l] = True
        basis = vecs[:, group]
        gram = basis.conj().T @ j @ basis
        gram = 0.5 * (gram + gram.conj().T)
        if np.min(np.linalg.eigvalsh(gram)) < -1e-9:
            return True
    return False


def _boundary_from_null_lift(v: np.ndarray, snap_tol: float) -> BoundaryPoint:
    z1 = complex(v[0] / v[2])
    z2 = complex(v[1] / v[2])
    nsq = abs(z1) ** 2 + abs(z2) ** 2
    if abs(nsq - 1.0) > snap_tol:
        raise NotBoundary(f"null eigenvector norm defect {abs(nsq - 1.0):.3e}")
    n = math.sqrt(nsq)
    return BoundaryPoint(z1 / n, z2 / n)


def _ball_vector(v: np.ndarray, form: HermitianForm) -> np.ndarray:
    """Map a lift from the element's form coordinates to ball coordinates.

    Eigenvectors are computed on the original matrix (exact structure, no
    conversion perturbation) and only the vectors pass through the congruence.
    """
    if form.kind is FormKind.BALL:
        return v
    if form.kind is FormKind.SIEGEL:
        return _CAYLEY @ v
    raise UnsupportedConversion("fixed points need a ball or Siegel form")


def fixed_boundary_points(g: SpecialUnitaryElement) -> list[BoundaryPoint]:
    """Null fixed points on the sphere; [attracting, repelling] for loxodromic."""
    cls = classify(g)
    vals, vecs = _eigensystem(g)
    if cls.label is IsometryType.LOXODROMIC:
        return [
            _boundary_from_null_lift(_ball_vector(vecs[:, 0], g.form), 1e-6),
            _boundary_from_null_lift(_ball_vector(vecs[:, 2], g.form), 1e-6),
        ]
    if cls.label is IsometryType.PARABOLIC:
        pts: list[BoundaryPoint] = []
        for i in range(3):
            v = _ball_vector(vecs[:, i], g.form)
            if _sign_class_of(v, ball_form()) is not SignClass.NULL:
                continue
            try:
                bp = _boundary_from_null_lift(v, PARABOLIC_SNAP_TOL)
            except NotBoundary:
                continue
            if all(
                abs(bp.z1 - q.z1) + abs(bp.z2 - q.z2) > 1e-4 for q in pts
            ):
                pts.append(bp)
        if len(pts) != 1:
            raise NumericalFailure(
                f"parabolic element produced {len(pts)} distinct null fixed points"
            )
        return pts
    raise WrongClass("elliptic elements fix no boundary points")


@dataclass(frozen=True)
class LoxodromicData:
    """Fixed points, translation length, and rotation phases of a loxodromic."""

    attracting: BoundaryPoint
    repelling: BoundaryPoint
    translation_length: float
    eigenvalue_moduli: tuple[float, ...]
    eigenvalue_args: tuple[float, ...]


def axis(g: SpecialUnitaryElement) -> Geodesic:
    """The invariant geodesic of a loxodromic element.

    Parameterized by arclength with t = 0 at the point of the axis closest to
    the origin and t -> +inf toward the attracting fixed point.
    """
    cls = classify(g)
    if cls.label is not IsometryType.LOXODROMIC:
        raise WrongClass(f"axis requires a loxodromic element, got {cls.label.value}")
    vals, vecs = _eigensystem(g)
    u = _ball_vector(vecs[:, 0], g.form)  # attracting (largest modulus)
    w = _ball_vector(vecs[:, 2], g.form)  # repelling
    j = ball_form().matrix
    c = complex(u @ (j @ w.conj()))
    if abs(c) < 1e-14:
        raise NumericalFailure("fixed-point lifts pair to zero")
    uh = u / math.sqrt(abs(c))
    wh = -w * (c / abs(c)) / math.sqrt(abs(c))
    # <uh, wh> = -1; sigma(t) = e^{t/2} uh + e^{-t/2} wh is unit speed.
    # Re-center so t = 0 projects the origin: |sigma_3|^2 is minimized at
    # t* = log |wh_3 / uh_3|.
    t_star = math.log(abs(wh[2]) / abs(uh[2]))
    uh = uh * math.exp(t_star / 2.0)
    wh = wh * math.exp(-t_star / 2.0)
    base = (uh + wh) / math.sqrt(2.0)
    direction = (uh - wh) / math.sqrt(2.0)
    # Re-orthonormalize to kill O(eps) Gram defects from the eigenvectors.
    base = base / math.sqrt(-(base @ (j @ base.conj())).real)
    direction = direction + complex(direction @ (j @ base.conj())) * base
    direction = direction / math.sqrt((direction @ (j @ direction.conj())).real)
    return Geodesic(base, direction)


def translation_length(g: SpecialUnitaryElement) -> float:
    """Displacement d(p, g p) of a point p on the axis (the minimal displacement)."""
    p = axis(g).point(0.0)
    gb = g if g.form.kind is FormKind.BALL else change_form(g, g.form, ball_form())
    return distance(p, apply(gb, p))


def loxodromic_data(g: SpecialUnitaryElement) -> LoxodromicData:
    cls = classify(g)
    if cls.label is not IsometryType.LOXODROMIC:
        raise WrongClass("loxodromic_data requires a loxodromic element")
    att, rep = fixed_boundary_points(g)
    return LoxodromicData(
        attracting=att,
        repelling=rep,
        translation_length=translation_length(g),
        eigenvalue_moduli=cls.eigenvalue_moduli,
        eigenvalue_args=cls.eigenvalue_args,
    )


def frame_at(p: BallPoint) -> SpecialUnitaryElement:
    """A ball-form element carrying the origin to p.

    Built by indefinite Gram-Schmidt: third column is the normalized lift of
    p, the first two are positive, pairwise orthogonal unit columns orthogonal
    to it; the determinant is corrected to 1 by a unit rescaling of the first
    column.
    """
    v = p.nlift
    j = ball_form().matrix

    def pair(a, b):
        return complex(a @ (j @ b.conj()))

    e1 = np.array([1.0, 0.0, 0.0], dtype=complex)
    e2 = np.array([0.0, 1.0, 0.0], dtype=complex)
    u1 = e1 + pair(e1, v) * v
    u1 = u1 / math.sqrt(pair(u1, u1).real)
    u2 = e2 + pair(e2, v) * v - pair(e2, u1) * u1
    u2 = u2 / math.sqrt(pair(u2, u2).real)
    a = np.column_stack([u1, u2, v])
    d = complex(np.linalg.det(a))
    a[:, 0] *= d.conjugate() / abs(d)
    return verify_membership(a, ball_form())


_CAYLEY = np.array(
    [
        [1.0 / math.sqrt(2.0), 0.0, 1.0 / math.sqrt(2.0)],
        [0.0, 1.0, 0.0],
        [1.0 / math.sqrt(2.0), 0.0, -1.0 / math.sqrt(2.0)],
    ],
    dtype=complex,
)
# The congruence is involutive and intertwines the two standard forms both
# ways: C* J_ball C = J_siegel and C* J_siegel C = J_ball.
assert np.allclose(_CAYLEY.conj().T @ ball_form().matrix @ _CAYLEY, siegel_form().matrix)
assert np.allclose(_CAYLEY.conj().T @ siegel_form().matrix @ _CAYLEY, ball_form().matrix)
assert np.allclose(_CAYLEY @ _CAYLEY, np.eye(3))


def change_form(
    g: SpecialUnitaryElement, from_form: HermitianForm, to_form: HermitianForm
) -> SpecialUnitaryElement:
    """Conjugate by the standard congruence between the ball and Siegel forms."""
    if not g.form.same_as(from_form):
        raise FormMismatch("element does not preserve the declared source form")
    pair = (from_form.kind, to_form.kind)
    if pair in ((FormKind.BALL, FormKind.BALL), (FormKind.SIEGEL, FormKind.SIEGEL)):
        return g
    if pair in ((FormKind.SIEGEL, FormKind.BALL), (FormKind.BALL, FormKind.SIEGEL)):
        return verify_membership(_CAYLEY @ g.matrix @ _CAYLEY, to_form)
    raise UnsupportedConversion(f"no congruence registered for {pair}")


def _random_algebra_element(rng: np.random.Generator, form: HermitianForm) -> np.ndarray:
    """Traceless X with X* J + J X = 0: X = J K for anti-Hermitian K."""
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    k = 0.5 * (m - m.conj().T)
    x = form.matrix @ k
    x -= (np.trace(x) / 3.0) * np.eye(3)
    return x


def random_element(seed, class_hint: "IsometryType | str | None" = None) -> SpecialUnitaryElement:
    """Seeded random ball-form element; deterministic in the seed.

    Without a hint, the exponential of a random Lie-algebra element.  With
    class_hint loxodromic, a random conjugate of a diagonal Siegel loxodromic
    diag(lambda, 1, 1/conj(lambda)) with |lambda| in [1.1, 3], converted to
    the ball form.
    """
    rng = np.random.default_rng(seed)
    if class_hint is None:
        x = _random_algebra_element(rng, ball_form())
        return verify_membership(expm(x), ball_form())
    hint = IsometryType(class_hint) if isinstance(class_hint, str) else class_hint
    if hint is IsometryType.LOXODROMIC:
        lam = rng.uniform(1.1, 3.0) * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
        d = np.diag([lam, 1.0, 1.0 / np.conj(lam)])
        x = 0.6 * _random_algebra_element(rng, siegel_form())
        h = expm(x)
        g_siegel = verify_membership(h @ d @ np.linalg.inv(h), siegel_form())
        return change_form(g_siegel, siegel_form(), ball_form())
    raise BadParameter(f"unsupported class hint {class_hint!r}")


def random_loxodromic(seed) -> SpecialUnitaryElement:
    return random_element(seed, IsometryType.LOXODROMIC)
