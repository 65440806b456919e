"""Hermitian forms of signature (2,1) on C^3 and projective vectors.

The pairing convention is

    <z, w> = sum_ij J_ij z_i conj(w_j),

linear in the first slot and conjugate-linear in the second.  With the
ball form J = diag(1, 1, -1) this is z0 conj(w0) + z1 conj(w1) - z2 conj(w2).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import FormMismatch, GeometryError

HERMITICITY_TOL = 1e-12
SIGN_CLASS_TOL = 1e-9


class FormKind(enum.Enum):
    BALL = "ball"
    SIEGEL = "siegel"
    CUSTOM = "custom"


class SignClass(enum.Enum):
    NEGATIVE = "negative"
    NULL = "null"
    POSITIVE = "positive"


@dataclass(frozen=True)
class HermitianForm:
    """A 3x3 Hermitian matrix of signature (2,1)."""

    matrix: np.ndarray
    kind: FormKind = FormKind.CUSTOM

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (3, 3):
            raise GeometryError(f"form matrix must be 3x3, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > HERMITICITY_TOL:
            raise GeometryError("form matrix is not Hermitian")
        eig = np.linalg.eigvalsh(m)
        if not (eig[0] < 0 < eig[1] and eig[2] > 0):
            raise GeometryError(f"form signature is not (2,1); eigenvalues {eig}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def pairing(self, z: np.ndarray, w: np.ndarray) -> complex:
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        return complex(z @ (self.matrix @ w.conj()))

    def same_as(self, other: "HermitianForm") -> bool:
        return self.kind is other.kind and np.allclose(
            self.matrix, other.matrix, rtol=0.0, atol=1e-12
        )

    def __eq__(self, other):
        return isinstance(other, HermitianForm) and self.same_as(other)

    def __hash__(self):
        return hash(self.kind)


_BALL = HermitianForm(np.diag([1.0, 1.0, -1.0]), FormKind.BALL)
_SIEGEL = HermitianForm(np.fliplr(np.eye(3)), FormKind.SIEGEL)


def ball_form() -> HermitianForm:
    """diag(1, 1, -1): interior ball points lift to negative vectors."""
    return _BALL


def siegel_form() -> HermitianForm:
    """Antidiagonal(1, 1, 1): the form preserved by diagonal loxodromics."""
    return _SIEGEL


@dataclass(frozen=True)
class ProjectiveVector:
    """A nonzero homogeneous vector in C^3 together with its measuring form."""

    coords: np.ndarray
    form: HermitianForm = field(default_factory=ball_form)

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=complex).reshape(3)
        scale = np.max(np.abs(c))
        if scale == 0.0:
            raise GeometryError("projective vector must be nonzero")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    def self_pairing(self) -> float:
        return self.form.pairing(self.coords, self.coords).real

    @property
    def sign_class(self) -> SignClass:
        # Normalize by the largest coordinate modulus so the null band is
        # scale-independent.
        c = self.coords / np.max(np.abs(self.coords))
        s = self.form.pairing(c, c).real
        if s < -SIGN_CLASS_TOL:
            return SignClass.NEGATIVE
        if s > SIGN_CLASS_TOL:
            return SignClass.POSITIVE
        return SignClass.NULL


def hermitian_pairing(v: ProjectiveVector, w: ProjectiveVector) -> complex:
    """<v, w> for two vectors measured against the same form."""
    if not v.form.same_as(w.form):
        raise FormMismatch("vectors are measured against different Hermitian forms")
    return v.form.pairing(v.coords, w.coords)
