"""Exception types for the bidisk geometry library."""


class GeometryError(Exception):
    """Base class for all errors raised by this library."""


class FormMismatch(GeometryError):
    """Two objects measured against different Hermitian forms were combined."""


class NotInterior(GeometryError):
    """A point expected inside the open unit ball lies on or outside the sphere."""


class NotBoundary(GeometryError):
    """A point expected on the unit sphere is not within tolerance of it."""


class DegenerateGeodesic(GeometryError):
    """A geodesic was requested through two coincident points."""


class UndefinedBusemann(GeometryError):
    """The pairing in a Busemann evaluation vanished (should be impossible)."""


class BadParameter(GeometryError):
    """A numeric parameter is outside its documented range."""


class NumericalDomainError(GeometryError):
    """An arccosh argument fell below 1 by more than the clamping tolerance."""


class NotUnitaryForForm(GeometryError):
    """A matrix does not preserve the declared Hermitian form."""


class WrongClass(GeometryError):
    """An isometry of the wrong dynamical type was passed (e.g. elliptic where
    loxodromic is required)."""


class NumericalFailure(GeometryError):
    """An underlying numerical routine (eigensolver, optimizer) failed."""


class UnsupportedConversion(GeometryError):
    """No congruence is registered for the requested pair of Hermitian forms."""


class InternalError(GeometryError):
    """An invariant that should hold for valid inputs was violated."""


class BracketFailure(GeometryError):
    """Root bracketing for a level-set sample failed within the ray budget."""

    def __init__(self, message, k=None, attempts=None):
        super().__init__(message)
        self.k = k
        self.attempts = attempts


class DegenerateGroup(GeometryError):
    """The generator of a cyclic group acts as the identity."""
