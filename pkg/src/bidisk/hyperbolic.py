"""The complex hyperbolic plane in the unit-ball model.

Points live in the open unit ball of C^2.  A point lifts to homogeneous
coordinates (z1, z2, 1) in C^{2,1}, which is a negative vector for the ball
form diag(1, 1, -1), and the metric is

    cosh^2(d(x,z)/2) = |<x,z>|^2 / ((1 - |x|^2)(1 - |z|^2))

evaluated on lifts.  d((0,0),(r,0)) = 2 artanh(r), so the radial coordinate
at arclength t from the origin is tanh(t/2).

Internally every interior point carries a *normalized* lift v with
<v,v> = -1 and real positive third coordinate.  Geodesics are evaluated as
v(t) = cosh(t/2) base + sinh(t/2) dir with <base,base> = -1, <dir,dir> = 1,
<base,dir> = 0, for which <v(t),v(t)> = -1 identically.  Carrying that
identity analytically (instead of recomputing 1 - |z|^2 from rounded ball
coordinates) keeps distances and level-set residuals accurate arbitrarily
deep toward the boundary, where the affine formula loses everything to
cancellation.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadParameter,
    DegenerateGeodesic,
    NotBoundary,
    NotInterior,
    NumericalDomainError,
    UndefinedBusemann,
)
from .forms import ProjectiveVector, ball_form

logger = logging.getLogger("bidisk")

ARCCOSH_CLAMP = 1e-12
BOUNDARY_NORM_TOL = 1e-10
NULL_LIFT_TOL = 1e-9

# Offset between the affine depth log(1 - |x|) and the horospherical
# normalization of the distance asymptotics: 1 - |x|^2 ~ 2 (1 - |x|) near the
# sphere.  Measured by deep-ray sampling (depths 1e-4 .. 1e-10, random point /
# boundary-direction pairs): 0.69314718055... = log 2.
DEPTH_LOG_OFFSET = math.log(2.0)


def _pair(v, w):
    """Ball-form pairing of two lifts: v0 conj(w0) + v1 conj(w1) - v2 conj(w2)."""
    return v[0] * w[0].conjugate() + v[1] * w[1].conjugate() - v[2] * w[2].conjugate()


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def golden_minimize(f, lo: float, hi: float, tol: float = 1e-12, max_iter: int = 160) -> float:
    """Argmin of a unimodal function by golden-section search.

    Unlike bounded Brent, termination is purely by interval width, with no
    sqrt(eps)*|x| floor, so nearly-flat minima resolve to the requested
    parameter tolerance.
    """
    a, b = float(lo), float(hi)
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a < tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


class BallPoint:
    """An interior point of the unit ball in C^2.

    Carries both affine coordinates (z1, z2) and a normalized lift with
    self-pairing exactly -1 (third coordinate real positive).
    """

    __slots__ = ("z1", "z2", "nlift")

    def __init__(self, z1, z2):
        z1 = complex(z1)
        z2 = complex(z2)
        nsq = abs(z1) ** 2 + abs(z2) ** 2
        if nsq >= 1.0:
            raise NotInterior(f"|z|^2 = {nsq} >= 1; point is not inside the unit ball")
        s = math.sqrt(1.0 - nsq)
        self.z1 = z1
        self.z2 = z2
        self.nlift = np.array([z1 / s, z2 / s, 1.0 / s], dtype=complex)

    @classmethod
    def _from_normalized_lift(cls, v) -> "BallPoint":
        """Wrap a lift already satisfying <v,v> = -1 (trusted, not recomputed)."""
        p = object.__new__(cls)
        phase = v[2].conjugate() / abs(v[2])
        v = v * phase
        v[2] = v[2].real + 0.0j
        p.nlift = v
        p.z1 = complex(v[0] / v[2])
        p.z2 = complex(v[1] / v[2])
        return p

    @classmethod
    def from_lift(cls, coords) -> "BallPoint":
        """Build a point from any homogeneous lift of a negative vector."""
        v = np.asarray(coords, dtype=complex).reshape(3)
        s = -_pair(v, v).real
        if s <= 0.0:
            raise NotInterior("lift is not a negative vector; no interior point")
        return cls._from_normalized_lift(v / math.sqrt(s))

    @classmethod
    def _from_affine(cls, z1, z2, one_minus_norm_sq) -> "BallPoint":
        """Build from affine coordinates with 1 - |z|^2 known analytically."""
        s = math.sqrt(one_minus_norm_sq)
        p = object.__new__(cls)
        p.z1 = complex(z1)
        p.z2 = complex(z2)
        p.nlift = np.array([p.z1 / s, p.z2 / s, 1.0 / s], dtype=complex)
        return p

    @property
    def one_minus_norm_sq(self) -> float:
        """1 - |z|^2, exact at any depth (from the normalized lift)."""
        return 1.0 / self.nlift[2].real ** 2

    @property
    def norm(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.one_minus_norm_sq))

    @property
    def boundary_depth(self) -> float:
        """1 - |z|, computed without cancellation."""
        return self.one_minus_norm_sq / (1.0 + self.norm)

    def direction(self) -> np.ndarray:
        """Unit vector z/|z| as 4 reals (undefined at the origin)."""
        v = np.array([self.z1.real, self.z1.imag, self.z2.real, self.z2.imag])
        n = np.linalg.norm(v)
        if n == 0.0:
            raise BadParameter("the origin has no direction")
        return v / n

    def isclose(self, other: "BallPoint", tol: float = 1e-12) -> bool:
        return abs(self.z1 - other.z1) <= tol and abs(self.z2 - other.z2) <= tol

    def __repr__(self):
        return f"BallPoint({self.z1!r}, {self.z2!r})"


def origin() -> BallPoint:
    return BallPoint(0.0, 0.0)


class BoundaryPoint:
    """A point of the unit sphere S^3 in C^2 (ideal boundary of the ball)."""

    __slots__ = ("z1", "z2")

    def __init__(self, z1, z2):
        z1 = complex(z1)
        z2 = complex(z2)
        nsq = abs(z1) ** 2 + abs(z2) ** 2
        if abs(nsq - 1.0) > BOUNDARY_NORM_TOL:
            raise NotBoundary(f"|xi|^2 = {nsq} is not 1 within {BOUNDARY_NORM_TOL}")
        n = math.sqrt(nsq)
        self.z1 = z1 / n
        self.z2 = z2 / n

    @classmethod
    def from_direction(cls, vec4) -> "BoundaryPoint":
        v = np.asarray(vec4, dtype=float).reshape(4)
        v = v / np.linalg.norm(v)
        return cls(complex(v[0], v[1]), complex(v[2], v[3]))

    @property
    def affine_lift(self) -> np.ndarray:
        """The null lift (z1, z2, 1); its largest coordinate has modulus 1."""
        return np.array([self.z1, self.z2, 1.0], dtype=complex)

    def null_defect(self) -> float:
        """|<xi,xi>| of the affine lift; 0 for an exact sphere point."""
        return abs(_pair(self.affine_lift, self.affine_lift))

    def as_real4(self) -> np.ndarray:
        return np.array([self.z1.real, self.z1.imag, self.z2.real, self.z2.imag])

    def __repr__(self):
        return f"BoundaryPoint({self.z1!r}, {self.z2!r})"


def angular_distance(a: BoundaryPoint, b: BoundaryPoint) -> float:
    """Angle between two sphere points, viewed as unit vectors in R^4."""
    c = float(np.dot(a.as_real4(), b.as_real4()))
    return math.acos(min(1.0, max(-1.0, c)))


def tangent_pair(p: BallPoint) -> tuple[np.ndarray, np.ndarray]:
    """Two pairing-orthonormal positive lifts orthogonal to p's lift.

    Complex spans of (u1, u2) parameterize the directions at p: the geodesic
    from p with direction coefficient (alpha, beta), |alpha|^2 + |beta|^2 = 1,
    is t -> cosh(t/2) p + sinh(t/2) (alpha u1 + beta u2).
    """
    v = p.nlift
    e1 = np.array([1.0, 0.0, 0.0], dtype=complex)
    e2 = np.array([0.0, 1.0, 0.0], dtype=complex)
    u1 = e1 + _pair(e1, v) * v
    u1 = u1 / math.sqrt(_pair(u1, u1).real)
    u2 = e2 + _pair(e2, v) * v - _pair(e2, u1) * u1
    u2 = u2 / math.sqrt(_pair(u2, u2).real)
    return u1, u2


def lift(p: BallPoint) -> ProjectiveVector:
    """The homogeneous representative (z1, z2, 1), a negative vector."""
    if not isinstance(p, BallPoint):
        raise NotInterior("lift expects an interior BallPoint")
    return ProjectiveVector(np.array([p.z1, p.z2, 1.0], dtype=complex), ball_form())


def _cosh_half_distance(x: BallPoint, z: BallPoint) -> float:
    """|<x,z>| on normalized lifts, clamped to >= 1."""
    c = abs(_pair(x.nlift, z.nlift))
    c2 = c * c
    if c2 < 1.0:
        if c2 < 1.0 - ARCCOSH_CLAMP:
            raise NumericalDomainError(
                f"cosh^2(d/2) = {c2} fell below 1 by more than {ARCCOSH_CLAMP}"
            )
        logger.debug("arccosh argument %.17g clamped to 1", c2)
        return 1.0
    return c


def distance(x: BallPoint, z: BallPoint) -> float:
    """Hyperbolic distance; d((0,0),(r,0)) = 2 artanh(r)."""
    return 2.0 * math.acosh(_cosh_half_distance(x, z))


def distance_lifts(v, w, form: "object | None" = None) -> float:
    """Distance between the projective points of two negative lifts.

    Accepts arbitrary homogeneous representatives; the value is invariant
    under nonzero complex rescaling of either argument.
    """
    if form is None:
        form = ball_form()
    pv = form.pairing(v, v).real
    pw = form.pairing(w, w).real
    if pv >= 0.0 or pw >= 0.0:
        raise NotInterior("lifts must be negative vectors")
    c2 = abs(form.pairing(v, w)) ** 2 / (pv * pw)
    if c2 < 1.0:
        if c2 < 1.0 - ARCCOSH_CLAMP:
            raise NumericalDomainError(f"cosh^2(d/2) = {c2} below 1")
        c2 = 1.0
    return 2.0 * math.acosh(math.sqrt(c2))


@dataclass(frozen=True)
class Geodesic:
    """A unit-speed geodesic t -> [cosh(t/2) base + sinh(t/2) dir].

    base is a normalized interior lift (<base,base> = -1), dir a unit positive
    lift orthogonal to it; the curve is defined for all real t and satisfies
    d(point(s), point(t)) = |s - t|.
    """

    base: np.ndarray
    dir: np.ndarray

    @classmethod
    def through(cls, x: BallPoint, y: BallPoint) -> "Geodesic":
        """Geodesic with point(0) = x and point(d(x,y)) = y."""
        d = distance(x, y)
        if d < 1e-12:
            raise DegenerateGeodesic("cannot orient a geodesic through coincident points")
        c = _pair(y.nlift, x.nlift)
        # Rotate y's lift so its pairing with x is real negative; then the
        # orthogonal component has self-pairing sinh^2(d/2) exactly.
        yl = y.nlift * (-c.conjugate() / abs(c))
        u = (yl - math.cosh(d / 2.0) * x.nlift) / math.sinh(d / 2.0)
        return cls(x.nlift.copy(), u)

    @classmethod
    def toward(cls, x: BallPoint, xi: BoundaryPoint) -> "Geodesic":
        """Geodesic ray with point(0) = x converging to xi as t -> +inf."""
        xl = xi.affine_lift
        c = _pair(xl, x.nlift)
        if abs(c) < 1e-14:
            raise UndefinedBusemann("boundary pairing vanished")
        u = -xl / c - x.nlift
        return cls(x.nlift.copy(), u)

    def lift_at(self, t: float) -> np.ndarray:
        return math.cosh(t / 2.0) * self.base + math.sinh(t / 2.0) * self.dir

    def point(self, t: float) -> BallPoint:
        return BallPoint._from_normalized_lift(self.lift_at(t))

    def __call__(self, t: float) -> BallPoint:
        return self.point(t)

    def endpoint(self, forward: bool = True) -> BoundaryPoint:
        v = self.base + self.dir if forward else self.base - self.dir
        return BoundaryPoint(complex(v[0] / v[2]), complex(v[1] / v[2]))

    def pairing_profile(self, p: BallPoint) -> tuple[complex, complex]:
        """Constants (a, b) with <gamma(t), p> = a cosh(t/2) + b sinh(t/2)."""
        return _pair(self.base, p.nlift), _pair(self.dir, p.nlift)

    def distance_profile(self, p: BallPoint, ts: np.ndarray) -> np.ndarray:
        """Vector of d(gamma(t), p) over an array of parameters."""
        a, b = self.pairing_profile(p)
        m = np.abs(a * np.cosh(ts / 2.0) + b * np.sinh(ts / 2.0))
        return 2.0 * np.arccosh(np.maximum(m, 1.0))

    def closest_parameter(self, p: BallPoint, bracket: tuple[float, float] = (-60.0, 60.0)) -> float:
        a, b = self.pairing_profile(p)

        def sq(t):
            return abs(a * math.cosh(t / 2.0) + b * math.sinh(t / 2.0)) ** 2

        return golden_minimize(sq, bracket[0], bracket[1])

    def distance_to(self, p: BallPoint, bracket: tuple[float, float] = (-60.0, 60.0)) -> float:
        """Distance from p to the geodesic (convex 1-D minimization)."""
        t = self.closest_parameter(p, bracket)
        return distance(self.point(t), p)


def geodesic_point(x: BallPoint, y: BallPoint, t: float) -> BallPoint:
    """Point at arclength t on the unit-speed geodesic from x through y."""
    return Geodesic.through(x, y).point(t)


def busemann_closed(z: BallPoint, xi: BoundaryPoint) -> float:
    """Closed-form Busemann value log((1 - |z|^2) / |<z,xi>|^2), base point o.

    Convention: the value increases toward xi; along the ray from the origin
    to xi it equals the arclength parameter exactly, and it is 0 at the
    origin for every xi.
    """
    xl = xi.affine_lift
    p = _pair(z.nlift, xl)
    # |<z_affine, xi>| = |p| * sqrt(1 - |z|^2); the guard below is on the
    # affine pairing, which cannot vanish for interior z and null xi.
    affine = abs(p) / z.nlift[2].real
    if affine < 1e-14:
        raise UndefinedBusemann("pairing of interior point with boundary lift vanished")
    return -2.0 * math.log(abs(p))


def busemann_limit(z: BallPoint, xi: BoundaryPoint, closeness: float) -> float:
    """Finite-depth Busemann estimate from distance differences.

    Evaluates at the point y on the ray from the origin toward xi with
    1 - |y| = closeness, oriented to agree with busemann_closed: the
    difference d(o, y) - d(z, y) converges to the closed form as
    closeness -> 0 (the residual is O(closeness)).
    """
    if not (0.0 < closeness < 1.0):
        raise BadParameter(f"closeness must lie in (0,1), got {closeness}")
    r = 1.0 - closeness
    y = BallPoint._from_affine(r * xi.z1, r * xi.z2, closeness * (2.0 - closeness))
    return distance(origin(), y) - distance(z, y)


def boundary_asymptotic_residual(z: BallPoint, xi: BoundaryPoint, x_n: BallPoint) -> float:
    """Defect of the distance asymptotics at a point x_n near xi.

    For x_n approaching xi along a geodesic,

        d(x_n, z) = -log(1 - |x_n|) - B(z, xi) + log 2 + o(1)

    with B = busemann_closed; the returned residual
    d(x_n,z) + log(1 - |x_n|) + B(z,xi) - log 2 tends to 0 (linearly in the
    depth 1 - |x_n|).  Far from the boundary it is just a finite defect.
    """
    log_depth = math.log(x_n.boundary_depth)
    return distance(x_n, z) + log_depth + busemann_closed(z, xi) - DEPTH_LOG_OFFSET


def random_ball_point(rng: np.random.Generator, max_norm: float = 0.85) -> BallPoint:
    """Seeded random interior point, uniform in the Euclidean ball of radius max_norm."""
    v = rng.normal(size=4)
    v /= np.linalg.norm(v)
    r = max_norm * rng.random() ** 0.25
    return BallPoint(complex(v[0], v[1]) * r, complex(v[2], v[3]) * r)


def random_boundary_point(rng: np.random.Generator) -> BoundaryPoint:
    """Seeded random point of the unit sphere S^3."""
    return BoundaryPoint.from_direction(rng.normal(size=4))
