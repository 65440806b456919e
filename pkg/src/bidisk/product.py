"""The complex bidisk: the product of two copies of the hyperbolic ball.

Points are ordered pairs of interior ball points, the metric is
rho = sqrt(d1^2 + d2^2), and the isometries are pairs of ball-form elements
optionally preceded by the factor-swapping involution.  Geodesics of the
product are pairs of factor geodesics traversed at constant speeds (a, b)
with a^2 + b^2 = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeodesic
from .forms import FormKind, ball_form
from .hyperbolic import BallPoint, Geodesic, distance, golden_minimize, random_ball_point
from .isometry import SpecialUnitaryElement, apply, change_form, random_element


@dataclass(frozen=True)
class BidiskPoint:
    first: BallPoint
    second: BallPoint

    def isclose(self, other: "BidiskPoint", tol: float = 1e-12) -> bool:
        return self.first.isclose(other.first, tol) and self.second.isclose(other.second, tol)

    def __iter__(self):
        yield self.first
        yield self.second


def rho(x: BidiskPoint, y: BidiskPoint) -> float:
    """Product metric sqrt(d(x1,y1)^2 + d(x2,y2)^2)."""
    return math.hypot(distance(x.first, y.first), distance(x.second, y.second))


def _to_ball(g: SpecialUnitaryElement) -> SpecialUnitaryElement:
    if g.form.kind is FormKind.BALL:
        return g
    return change_form(g, g.form, ball_form())


@dataclass(frozen=True)
class BidiskIsometry:
    """A pair of factor isometries plus a swap flag.

    Acts by x -> (g1 y1, g2 y2) where y = (x2, x1) if swap else x, i.e. the
    involution is applied first, then the coordinate-wise pair.  Factors are
    stored in the ball form (Siegel inputs are converted on construction).
    """

    g1: SpecialUnitaryElement
    g2: SpecialUnitaryElement
    swap: bool = False

    def __post_init__(self):
        object.__setattr__(self, "g1", _to_ball(self.g1))
        object.__setattr__(self, "g2", _to_ball(self.g2))

    def apply(self, x: BidiskPoint) -> BidiskPoint:
        return apply_bidisk(self, x)

    def power(self, n: int) -> "BidiskIsometry":
        if not self.swap:
            return BidiskIsometry(self.g1.power(n), self.g2.power(n), False)
        if n == 0:
            return identity_bidisk()
        out = self if n > 0 else inverse(self)
        step = out
        for _ in range(abs(n) - 1):
            out = compose(out, step)
        return out


def identity_bidisk() -> BidiskIsometry:
    eye = SpecialUnitaryElement._trusted(np.eye(3, dtype=complex), ball_form())
    return BidiskIsometry(eye, eye, False)


def pure_swap() -> BidiskIsometry:
    eye = SpecialUnitaryElement._trusted(np.eye(3, dtype=complex), ball_form())
    return BidiskIsometry(eye, eye, True)


def apply_bidisk(gamma: BidiskIsometry, x: BidiskPoint) -> BidiskPoint:
    a, b = (x.second, x.first) if gamma.swap else (x.first, x.second)
    return BidiskPoint(apply(gamma.g1, a), apply(gamma.g2, b))


def compose(a: BidiskIsometry, b: BidiskIsometry) -> BidiskIsometry:
    """Group law fixed by apply(compose(a,b), x) == apply(a, apply(b, x)).

    Because the swap acts before the pair, b's factors swap roles when a
    carries the involution; the swap flags add mod 2.
    """
    if a.swap:
        return BidiskIsometry(a.g1 @ b.g2, a.g2 @ b.g1, not b.swap)
    return BidiskIsometry(a.g1 @ b.g1, a.g2 @ b.g2, b.swap)


def inverse(gamma: BidiskIsometry) -> BidiskIsometry:
    if gamma.swap:
        return BidiskIsometry(gamma.g2.inverse(), gamma.g1.inverse(), True)
    return BidiskIsometry(gamma.g1.inverse(), gamma.g2.inverse(), False)


def acts_trivially(gamma: BidiskIsometry, tol: float = 1e-12) -> bool:
    """Whether the isometry moves nothing (projective identity, no swap)."""
    probes = [
        BidiskPoint(BallPoint(0.31, 0.17j), BallPoint(-0.22, 0.05 + 0.4j)),
        BidiskPoint(BallPoint(0.05 - 0.6j, 0.1), BallPoint(0.44, -0.13j)),
    ]
    return all(rho(apply_bidisk(gamma, p), p) < tol for p in probes)


class ProductGeodesic:
    """A unit-speed geodesic of the product metric.

    Factor curves run at constant speeds (a, b), a^2 + b^2 = 1; a factor with
    zero speed is held constant (the corresponding slice is totally geodesic).
    """

    __slots__ = ("part1", "part2", "speed1", "speed2", "length")

    def __init__(self, part1, speed1, part2, speed2, length):
        self.part1 = part1
        self.speed1 = speed1
        self.part2 = part2
        self.speed2 = speed2
        self.length = length

    @classmethod
    def through(cls, x: BidiskPoint, y: BidiskPoint) -> "ProductGeodesic":
        """Geodesic with point(0) = x and point(length) = y."""
        d1 = distance(x.first, y.first)
        d2 = distance(x.second, y.second)
        length = math.hypot(d1, d2)
        if length < 1e-12:
            raise DegenerateGeodesic("bidisk points coincide")
        if d1 < 1e-12:
            part1, a = x.first, 0.0
        else:
            part1, a = Geodesic.through(x.first, y.first), d1 / length
        if d2 < 1e-12:
            part2, b = x.second, 0.0
        else:
            part2, b = Geodesic.through(x.second, y.second), d2 / length
        return cls(part1, a, part2, b, length)

    def point(self, t: float) -> BidiskPoint:
        p1 = self.part1 if self.speed1 == 0.0 else self.part1.point(self.speed1 * t)
        p2 = self.part2 if self.speed2 == 0.0 else self.part2.point(self.speed2 * t)
        return BidiskPoint(p1, p2)

    def __call__(self, t: float) -> BidiskPoint:
        return self.point(t)

    def rho_profile(self, center: BidiskPoint, ts: np.ndarray) -> np.ndarray:
        """rho(point(t), center) over an array of parameters, vectorized."""
        ts = np.asarray(ts, dtype=float)
        if self.speed1 == 0.0:
            d1 = np.full_like(ts, distance(self.part1, center.first))
        else:
            d1 = self.part1.distance_profile(center.first, self.speed1 * ts)
        if self.speed2 == 0.0:
            d2 = np.full_like(ts, distance(self.part2, center.second))
        else:
            d2 = self.part2.distance_profile(center.second, self.speed2 * ts)
        return np.hypot(d1, d2)

    def closest_parameter(self, p: BidiskPoint, bracket=(-60.0, 60.0)) -> float:
        return golden_minimize(
            lambda t: float(self.rho_profile(p, np.array([t]))[0]) ** 2,
            bracket[0],
            bracket[1],
        )

    def distance_to(self, p: BidiskPoint, bracket=(-60.0, 60.0)) -> float:
        """rho-distance from p to the geodesic (convex 1-D minimization)."""
        return rho(self.point(self.closest_parameter(p, bracket)), p)


def random_bidisk_point(rng: np.random.Generator, max_norm: float = 0.85) -> BidiskPoint:
    return BidiskPoint(random_ball_point(rng, max_norm), random_ball_point(rng, max_norm))


def random_bidisk_isometry(seed, allow_swap: bool = True, loxodromic: bool = False) -> BidiskIsometry:
    """Seeded random product isometry; deterministic in the seed."""
    rng = np.random.default_rng(seed)
    s1 = int(rng.integers(0, 2**62))
    s2 = int(rng.integers(0, 2**62))
    hint = "loxodromic" if loxodromic else None
    g1 = random_element(s1, hint)
    g2 = random_element(s2, hint)
    swap = bool(allow_swap and rng.random() < 0.5)
    return BidiskIsometry(g1, g2, swap)
