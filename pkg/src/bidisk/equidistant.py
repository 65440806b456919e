"""Equidistant hypersurfaces of the bidisk and their level-set structure.

The locus equidistant from two bidisk points z, w decomposes over a real
level parameter k: a bidisk point lies on it exactly when its first factor
satisfies d^2(x1, z1) - d^2(x1, w1) = k and its second factor satisfies the
reversed difference d^2(x2, w2) - d^2(x2, z2) = k, for one common k.

Sampling works factor by factor.  Along the full geodesic line through the
two centers a, b the level function is exactly linear and surjective,

    d^2(sigma(s), a) - d^2(sigma(s), b) = 2 d(a,b) s - d(a,b)^2,

so every level k has a closed-form seed point on that line.  Around the seed
point, random probes are bucketed by sign of (level - k) and the continuous
level function is bisected along the geodesic chord between an under-level
and an over-level probe; the intermediate value theorem guarantees the
crossing, and each returned point carries a certified residual.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadParameter, BracketFailure
from .hyperbolic import (
    BallPoint,
    BoundaryPoint,
    Geodesic,
    angular_distance,
    busemann_closed,
    distance,
)
from .isometry import frame_at
from .product import BidiskPoint, rho

K_CLIP = 50.0
RAY_LENGTH_CAP = 40.0
# Beyond this arclength from the midpoint, 1 - |p| underflows the double
# depth budget; rays whose crossing lands deeper are redrawn.
CROSSING_DEPTH_CAP = 30.0
RESIDUAL_TOL = 1e-9
BISECTION_MAX_ITER = 200
GRID_STEP = 0.25
MAX_RAY_ATTEMPTS = 64


def signed_difference(p: BallPoint, a: BallPoint, b: BallPoint) -> float:
    """d^2(p,a) - d^2(p,b); negative at a, positive at b, zero on the bisector."""
    return distance(p, a) ** 2 - distance(p, b) ** 2


@dataclass(frozen=True)
class BisectorSpec:
    """The equidistant locus E(z, w) = {x : rho(x,z) = rho(x,w)}."""

    z: BidiskPoint
    w: BidiskPoint

    def __post_init__(self):
        if rho(self.z, self.w) <= 1e-10:
            raise BadParameter("bisector requires two distinct bidisk points")


def bisector_residual(x: BidiskPoint, spec: BisectorSpec) -> float:
    """rho^2(x,z) - rho^2(x,w); zero exactly on the bisector.

    Equals the first-factor level value minus the second-factor level value,
    so matched-level factor pairs have residual zero.
    """
    first = signed_difference(x.first, spec.z.first, spec.w.first)
    second = signed_difference(x.second, spec.w.second, spec.z.second)
    return first - second


class _FactorLevelSampler:
    """Bisection sampler for {p : d^2(p,a) - d^2(p,b) = k} in one factor."""

    def __init__(self, a: BallPoint, b: BallPoint, seed_key: tuple):
        d = distance(a, b)
        if d <= 1e-10:
            raise BadParameter("level sets need two distinct centers")
        self.a = a
        self.b = b
        self.seed_key = tuple(seed_key)
        geo = Geodesic.through(a, b)
        self.mid = geo.point(d / 2.0)
        cols = frame_at(self.mid).matrix
        self.tan1 = cols[:, 0]
        self.tan2 = cols[:, 1]
        self.grid = np.arange(-RAY_LENGTH_CAP, RAY_LENGTH_CAP + GRID_STEP / 2, GRID_STEP)

    def _ray(self, rng: np.random.Generator) -> Geodesic:
        c = rng.normal(size=4)
        c /= np.linalg.norm(c)
        u = complex(c[0], c[1]) * self.tan1 + complex(c[2], c[3]) * self.tan2
        return Geodesic(self.mid.nlift, u)

    def sample_one(self, k: float, index: int) -> BallPoint:
        rng = np.random.default_rng(self.seed_key + (index,))
        for _ in range(MAX_RAY_ATTEMPTS):
            ray = self._ray(rng)
            ca, cb = ray.pairing_profile(self.a), ray.pairing_profile(self.b)

            def level(t):
                ch, sh = math.cosh(t / 2.0), math.sinh(t / 2.0)
                da = 2.0 * math.acosh(max(1.0, abs(ca[0] * ch + ca[1] * sh)))
                db = 2.0 * math.acosh(max(1.0, abs(cb[0] * ch + cb[1] * sh)))
                return da * da - db * db - k

            vals = ray.distance_profile(self.a, self.grid) ** 2 \
                - ray.distance_profile(self.b, self.grid) ** 2 - k
            if k == 0.0:
                # Mask the trivial root at the midpoint itself.
                vals = np.where(np.abs(self.grid) < 2 * GRID_STEP, np.nan, vals)
            prod = vals[:-1] * vals[1:]
            idx = np.nonzero(prod < 0.0)[0]
            if idx.size == 0:
                continue
            i = int(rng.choice(idx))
            lo, hi = float(self.grid[i]), float(self.grid[i + 1])
            flo = level(lo)
            root = None
            for _ in range(BISECTION_MAX_ITER):
                mid = 0.5 * (lo + hi)
                fm = level(mid)
                if abs(fm) < 0.25 * RESIDUAL_TOL:
                    root = mid
                    break
                if (fm < 0.0) == (flo < 0.0):
                    lo, flo = mid, fm
                else:
                    hi = mid
                if hi - lo < 1e-15 * max(1.0, abs(hi)):
                    root = 0.5 * (lo + hi)
                    break
            if root is None or abs(root) > CROSSING_DEPTH_CAP:
                continue
            p = BallPoint._from_normalized_lift(ray.lift_at(root))
            if abs(signed_difference(p, self.a, self.b) - k) < RESIDUAL_TOL:
                return p
        raise BracketFailure(
            f"no level-{k} bracket within ray length {RAY_LENGTH_CAP} "
            f"after {MAX_RAY_ATTEMPTS} rays",
            k=k,
            attempts=MAX_RAY_ATTEMPTS,
        )


def sample_factor_level_set(a: BallPoint, b: BallPoint, k: float, n: int, seed) -> list[BallPoint]:
    """n points with |d^2(p,a) - d^2(p,b) - k| < 1e-9, seeded and deterministic."""
    sampler = _FactorLevelSampler(a, b, (seed,))
    return [sampler.sample_one(k, i) for i in range(n)]


@dataclass(frozen=True)
class LevelSlice:
    """One matched-level slice of a bisector: a product of factor level sets."""

    spec: BisectorSpec
    k: float

    def sample(self, n: int, seed) -> list[BidiskPoint]:
        s1 = _FactorLevelSampler(self.spec.z.first, self.spec.w.first, (seed, 1))
        s2 = _FactorLevelSampler(self.spec.w.second, self.spec.z.second, (seed, 2))
        return [
            BidiskPoint(s1.sample_one(self.k, i), s2.sample_one(self.k, i))
            for i in range(n)
        ]


@dataclass
class SampleCloud:
    """A certified sample of a bisector: points, residuals, levels, seed."""

    points: list[BidiskPoint]
    residuals: list[float]
    k_values: list[float]
    seed: int

    def __len__(self):
        return len(self.points)

    def max_residual(self) -> float:
        return max(abs(r) for r in self.residuals) if self.residuals else 0.0


def sample_bisector(spec: BisectorSpec, n: int, k_distribution=None, seed=0) -> SampleCloud:
    """Sample the bisector by drawing levels and pairing matched factor samples.

    Default level distribution: normal with standard deviation rho(z,w)^2,
    clipped to [-50, 50].  Every returned point satisfies
    |bisector_residual| < 2e-9.
    """
    if k_distribution is None:
        sigma = rho(spec.z, spec.w) ** 2
        rng = np.random.default_rng((seed, 0))
        ks = np.clip(rng.normal(0.0, sigma, size=n), -K_CLIP, K_CLIP)
    elif callable(k_distribution):
        drawn = k_distribution(np.random.default_rng((seed, 0)), n)
        ks = np.clip(np.asarray(drawn, dtype=float), -K_CLIP, K_CLIP)
    else:
        ks = np.clip(np.asarray(k_distribution, dtype=float), -K_CLIP, K_CLIP)
        if ks.shape != (n,):
            raise BadParameter(f"k_distribution must provide {n} values")
    s1 = _FactorLevelSampler(spec.z.first, spec.w.first, (seed, 1))
    s2 = _FactorLevelSampler(spec.w.second, spec.z.second, (seed, 2))
    points: list[BidiskPoint] = []
    residuals: list[float] = []
    for i, k in enumerate(ks):
        x = BidiskPoint(s1.sample_one(float(k), i), s2.sample_one(float(k), i))
        r = bisector_residual(x, spec)
        points.append(x)
        residuals.append(r)
    return SampleCloud(points, residuals, [float(k) for k in ks], seed)


# --- boundary accumulation -------------------------------------------------


@dataclass
class AccumulationEntry:
    depth: float
    theta: float
    direction: BoundaryPoint
    busemann_mismatch: float
    level_coefficient: float
    f_residual: float
    angle_to_limit: float = math.nan
    status: str = "ok"


@dataclass
class AccumulationReport:
    k: float
    seed: int
    entries: list[AccumulationEntry] = field(default_factory=list)
    accumulation_direction: "BoundaryPoint | None" = None
    limit_mismatch: float = math.nan
    converged: bool = False
    failures: list[str] = field(default_factory=list)


def _slerp(u: np.ndarray, v: np.ndarray, s: float) -> np.ndarray:
    c = float(np.clip(np.dot(u, v), -1.0, 1.0))
    th = math.acos(c)
    if th < 1e-12:
        return u
    return (math.sin((1.0 - s) * th) * u + math.sin(s * th) * v) / math.sin(th)


def _busemann_gap(a: BallPoint, b: BallPoint, vec4: np.ndarray) -> float:
    xi = BoundaryPoint.from_direction(vec4)
    return busemann_closed(a, xi) - busemann_closed(b, xi)


def boundary_accumulation_check(
    a: BallPoint, b: BallPoint, k: float, depth_schedule, seed=0
) -> AccumulationReport:
    """Track a level set toward the ideal boundary and test its accumulation.

    Finds a boundary direction where the two Busemann functions agree, then at
    each scheduled depth locates a level-k point on the sphere of that depth
    along the gradient circle of the Busemann gap.  Reports, per depth: the
    Busemann mismatch at the raw sample direction, the level coefficient
    (Busemann gap times the sum of distances, which tends to k), and the angle
    to the estimated accumulation direction.  The accumulation direction is
    the zero of the Busemann gap reached from the deepest sample, computed at
    machine precision.
    """
    report = AccumulationReport(k=float(k), seed=seed)
    depths = [float(d) for d in depth_schedule]
    if not depths or any(d <= 0.0 or d >= 1.0 for d in depths):
        report.failures.append("NonConvergence: depths must lie in (0,1)")
        return report
    if any(d2 >= d1 for d1, d2 in zip(depths, depths[1:])):
        report.failures.append(
            "NonConvergence: depth schedule does not decrease toward the boundary"
        )
        return report

    rng = np.random.default_rng((seed, 0))

    def gap(vec4):
        return _busemann_gap(a, b, vec4)

    # Seed directions of opposite Busemann-gap sign, then bisect the arc.
    u = rng.normal(size=4)
    u /= np.linalg.norm(u)
    gu = gap(u)
    v = None
    for _ in range(200):
        w = rng.normal(size=4)
        w /= np.linalg.norm(w)
        if gap(w) * gu < 0.0:
            v = w
            break
    if v is None:
        report.failures.append("NonConvergence: no sign change of the Busemann gap found")
        return report
    lo, hi = (u, v) if gu < 0.0 else (v, u)
    for _ in range(200):
        m = _slerp(lo, hi, 0.5)
        if gap(m) < 0.0:
            lo = m
        else:
            hi = m
        if math.acos(min(1.0, abs(float(np.dot(lo, hi))))) < 1e-14:
            break
    root = _slerp(lo, hi, 0.5)
    root /= np.linalg.norm(root)

    # Unit tangent along the on-sphere gradient of the gap at the root.
    h = 1e-6
    grad = np.zeros(4)
    for i in range(4):
        e = np.zeros(4)
        e[i] = h
        grad[i] = (gap(root + e) - gap(root - e)) / (2.0 * h)
    grad -= np.dot(grad, root) * root
    gnorm = np.linalg.norm(grad)
    if gnorm < 1e-10:
        report.failures.append("NonConvergence: Busemann gap is critical at the root")
        return report
    tangent = grad / gnorm

    def circle(theta):
        return math.cos(theta) * root + math.sin(theta) * tangent

    def sample_at(depth, theta):
        w4 = circle(theta)
        z1 = complex(w4[0], w4[1]) * (1.0 - depth)
        z2 = complex(w4[2], w4[3]) * (1.0 - depth)
        return BallPoint._from_affine(z1, z2, depth * (2.0 - depth))

    def level_fn(depth, theta):
        p = sample_at(depth, theta)
        da, db = distance(p, a), distance(p, b)
        return da * da - db * db - k, da + db

    thetas = np.arange(-math.pi, math.pi, 0.02)
    last_theta = 0.0
    for depth in depths:
        vals = np.array([level_fn(depth, t)[0] for t in thetas])
        idx = np.nonzero(vals[:-1] * vals[1:] < 0.0)[0]
        if idx.size == 0:
            report.failures.append(f"NonConvergence: no level-{k} point at depth {depth}")
            report.entries.append(
                AccumulationEntry(depth, math.nan, BoundaryPoint.from_direction(root),
                                  math.nan, math.nan, math.nan, status="no_bracket")
            )
            continue
        centers = 0.5 * (thetas[idx] + thetas[idx + 1])
        i = int(idx[np.argmin(np.abs(centers - last_theta))])
        lo_t, hi_t = float(thetas[i]), float(thetas[i + 1])
        flo = level_fn(depth, lo_t)[0]
        for _ in range(200):
            mid = 0.5 * (lo_t + hi_t)
            fm = level_fn(depth, mid)[0]
            if abs(fm) < 1e-10 or hi_t - lo_t < 1e-15:
                break
            if (fm < 0.0) == (flo < 0.0):
                lo_t, flo = mid, fm
            else:
                hi_t = mid
        theta = 0.5 * (lo_t + hi_t)
        last_theta = theta
        fval, dsum = level_fn(depth, theta)
        w4 = circle(theta)
        direction = BoundaryPoint.from_direction(w4)
        g = gap(w4)
        report.entries.append(
            AccumulationEntry(
                depth=depth,
                theta=theta,
                direction=direction,
                busemann_mismatch=abs(g),
                level_coefficient=-g * dsum,
                f_residual=abs(fval),
            )
        )

    good = [e for e in report.entries if e.status == "ok"]
    if not good:
        report.failures.append("NonConvergence: no depth produced a level point")
        return report

    # Accumulation direction: flow the deepest sample back to the zero set of
    # the Busemann gap along its construction circle.
    deepest = good[-1]
    th = deepest.theta
    if abs(gap(circle(th))) < 1e-12:
        th_root = th
    else:
        lo_t, hi_t = (0.0, th) if th > 0.0 else (th, 0.0)
        # The gap vanishes at theta = 0 to bisection precision; widen slightly
        # so the bracket has opposite signs.
        g_lo = gap(circle(lo_t))
        g_hi = gap(circle(hi_t))
        if g_lo * g_hi > 0.0:
            widen = -0.05 if th > 0.0 else 0.05
            lo_t, hi_t = (widen, th) if th > 0.0 else (th, widen)
            g_lo = gap(circle(lo_t))
        for _ in range(200):
            mid = 0.5 * (lo_t + hi_t)
            gm = gap(circle(mid))
            if abs(gm) < 1e-13 or hi_t - lo_t < 1e-15:
                lo_t = hi_t = mid
                break
            if (gm < 0.0) == (g_lo < 0.0):
                lo_t, g_lo = mid, gm
            else:
                hi_t = mid
        th_root = 0.5 * (lo_t + hi_t)
    limit_dir = BoundaryPoint.from_direction(circle(th_root))
    report.accumulation_direction = limit_dir
    report.limit_mismatch = abs(gap(circle(th_root)))
    for e in report.entries:
        if e.status == "ok":
            e.angle_to_limit = angular_distance(e.direction, limit_dir)
    report.converged = not report.failures
    return report
