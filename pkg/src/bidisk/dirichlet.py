"""Two-face verification for cyclic groups of loxodromic pairs.

For a generator gamma = (g1, g2) with both factors loxodromic and a basepoint
z on the product of the invariant axes, the Dirichlet domain of <gamma> is
bounded by the two bisectors between z and its nearest orbit neighbors
gamma(z), gamma^-1(z).  The pipeline checks this numerically: the two
bisectors stay apart (multi-start derivative-free minimization of the larger
bisector residual), every sampled point of the bisectors for powers |j| >= 2
is invisible to z, and sampled points of the two near bisectors sit on the
boundary of the truncated Dirichlet inequality system.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import BadParameter, DegenerateGroup, WrongClass
from .hyperbolic import BallPoint
from .isometry import IsometryType, SpecialUnitaryElement, axis, classify
from .product import (
    BidiskIsometry,
    BidiskPoint,
    ProductGeodesic,
    acts_trivially,
    apply_bidisk,
    inverse,
    rho,
)
from .equidistant import BisectorSpec, LevelSlice, bisector_residual, sample_bisector

VISIBILITY_TOL = 1e-10
FACE_BOUNDARY_TOL = 1e-8


@dataclass(frozen=True)
class VisibilityVerdict:
    """Result of the two visibility inequalities with their margins.

    margin_g = rho(y, gamma x) - rho(y, x) and likewise for the inverse;
    the point is visible when both margins are >= -1e-10 (equality band).
    """

    visible: bool
    margin_g: float
    margin_ginv: float
    witness: "str | None"


def is_visible(y: BidiskPoint, x: BidiskPoint, gamma: BidiskIsometry) -> VisibilityVerdict:
    gx = apply_bidisk(gamma, x)
    ginvx = apply_bidisk(inverse(gamma), x)
    base = rho(y, x)
    m_g = rho(y, gx) - base
    m_ginv = rho(y, ginvx) - base
    visible = m_g >= -VISIBILITY_TOL and m_ginv >= -VISIBILITY_TOL
    witness = None
    if not visible:
        witness = "g" if m_g <= m_ginv else "g_inverse"
    return VisibilityVerdict(visible, m_g, m_ginv, witness)


@dataclass(frozen=True)
class MembershipResult:
    member: bool
    minimizing_power: int
    min_margin: float
    margins: dict[int, float]


def dirichlet_membership(
    x: BidiskPoint, z: BidiskPoint, gamma: BidiskIsometry, power_range: int = 6
) -> MembershipResult:
    """Truncated Dirichlet inequalities rho(x,z) <= rho(x, gamma^j z), 0<|j|<=N."""
    if power_range < 1:
        raise BadParameter("power_range must be >= 1")
    if acts_trivially(gamma):
        raise DegenerateGroup("generator acts as the identity")
    base = rho(x, z)
    margins: dict[int, float] = {}
    fwd = z
    bwd = z
    ginv = inverse(gamma)
    for j in range(1, power_range + 1):
        fwd = apply_bidisk(gamma, fwd)
        bwd = apply_bidisk(ginv, bwd)
        margins[j] = rho(x, fwd) - base
        margins[-j] = rho(x, bwd) - base
    min_j = min(margins, key=lambda j: (margins[j], abs(j), j))
    member = margins[min_j] >= -VISIBILITY_TOL
    return MembershipResult(member, min_j, margins[min_j], margins)


@dataclass
class DisjointnessCertificate:
    """Best-found minimum of the larger of the two bisector residuals."""

    margin: float
    minimizer: BidiskPoint
    grid_margin: float
    box_radius: float
    restarts: int
    seed: int


class _BoxChart:
    """Geodesic-polar chart around one factor point, radius-clamped to R.

    Coordinates are 4 reals (alpha, beta as complex coefficients on two
    orthonormal tangent columns); the chart point lies at metric distance
    min(|v|, R) from the center.
    """

    def __init__(self, center: BallPoint, radius: float):
        from .isometry import frame_at

        self.center = center
        self.radius = radius
        cols = frame_at(center).matrix
        self.tan1 = cols[:, 0]
        self.tan2 = cols[:, 1]

    def lift(self, v: np.ndarray) -> np.ndarray:
        r = math.sqrt(float(v @ v))
        if r < 1e-14:
            return self.center.nlift
        u = (complex(v[0], v[1]) * self.tan1 + complex(v[2], v[3]) * self.tan2) / r
        t = min(r, self.radius)
        return math.cosh(t / 2.0) * self.center.nlift + math.sinh(t / 2.0) * u

    def point(self, v: np.ndarray) -> BallPoint:
        return BallPoint._from_normalized_lift(self.lift(v))

    def lift_grid(self, coords: np.ndarray) -> np.ndarray:
        """Vectorized lifts for an (n, 4) array of chart coordinates."""
        r = np.linalg.norm(coords, axis=1)
        alpha = coords[:, 0] + 1j * coords[:, 1]
        beta = coords[:, 2] + 1j * coords[:, 3]
        safe_r = np.where(r < 1e-14, 1.0, r)
        t = np.minimum(r, self.radius)
        ch = np.cosh(t / 2.0)[:, None]
        sh = (np.sinh(t / 2.0) / safe_r)[:, None]
        u = alpha[:, None] * self.tan1[None, :] + beta[:, None] * self.tan2[None, :]
        return ch * self.center.nlift[None, :] + sh * u


def _distances_to(lifts: np.ndarray, target: BallPoint) -> np.ndarray:
    """Vectorized d(., target) for an (n, 3) array of normalized lifts."""
    t = target.nlift
    p = lifts[:, 0] * np.conj(t[0]) + lifts[:, 1] * np.conj(t[1]) - lifts[:, 2] * np.conj(t[2])
    return 2.0 * np.arccosh(np.maximum(np.abs(p), 1.0))


def certify_disjoint(
    z: BidiskPoint,
    gamma: BidiskIsometry,
    restarts: int = 50,
    seed: int = 0,
    box_radius: "float | None" = None,
    control_same_bisector: bool = False,
) -> DisjointnessCertificate:
    """Search for intersections of the bisectors toward gamma(z), gamma^-1(z).

    Minimizes F(x) = max(|rho^2(x,z) - rho^2(x, gamma z)|,
    |rho^2(x,z) - rho^2(x, gamma^-1 z)|) over a product box around z, first
    on a coarse grid (independent oracle), then by seeded simplex restarts.
    A positive best-found minimum is the disjointness margin; a near-zero one
    flags a counterexample candidate.  With control_same_bisector the second
    target is replaced by gamma(z) again, which drives the minimum to zero by
    construction.
    """
    if gamma.swap:
        raise BadParameter("disjointness certification expects a swap-free generator")
    gz = apply_bidisk(gamma, z)
    giz = gz if control_same_bisector else apply_bidisk(inverse(gamma), z)
    spec_p = BisectorSpec(z, gz)
    spec_m = BisectorSpec(z, giz)
    r_box = box_radius if box_radius is not None else 2.0 * max(rho(z, gz), rho(z, giz))
    if r_box <= 0.0 or not math.isfinite(r_box):
        raise BadParameter(f"degenerate search box radius {r_box}")

    chart1 = _BoxChart(z.first, r_box)
    chart2 = _BoxChart(z.second, r_box)
    targets1 = [z.first, gz.first, giz.first]
    targets2 = [z.second, gz.second, giz.second]

    def objective(u: np.ndarray) -> float:
        p1 = chart1.point(u[:4])
        p2 = chart2.point(u[4:])
        x = BidiskPoint(p1, p2)
        return max(abs(bisector_residual(x, spec_p)), abs(bisector_residual(x, spec_m)))

    # Coarse independent grid scan: 5 points per real dimension.
    half = 0.75 * r_box
    axis_pts = np.linspace(-half, half, 5)
    mesh = np.meshgrid(*([axis_pts] * 8), indexing="ij")
    coords = np.stack([m.ravel() for m in mesh], axis=1)
    lifts1 = chart1.lift_grid(coords[:, :4])
    lifts2 = chart2.lift_grid(coords[:, 4:])
    d1 = [_distances_to(lifts1, t) for t in targets1]
    d2 = [_distances_to(lifts2, t) for t in targets2]
    res_p = d1[0] ** 2 - d1[1] ** 2 + d2[0] ** 2 - d2[1] ** 2
    res_m = d1[0] ** 2 - d1[2] ** 2 + d2[0] ** 2 - d2[2] ** 2
    fgrid = np.maximum(np.abs(res_p), np.abs(res_m))
    order = np.argsort(fgrid)
    grid_margin = float(fgrid[order[0]])

    rng = np.random.default_rng((seed, 17))
    starts = [coords[order[i]] for i in range(min(5, restarts))]
    while len(starts) < restarts:
        starts.append(rng.uniform(-half, half, size=8))

    best_val = grid_margin
    best_u = np.asarray(coords[order[0]], dtype=float)
    opts = {"maxiter": 600, "fatol": 1e-13, "xatol": 1e-11}
    for u0 in starts:
        res = minimize(objective, np.asarray(u0, dtype=float), method="Nelder-Mead", options=opts)
        if res.fun < best_val:
            best_val, best_u = float(res.fun), np.asarray(res.x, dtype=float)
    # Polish until the simplex stops improving.
    for _ in range(6):
        res = minimize(objective, best_u, method="Nelder-Mead", options=opts)
        if res.fun >= best_val - 1e-14:
            break
        best_val, best_u = float(res.fun), np.asarray(res.x, dtype=float)

    minimizer = BidiskPoint(chart1.point(best_u[:4]), chart2.point(best_u[4:]))
    return DisjointnessCertificate(
        margin=best_val,
        minimizer=minimizer,
        grid_margin=grid_margin,
        box_radius=r_box,
        restarts=restarts,
        seed=seed,
    )


def sphere_geodesic_intersections(
    center: BidiskPoint,
    radius: float,
    geodesic: ProductGeodesic,
    t_range: tuple[float, float],
    grid_step: float = 1e-3,
) -> int:
    """Count crossings of rho(gamma(t), center) = radius on a parameter window.

    Sign changes on a fine grid, each refined by bisection.  Metric spheres
    bound convex balls here, so the count never exceeds 2.
    """
    if radius <= 0.0:
        raise BadParameter("radius must be positive")
    t0, t1 = float(t_range[0]), float(t_range[1])
    ts = np.arange(t0, t1 + grid_step / 2.0, grid_step)
    h = geodesic.rho_profile(center, ts) - radius
    idx = np.nonzero(h[:-1] * h[1:] < 0.0)[0]
    count = 0
    for i in idx:
        lo, hi = float(ts[i]), float(ts[i + 1])
        hlo = h[i]
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            hm = float(geodesic.rho_profile(center, np.array([mid]))[0]) - radius
            if (hm < 0.0) == (hlo < 0.0):
                lo, hlo = mid, hm
            else:
                hi = mid
        count += 1
    return count


@dataclass
class PowerSweep:
    power: int
    samples: int
    fraction_invisible: float
    worst_margin: float
    e0_samples: int
    e0_fraction_invisible: float
    counterexamples: list[BidiskPoint] = field(default_factory=list)

    @property
    def verdict_invisible(self) -> bool:
        return self.fraction_invisible == 1.0

    @property
    def e0_verdict_invisible(self) -> bool:
        return self.e0_fraction_invisible == 1.0


@dataclass
class SweepReport:
    per_power: dict[int, PowerSweep]
    seed: int

    def all_invisible(self) -> bool:
        return all(s.verdict_invisible for s in self.per_power.values())

    def slice_consistent(self) -> bool:
        """Key reduction: the matched-level-0 slice predicts the full verdict."""
        return all(
            s.verdict_invisible == s.e0_verdict_invisible for s in self.per_power.values()
        )


def _margins_against(y: BidiskPoint, z: BidiskPoint, gz: BidiskPoint, giz: BidiskPoint):
    base = rho(y, z)
    return rho(y, gz) - base, rho(y, giz) - base


def invisibility_sweep(
    z: BidiskPoint,
    gamma: BidiskIsometry,
    powers,
    samples_per_bisector: int = 500,
    seed: int = 0,
    e0_samples: "int | None" = None,
) -> SweepReport:
    """Sample bisectors toward gamma^j(z) and test visibility of every point.

    For |j| >= 2 every sampled point is expected invisible to z; each power
    also runs the matched-level-0 slice separately and records whether the
    slice verdict predicts the full-bisector verdict.
    """
    powers = [int(j) for j in powers]
    if any(j == 0 for j in powers):
        raise BadParameter("power 0 does not define a bisector")
    gz = apply_bidisk(gamma, z)
    giz = apply_bidisk(inverse(gamma), z)
    n_e0 = e0_samples if e0_samples is not None else max(50, samples_per_bisector // 5)
    out: dict[int, PowerSweep] = {}
    for j in powers:
        target = gamma.power(j).apply(z)
        spec = BisectorSpec(z, target)
        cloud = sample_bisector(spec, samples_per_bisector, seed=(seed, j + 2**16))
        margins = [_margins_against(y, z, gz, giz) for y in cloud.points]
        inv_margins = [min(mg, mi) for mg, mi in margins]
        invisible = [m < -VISIBILITY_TOL for m in inv_margins]
        counter = [y for y, ok in zip(cloud.points, invisible) if not ok and abs(j) >= 2]
        slice_pts = LevelSlice(spec, 0.0).sample(n_e0, seed=(seed, j + 2**17))
        e0_inv = [
            min(*_margins_against(y, z, gz, giz)) < -VISIBILITY_TOL for y in slice_pts
        ]
        out[j] = PowerSweep(
            power=j,
            samples=len(cloud.points),
            fraction_invisible=float(np.mean(invisible)),
            worst_margin=float(max(inv_margins)),
            e0_samples=len(slice_pts),
            e0_fraction_invisible=float(np.mean(e0_inv)),
            counterexamples=counter,
        )
    return SweepReport(per_power=out, seed=seed)


@dataclass
class TwoFaceConfig:
    power_range: int = 6
    samples_per_bisector: int = 500
    face_samples: int = 100
    restarts: int = 50
    seed: int = 0
    disjoint_threshold: float = 1e-4
    collinearity_tol: float = 1e-7
    basepoint: "BidiskPoint | None" = None
    box_radius: "float | None" = None


@dataclass
class VerificationReport:
    """Structured outcome of one two-face experiment."""

    generator: BidiskIsometry
    basepoint: BidiskPoint
    face_powers: list[int]
    disjointness_margin: float
    grid_margin: float
    collinearity_deviation: float
    invisibility_fractions: dict[int, float]
    invisibility_worst_margins: dict[int, float]
    e0_consistent: bool
    face_margins: dict[int, float]
    stages: dict[str, str]
    seed: int
    tolerances: dict[str, float]
    wall_clock_seconds: float
    counterexamples: list[BidiskPoint] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (
            sorted(self.face_powers) == [-1, 1]
            and all(v.startswith("pass") for v in self.stages.values())
        )


def two_face_verify(
    g1: SpecialUnitaryElement, g2: SpecialUnitaryElement, config: "TwoFaceConfig | None" = None
) -> VerificationReport:
    """End-to-end check that the Dirichlet domain of <(g1, g2)> has two faces.

    Pipeline: put the basepoint on the product of the axes (at the points
    closest to the origin unless overridden), certify the two near bisectors
    disjoint, sweep the bisectors of powers 2..N for invisibility with the
    level-0 slice reduction, and confirm the two near bisectors are membership
    boundaries.  Stage failures are recorded by name; a report is always
    produced.
    """
    cfg = config or TwoFaceConfig()
    t_start = time.perf_counter()

    from .product import _to_ball

    g1b, g2b = _to_ball(g1), _to_ball(g2)
    for name, g in (("g1", g1b), ("g2", g2b)):
        cls = classify(g)
        if cls.label is not IsometryType.LOXODROMIC:
            raise WrongClass(f"{name} is {cls.label.value}; the pipeline needs loxodromic factors")

    gamma = BidiskIsometry(g1b, g2b, False)
    if cfg.basepoint is not None:
        z = cfg.basepoint
    else:
        z = BidiskPoint(axis(g1b).point(0.0), axis(g2b).point(0.0))
    gz = apply_bidisk(gamma, z)
    giz = apply_bidisk(inverse(gamma), z)

    stages: dict[str, str] = {}

    # Orbit collinearity: gamma^-1(z), z, gamma(z) on one product geodesic.
    try:
        geo = ProductGeodesic.through(giz, gz)
        deviation = geo.distance_to(z)
        stages["collinearity"] = (
            "pass" if deviation < cfg.collinearity_tol else f"fail: deviation {deviation:.3e}"
        )
    except Exception as exc:
        deviation = math.nan
        stages["collinearity"] = f"fail: {exc}"

    try:
        cert = certify_disjoint(
            z, gamma, restarts=cfg.restarts, seed=cfg.seed, box_radius=cfg.box_radius
        )
        stages["disjointness"] = (
            "pass"
            if cert.margin > cfg.disjoint_threshold
            else f"fail: margin {cert.margin:.3e} <= {cfg.disjoint_threshold}"
        )
    except Exception as exc:
        cert = None
        stages["disjointness"] = f"fail: {exc}"

    powers = [j for m in range(2, cfg.power_range + 1) for j in (m, -m)]
    try:
        sweep = invisibility_sweep(
            z, gamma, powers, cfg.samples_per_bisector, seed=cfg.seed
        )
        stages["invisibility"] = (
            "pass" if sweep.all_invisible() else "fail: visible bisector points found"
        )
        stages["slice_reduction"] = (
            "pass" if sweep.slice_consistent() else "fail: level-0 slice disagrees"
        )
    except Exception as exc:
        sweep = None
        stages["invisibility"] = f"fail: {exc}"
        stages["slice_reduction"] = "fail: sweep unavailable"

    face_powers: list[int] = []
    face_margins: dict[int, float] = {}
    try:
        for j in (1, -1):
            target = gz if j == 1 else giz
            cloud = sample_bisector(
                BisectorSpec(z, target), cfg.face_samples, seed=(cfg.seed, j + 2**18)
            )
            worst_at_j = 0.0
            boundary = True
            for y in cloud.points:
                res = dirichlet_membership(y, z, gamma, cfg.power_range)
                m_j = res.margins[j]
                worst_at_j = max(worst_at_j, abs(m_j))
                others_ok = all(
                    res.margins[i] >= -FACE_BOUNDARY_TOL for i in res.margins if i != j
                )
                if abs(m_j) > FACE_BOUNDARY_TOL or not others_ok:
                    boundary = False
            face_margins[j] = worst_at_j
            if boundary:
                face_powers.append(j)
        stages["faces"] = (
            "pass" if sorted(face_powers) == [-1, 1] else f"fail: face powers {face_powers}"
        )
    except Exception as exc:
        stages["faces"] = f"fail: {exc}"

    wall = time.perf_counter() - t_start
    return VerificationReport(
        generator=gamma,
        basepoint=z,
        face_powers=sorted(face_powers),
        disjointness_margin=cert.margin if cert else math.nan,
        grid_margin=cert.grid_margin if cert else math.nan,
        collinearity_deviation=deviation,
        invisibility_fractions={j: s.fraction_invisible for j, s in sweep.per_power.items()}
        if sweep
        else {},
        invisibility_worst_margins={j: s.worst_margin for j, s in sweep.per_power.items()}
        if sweep
        else {},
        e0_consistent=sweep.slice_consistent() if sweep else False,
        face_margins=face_margins,
        stages=stages,
        seed=cfg.seed,
        tolerances={
            "visibility": VISIBILITY_TOL,
            "face_boundary": FACE_BOUNDARY_TOL,
            "disjoint_threshold": cfg.disjoint_threshold,
            "collinearity": cfg.collinearity_tol,
        },
        wall_clock_seconds=wall,
        counterexamples=[
            y for s in (sweep.per_power.values() if sweep else []) for y in s.counterexamples
        ],
    )
