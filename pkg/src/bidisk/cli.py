"""Command-line surface for the bidisk geometry toolkit.

Subcommands: classify, distance, geodesic, busemann, bisector-sample,
dirichlet-verify, accumulation-check.  Every artifact embeds the tool
version, report version, seed, and tolerances, and is byte-identical across
reruns with the same configuration (timing is opt-in via --timing since it
would break that contract).

Exit codes:
  0  success
  2  malformed input or failed validation
  3  matrix does not preserve the declared Hermitian form
  4  level-set bracketing failure (partial CSV retained)
  5  wrong isometry class for the requested operation
  6  disjointness certification below threshold
  7  invisibility sweep found visible bisector points
  8  collinearity or face confirmation failure
  9  accumulation check did not converge
  1  unexpected internal error
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .dirichlet import TwoFaceConfig, two_face_verify
from .equidistant import BisectorSpec, boundary_accumulation_check, sample_bisector
from .errors import (
    BadParameter,
    BracketFailure,
    GeometryError,
    NotBoundary,
    NotInterior,
    NotUnitaryForForm,
    WrongClass,
)
from .hyperbolic import (
    boundary_asymptotic_residual,
    busemann_closed,
    busemann_limit,
    BallPoint,
    distance,
    geodesic_point,
)
from .io import (
    REPORT_VERSION,
    accumulation_report_to_json,
    ball_point_from_json,
    ball_point_to_json,
    bidisk_point_from_json,
    boundary_point_from_json,
    canonical_json,
    classification_to_json,
    matrix_from_json,
    sample_cloud_to_csv,
    sample_cloud_to_svg,
    verification_report_to_json,
)
from .product import BidiskPoint, rho


def _load_json_arg(arg: str):
    """Accept either a file path or an inline JSON object."""
    text = arg
    if not arg.lstrip().startswith("{"):
        with open(arg, "r", encoding="utf-8") as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise BadParameter(f"malformed JSON in {arg!r}: {exc}") from exc


def _envelope(args, payload: dict) -> dict:
    return {
        "tool": "bidisk",
        "version": __version__,
        "report_version": REPORT_VERSION,
        "seed": args.seed,
        "tolerances": {"tol": args.tol},
        **payload,
    }


def _write(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, payload: dict) -> None:
    _write(args, canonical_json(_envelope(args, payload)) + "\n")


def _point_any(data):
    if isinstance(data, dict) and "first" in data:
        return bidisk_point_from_json(data)
    return ball_point_from_json(data)


def cmd_classify(args) -> int:
    g = matrix_from_json(_load_json_arg(args.matrix))
    _emit_json(args, {"classification": classification_to_json(g)})
    return 0


def cmd_distance(args) -> int:
    a = _point_any(_load_json_arg(args.point_a))
    b = _point_any(_load_json_arg(args.point_b))
    if isinstance(a, BidiskPoint) != isinstance(b, BidiskPoint):
        raise BadParameter("both points must be ball points or both bidisk points")
    if isinstance(a, BidiskPoint):
        payload = {"space": "bidisk", "distance": rho(a, b)}
    else:
        payload = {"space": "ball", "distance": distance(a, b)}
    _emit_json(args, payload)
    return 0


def cmd_geodesic(args) -> int:
    x = ball_point_from_json(_load_json_arg(args.point_a))
    y = ball_point_from_json(_load_json_arg(args.point_b))
    ts = [float(t) for t in args.t]
    pts = [geodesic_point(x, y, t) for t in ts]
    _emit_json(
        args,
        {
            "distance": distance(x, y),
            "points": [
                {"t": t, "point": ball_point_to_json(p)} for t, p in zip(ts, pts)
            ],
        },
    )
    return 0


def cmd_busemann(args) -> int:
    z = ball_point_from_json(_load_json_arg(args.point))
    xi = boundary_point_from_json(_load_json_arg(args.boundary))
    depths = [float(d) for d in args.depths]
    closed = busemann_closed(z, xi)
    curve = []
    for d in depths:
        lim = busemann_limit(z, xi, d)
        r = 1.0 - d
        x_n = BallPoint._from_affine(r * xi.z1, r * xi.z2, d * (2.0 - d))
        curve.append(
            {
                "depth": d,
                "limit_estimate": lim,
                "limit_gap": abs(lim - closed),
                "asymptotic_residual": boundary_asymptotic_residual(z, xi, x_n),
            }
        )
    _emit_json(args, {"closed_form": closed, "curve": curve})
    return 0


def cmd_bisector_sample(args) -> int:
    z = bidisk_point_from_json(_load_json_arg(args.point_z))
    w = bidisk_point_from_json(_load_json_arg(args.point_w))
    spec = BisectorSpec(z, w)
    try:
        cloud = sample_bisector(spec, args.n, seed=args.seed)
    except BracketFailure as exc:
        # Retain whatever fraction was produced before the failure.
        partial = sample_bisector(spec, 0, seed=args.seed)
        text = sample_cloud_to_csv(partial, footer=f"BracketFailure: {exc} (k={exc.k})")
        _write(args, text)
        print(f"error: {exc}", file=sys.stderr)
        return 4
    if args.format == "svg":
        _write(args, sample_cloud_to_svg(cloud))
    elif args.format == "json":
        _emit_json(
            args,
            {
                "n": len(cloud),
                "max_residual": cloud.max_residual(),
                "rows": [
                    {
                        "point": {
                            "first": ball_point_to_json(p.first),
                            "second": ball_point_to_json(p.second),
                        },
                        "k": k,
                        "residual": r,
                    }
                    for p, k, r in zip(cloud.points, cloud.k_values, cloud.residuals)
                ],
            },
        )
    else:
        _write(args, sample_cloud_to_csv(cloud))
    return 0


def cmd_dirichlet_verify(args) -> int:
    g1 = matrix_from_json(_load_json_arg(args.g1))
    g2 = matrix_from_json(_load_json_arg(args.g2))
    basepoint = None
    if args.off_axis_basepoint:
        basepoint = bidisk_point_from_json(_load_json_arg(args.off_axis_basepoint))
    cfg = TwoFaceConfig(
        power_range=args.power_range,
        samples_per_bisector=args.samples,
        face_samples=args.face_samples,
        restarts=args.restarts,
        seed=args.seed,
        disjoint_threshold=args.threshold,
        basepoint=basepoint,
    )
    report = two_face_verify(g1, g2, cfg)
    payload = verification_report_to_json(report, include_timing=args.timing)
    if basepoint is not None:
        payload["experimental_off_axis"] = True
        payload["note"] = "off-axis basepoints carry no two-face guarantee"
    _emit_json(args, payload)
    if report.passed or basepoint is not None:
        return 0 if report.passed else 8
    if not report.stages.get("disjointness", "").startswith("pass"):
        return 6
    if not report.stages.get("invisibility", "").startswith("pass"):
        return 7
    return 8


def cmd_accumulation_check(args) -> int:
    a = ball_point_from_json(_load_json_arg(args.point_a))
    b = ball_point_from_json(_load_json_arg(args.point_b))
    depths = [float(d) for d in args.depths]
    report = boundary_accumulation_check(a, b, args.k, depths, seed=args.seed)
    _emit_json(args, {"accumulation": accumulation_report_to_json(report)})
    return 0 if report.converged else 9


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="seed echoed into every artifact")
    p.add_argument("--tol", type=float, default=1e-9, help="tolerance override, recorded in output")
    p.add_argument("--out", type=str, default=None, help="output path (default stdout)")
    p.add_argument("--threads", type=int, default=1,
                   help="worker count; results are independent of it by seeding design")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bidisk", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=f"bidisk {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="classify an isometry matrix")
    c.add_argument("matrix", help="matrix JSON (path or inline)")
    _add_common(c)
    c.set_defaults(func=cmd_classify)

    c = sub.add_parser("distance", help="distance between two points (ball or bidisk)")
    c.add_argument("point_a")
    c.add_argument("point_b")
    _add_common(c)
    c.set_defaults(func=cmd_distance)

    c = sub.add_parser("geodesic", help="evaluate the geodesic through two ball points")
    c.add_argument("point_a")
    c.add_argument("point_b")
    c.add_argument("--t", nargs="+", required=True, help="arclength parameters")
    _add_common(c)
    c.set_defaults(func=cmd_geodesic)

    c = sub.add_parser("busemann", help="closed form, limit estimates, residual curve")
    c.add_argument("point", help="interior point JSON")
    c.add_argument("boundary", help="boundary point JSON")
    c.add_argument("--depths", nargs="+", default=["1e-4", "1e-5", "1e-6", "1e-7", "1e-8"])
    _add_common(c)
    c.set_defaults(func=cmd_busemann)

    c = sub.add_parser("bisector-sample", help="sample an equidistant hypersurface")
    c.add_argument("point_z")
    c.add_argument("point_w")
    c.add_argument("--n", type=int, default=100)
    c.add_argument("--format", choices=["csv", "json", "svg"], default="csv")
    _add_common(c)
    c.set_defaults(func=cmd_bisector_sample)

    c = sub.add_parser("dirichlet-verify", help="two-face verification for a loxodromic pair")
    c.add_argument("g1", help="first factor matrix JSON")
    c.add_argument("g2", help="second factor matrix JSON")
    c.add_argument("--power-range", type=int, default=6)
    c.add_argument("--samples", type=int, default=500)
    c.add_argument("--face-samples", type=int, default=100)
    c.add_argument("--restarts", type=int, default=50)
    c.add_argument("--threshold", type=float, default=1e-4)
    c.add_argument("--timing", action="store_true",
                   help="include wall-clock time (breaks byte-determinism)")
    c.add_argument("--off-axis-basepoint", type=str, default=None,
                   help="EXPERIMENTAL: basepoint off the axes; no pass/fail contract")
    _add_common(c)
    c.set_defaults(func=cmd_dirichlet_verify)

    c = sub.add_parser("accumulation-check", help="level-set boundary accumulation experiment")
    c.add_argument("point_a")
    c.add_argument("point_b")
    c.add_argument("--k", type=float, default=0.0)
    c.add_argument("--depths", nargs="+", default=["1e-4", "1e-5", "1e-6", "1e-7"])
    _add_common(c)
    c.set_defaults(func=cmd_accumulation_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except NotUnitaryForForm as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except BracketFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except WrongClass as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5
    except (BadParameter, NotInterior, NotBoundary, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GeometryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
