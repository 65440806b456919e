"""Serialization: canonical JSON, CSV clouds, SVG scatters, input parsing.

Complex numbers serialize as [re, im] pairs.  Floats are written with 17
significant digits (round-trip exact for doubles), so identical inputs and
seeds produce byte-identical artifacts.
"""
from __future__ import annotations

import json
import math

import numpy as np

from .dirichlet import VerificationReport
from .equidistant import AccumulationReport, SampleCloud
from .errors import BadParameter
from .forms import FormKind, ball_form, siegel_form
from .hyperbolic import BallPoint, BoundaryPoint
from .isometry import (
    IsometryType,
    SpecialUnitaryElement,
    classify,
    fixed_boundary_points,
    translation_length,
    verify_membership,
)
from .product import BidiskIsometry, BidiskPoint

REPORT_VERSION = 1


def format_float(x: float) -> str:
    if isinstance(x, bool):
        raise BadParameter("booleans are not floats")
    if math.isnan(x):
        return "null"
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(float(x), ".17g")


def canonical_json(obj, indent: int = 0) -> str:
    """Deterministic JSON: insertion-ordered keys, 17-digit floats, LF only."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, complex):
        return canonical_json([obj.real, obj.imag])
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{inner}{json.dumps(str(k))}: {canonical_json(v, indent + 1)}"
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        flat = all(isinstance(v, (int, float, complex, np.integer, np.floating)) for v in seq)
        if flat:
            return "[" + ", ".join(canonical_json(v) for v in seq) + "]"
        items = [f"{inner}{canonical_json(v, indent + 1)}" for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise BadParameter(f"cannot serialize object of type {type(obj)!r}")


# --- parsing ----------------------------------------------------------------


def complex_from_pair(pair) -> complex:
    if not isinstance(pair, (list, tuple)) or len(pair) != 2:
        raise BadParameter(f"expected [re, im], got {pair!r}")
    return complex(float(pair[0]), float(pair[1]))


def ball_point_from_json(data) -> BallPoint:
    if not isinstance(data, dict) or "z1" not in data or "z2" not in data:
        raise BadParameter('ball point JSON needs keys "z1" and "z2"')
    return BallPoint(complex_from_pair(data["z1"]), complex_from_pair(data["z2"]))


def boundary_point_from_json(data) -> BoundaryPoint:
    if not isinstance(data, dict) or "z1" not in data or "z2" not in data:
        raise BadParameter('boundary point JSON needs keys "z1" and "z2"')
    return BoundaryPoint(complex_from_pair(data["z1"]), complex_from_pair(data["z2"]))


def bidisk_point_from_json(data) -> BidiskPoint:
    if not isinstance(data, dict) or "first" not in data or "second" not in data:
        raise BadParameter('bidisk point JSON needs keys "first" and "second"')
    return BidiskPoint(
        ball_point_from_json(data["first"]), ball_point_from_json(data["second"])
    )


_FORMS = {"ball": ball_form, "siegel": siegel_form}


def matrix_from_json(data) -> SpecialUnitaryElement:
    if not isinstance(data, dict) or "matrix" not in data:
        raise BadParameter('matrix JSON needs keys "form" and "matrix"')
    form_name = data.get("form", "ball")
    if form_name not in _FORMS:
        raise BadParameter(f'unknown form "{form_name}" (expected "ball" or "siegel")')
    rows = data["matrix"]
    if not isinstance(rows, list) or len(rows) != 3:
        raise BadParameter("matrix must have 3 rows")
    m = np.array(
        [[complex_from_pair(entry) for entry in row] for row in rows], dtype=complex
    )
    return verify_membership(m, _FORMS[form_name]())


# --- emission ---------------------------------------------------------------


def complex_to_pair(c: complex) -> list[float]:
    return [float(c.real), float(c.imag)]


def ball_point_to_json(p: BallPoint) -> dict:
    return {"z1": complex_to_pair(p.z1), "z2": complex_to_pair(p.z2)}


def boundary_point_to_json(p: BoundaryPoint) -> dict:
    return {"z1": complex_to_pair(p.z1), "z2": complex_to_pair(p.z2)}


def bidisk_point_to_json(p: BidiskPoint) -> dict:
    return {"first": ball_point_to_json(p.first), "second": ball_point_to_json(p.second)}


def matrix_to_json(g: SpecialUnitaryElement) -> dict:
    kind = g.form.kind
    name = "ball" if kind is FormKind.BALL else "siegel" if kind is FormKind.SIEGEL else "custom"
    return {
        "form": name,
        "matrix": [[complex_to_pair(g.matrix[i, j]) for j in range(3)] for i in range(3)],
    }


def bidisk_isometry_to_json(gamma: BidiskIsometry) -> dict:
    return {
        "g1": matrix_to_json(gamma.g1),
        "g2": matrix_to_json(gamma.g2),
        "swap": gamma.swap,
    }


def bidisk_isometry_from_json(data) -> BidiskIsometry:
    if not isinstance(data, dict) or "g1" not in data or "g2" not in data:
        raise BadParameter('bidisk isometry JSON needs keys "g1", "g2", "swap"')
    return BidiskIsometry(
        matrix_from_json(data["g1"]),
        matrix_from_json(data["g2"]),
        bool(data.get("swap", False)),
    )


def classification_to_json(g: SpecialUnitaryElement) -> dict:
    cls = classify(g)
    out = {
        "class": cls.label.value,
        "eigenvalue_moduli": list(cls.eigenvalue_moduli),
        "eigenvalue_args": list(cls.eigenvalue_args),
        "sign_classes": [s.value for s in cls.sign_classes],
    }
    if cls.label is IsometryType.LOXODROMIC:
        att, rep = fixed_boundary_points(g)
        out["fixed_points"] = [boundary_point_to_json(att), boundary_point_to_json(rep)]
        out["translation_length"] = translation_length(g)
    elif cls.label is IsometryType.PARABOLIC:
        pts = fixed_boundary_points(g)
        out["fixed_points"] = [boundary_point_to_json(p) for p in pts]
    else:
        out["fixed_points"] = []
    return out


CSV_HEADER = "x1_re,x1_im,x2_re,x2_im,y1_re,y1_im,y2_re,y2_im,k,residual"


def sample_cloud_to_csv(cloud: SampleCloud, footer: "str | None" = None) -> str:
    lines = [CSV_HEADER]
    for p, k, r in zip(cloud.points, cloud.k_values, cloud.residuals):
        vals = [
            p.first.z1.real, p.first.z1.imag, p.first.z2.real, p.first.z2.imag,
            p.second.z1.real, p.second.z1.imag, p.second.z2.real, p.second.z2.imag,
            k, r,
        ]
        lines.append(",".join(format(v, ".17g") for v in vals))
    if footer:
        lines.append(f"# {footer}")
    return "\n".join(lines) + "\n"


def sample_cloud_to_svg(cloud: SampleCloud, size: int = 420) -> str:
    """Two unit-disk scatter panels: first-factor z1 plane, second-factor z1 plane."""
    half = size / 2.0
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{2 * size + 20}" height="{size}" '
        f'viewBox="0 0 {2 * size + 20} {size}">'
    ]
    for panel, pick in enumerate((lambda p: p.first.z1, lambda p: p.second.z1)):
        ox = panel * (size + 20) + half
        parts.append(
            f'<circle cx="{ox}" cy="{half}" r="{half - 2}" fill="none" stroke="#888"/>'
        )
        for p in cloud.points:
            c = pick(p)
            x = ox + c.real * (half - 2)
            y = half - c.imag * (half - 2)
            parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="1.5" fill="#1f6fb2"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def accumulation_report_to_json(report: AccumulationReport) -> dict:
    return {
        "k": report.k,
        "seed": report.seed,
        "converged": report.converged,
        "accumulation_direction": boundary_point_to_json(report.accumulation_direction)
        if report.accumulation_direction is not None
        else None,
        "limit_mismatch": report.limit_mismatch,
        "entries": [
            {
                "depth": e.depth,
                "theta": e.theta,
                "direction": boundary_point_to_json(e.direction),
                "busemann_mismatch": e.busemann_mismatch,
                "level_coefficient": e.level_coefficient,
                "f_residual": e.f_residual,
                "angle_to_limit": e.angle_to_limit,
                "status": e.status,
            }
            for e in report.entries
        ],
        "failures": list(report.failures),
    }


def verification_report_to_json(report: VerificationReport, include_timing: bool = False) -> dict:
    out = {
        "report_version": REPORT_VERSION,
        "generator": bidisk_isometry_to_json(report.generator),
        "basepoint": bidisk_point_to_json(report.basepoint),
        "face_powers": sorted(report.face_powers),
        "disjointness_margin": report.disjointness_margin,
        "grid_margin": report.grid_margin,
        "collinearity_deviation": report.collinearity_deviation,
        "invisibility": {
            str(j): {
                "fraction_invisible": report.invisibility_fractions[j],
                "worst_margin": report.invisibility_worst_margins[j],
            }
            for j in sorted(report.invisibility_fractions)
        },
        "e0_slice_consistent": report.e0_consistent,
        "face_margins": {str(j): v for j, v in sorted(report.face_margins.items())},
        "stages": dict(report.stages),
        "seed": report.seed,
        "tolerances": dict(report.tolerances),
        "passed": report.passed,
    }
    if include_timing:
        out["wall_clock_seconds"] = report.wall_clock_seconds
    return out
