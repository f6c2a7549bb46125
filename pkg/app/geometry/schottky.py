"""Schottky data: disk builder, invariant validation, Möbius jets and group files.

Every validation check produces an InvariantCheck carrying the measured
residual, so a failing group is reported rather than rejected silently.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from app.errors import DegenerateRadius, DisjointnessViolation, InvalidGroup, PoleEvaluation
from app.models import InvariantCheck, SchottkyData, ValidationReport
from app.words.alphabet import bar

logger = logging.getLogger(__name__)

POLE_TOLERANCE = 1e-14
DET_TOLERANCE = 1e-12
INVERSE_TOLERANCE = 1e-10
PAIRING_TOLERANCE = 1e-8
PAIRING_SAMPLES = 16


# ── Möbius calculus ──────────────────────────────────────────────────────────

@dataclass(frozen=True)
class MobiusJet:
    """Value of a Möbius map and its derivative data at one point."""
    value: complex
    first: complex
    log_second: complex
    log_third: complex


def mobius_jet(m: np.ndarray, z: complex) -> MobiusJet:
    """Jet of the map z -> (az+b)/(cz+d); assumes unit determinant."""
    a, b = m[0]
    c, d = m[1]
    denom = c * z + d
    if abs(denom) < POLE_TOLERANCE:
        raise PoleEvaluation(f"z={z} is the pole of the map")
    return MobiusJet(
        value=complex((a * z + b) / denom),
        first=complex(denom ** -2),
        log_second=complex(-2 * c / denom),
        log_third=complex(6 * c * c / denom ** 2),
    )


def mobius_apply(m: np.ndarray, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized image and first derivative of z under m (unit determinant)."""
    denom = m[1, 0] * z + m[1, 1]
    return (m[0, 0] * z + m[0, 1]) / denom, denom ** -2


# ── Construction ─────────────────────────────────────────────────────────────

def _check_disjoint(centers: list[float], radii: list[float]) -> float:
    """Largest overlap r_a + r_b - |c_a - c_b| over pairs (negative if disjoint)."""
    worst = -np.inf
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            worst = max(worst, radii[i] + radii[j] - abs(centers[i] - centers[j]))
    return float(worst)


def build_from_disks(centers: list[float], radii: list[float]) -> SchottkyData:
    """Build the Schottky group pairing disk a with disk bar(a)."""
    if len(centers) != len(radii) or len(centers) % 2 or len(centers) < 4:
        raise InvalidGroup("need 2r disks with r >= 2")
    if any(rad <= 0 for rad in radii):
        raise DegenerateRadius(f"radii must be positive, got {radii}")
    overlap = _check_disjoint(centers, radii)
    if overlap >= 0:
        raise DisjointnessViolation(f"closed disks intersect (overlap {overlap:.3g})")

    r = len(centers) // 2
    generators = []
    for a in range(1, 2 * r + 1):
        ab = bar(a, r)
        ca, cb = centers[a - 1], centers[ab - 1]
        ra, rb = radii[a - 1], radii[ab - 1]
        scale = 1.0 / np.sqrt(ra * rb)
        generators.append([[scale * ca, scale * (-ca * cb - ra * rb)],
                           [scale, -scale * cb]])
    return SchottkyData(r=r, centers=list(centers), radii=list(radii), generators=generators)


def reference_group() -> SchottkyData:
    """Four unit-diameter disks on the real line at -3, -1, 1, 3."""
    return build_from_disks([-3.0, -1.0, 1.0, 3.0], [0.5] * 4)


# ═══════════════════════════════════════════════════════════════════════════════
# Validation checks
# ═══════════════════════════════════════════════════════════════════════════════

CheckFn = Callable[[SchottkyData], InvariantCheck]


def _check_radii(g: SchottkyData) -> InvariantCheck:
    smallest = float(g.radius_array.min())
    return InvariantCheck(name="positive radii", passed=smallest > 0,
                          residual=max(0.0, -smallest))


def _check_disjointness(g: SchottkyData) -> InvariantCheck:
    overlap = _check_disjoint(g.centers, g.radii)
    return InvariantCheck(name="disjoint closed disks", passed=overlap < 0,
                          residual=max(0.0, overlap))


def _check_determinant(g: SchottkyData) -> InvariantCheck:
    dets = np.linalg.det(g.matrices)
    worst = int(np.argmax(np.abs(dets - 1)))
    residual = float(abs(dets[worst] - 1))
    return InvariantCheck(name="unit determinant", passed=residual <= DET_TOLERANCE,
                          residual=residual, detail=f"worst letter {worst + 1}")


def _check_inverse(g: SchottkyData) -> InvariantCheck:
    eye = np.eye(2)
    residual = 0.0
    for a in range(1, g.size + 1):
        prod = g.generator(bar(a, g.r)) @ g.generator(a)
        residual = max(residual, min(np.abs(prod - eye).max(), np.abs(prod + eye).max()))
    return InvariantCheck(name="barred generator is the inverse", residual=float(residual),
                          passed=residual <= INVERSE_TOLERANCE)


def _check_pairing(g: SchottkyData) -> InvariantCheck:
    theta = 2 * np.pi * np.arange(PAIRING_SAMPLES) / PAIRING_SAMPLES
    outside = float(np.max(g.center_array + g.radius_array)) + 10.0
    residual = 0.0
    inside_ok = True
    for a in range(1, g.size + 1):
        ab = bar(a, g.r)
        z = g.center(ab) + g.radius(ab) * np.exp(1j * theta)
        m = g.generator(a)
        with np.errstate(divide="ignore", invalid="ignore"):
            w, _ = mobius_apply(m, z)
            far, _ = mobius_apply(m, np.array([outside + 0j]))
        dist = np.abs(w - g.center(a))
        if not np.all(np.isfinite(dist)):
            residual = np.inf
            continue
        residual = max(residual, float(np.max(np.abs(dist - g.radius(a)))))
        if not abs(far[0] - g.center(a)) < g.radius(a):
            inside_ok = False
    return InvariantCheck(
        name="boundary pairing",
        passed=bool(residual <= PAIRING_TOLERANCE and inside_ok),
        residual=float(residual),
        detail="" if inside_ok else "exterior point not mapped into the paired disk",
    )


GROUP_CHECKS: list[CheckFn] = [
    _check_radii,
    _check_disjointness,
    _check_determinant,
    _check_inverse,
    _check_pairing,
]


def validate(data: SchottkyData) -> ValidationReport:
    """Run every invariant check; overall pass iff all pass."""
    checks = [check(data) for check in GROUP_CHECKS]
    return ValidationReport(passed=all(c.passed for c in checks), checks=checks)


# ── Group files ──────────────────────────────────────────────────────────────

def group_from_dict(payload: dict) -> SchottkyData:
    """Group from its JSON form; applies the builder when generators are absent."""
    centers = [float(c) for c in payload["centers"]]
    radii = [float(x) for x in payload["radii"]]
    if payload.get("r") is not None and 2 * int(payload["r"]) != len(centers):
        raise InvalidGroup(f"r={payload['r']} does not match {len(centers)} centers")
    if not payload.get("generators"):
        return build_from_disks(centers, radii)

    try:
        g = SchottkyData(r=len(centers) // 2, centers=centers, radii=radii,
                         generators=payload["generators"])
    except ValueError as e:
        raise InvalidGroup(str(e)) from e
    report = validate(g)
    if not report.passed:
        names = ", ".join(c.name for c in report.failures())
        raise InvalidGroup(f"group fails: {names}", report=report)
    return g


def load_group(path: str | Path | None) -> SchottkyData:
    """Load a group file; None means the reference group."""
    if path is None:
        return reference_group()
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    g = group_from_dict(payload)
    logger.info("Loaded group with r=%d from %s", g.r, path)
    return g


def dump_group(g: SchottkyData, path: str | Path) -> None:
    Path(path).write_text(json.dumps(g.model_dump(), indent=2), encoding="utf-8")
