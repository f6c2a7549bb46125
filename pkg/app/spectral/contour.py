"""Zero counting and location for zeta functions by the argument principle.

Winding numbers are (1/2 pi i) times the contour integral of zeta'/zeta. Rectangle
edges carry Gauss-Legendre nodes in proportion to their length; circles use
the periodic trapezoid rule. Node counts double until two successive
windings agree and sit on an integer.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Protocol, Sequence, Union

import numpy as np

from app.config import (
    BOUNDARY_ZERO_RATIO,
    CONTOUR_NODES,
    INTEGER_TOLERANCE,
    JENSEN_NODES,
    LOCATE_MAX_DEPTH,
    MAX_CONTOUR_NODES,
    NEWTON_MAX_STEPS,
)
from app.errors import (
    BoundaryZeroSuspected,
    MaxDepthExceeded,
    NewtonDiverged,
    NonIntegerWinding,
    NumericalError,
    SingularMatrix,
)
from app.models import Disk, Rectangle, ZeroRecord, ZeroReport

logger = logging.getLogger(__name__)

Region = Union[Rectangle, Disk]

CUT_FRACTIONS = (0.5173, 0.4391, 0.6127)
DILATION = 1.01


class Holomorphic(Protocol):
    def value(self, s: complex) -> complex: ...
    def value_and_log_derivative(self, s: complex) -> tuple[complex, complex]: ...


@dataclass
class ContourResult:
    winding: int
    raw: complex
    nodes: int
    boundary_max: float
    region: Region


# ── Quadrature rules ─────────────────────────────────────────────────────────

def _rectangle_rule(rect: Rectangle, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Points and complex weights ds for the counter-clockwise boundary."""
    corners = [complex(rect.re_min, rect.im_min), complex(rect.re_max, rect.im_min),
               complex(rect.re_max, rect.im_max), complex(rect.re_min, rect.im_max)]
    lengths = [abs(corners[(i + 1) % 4] - corners[i]) for i in range(4)]
    perimeter = sum(lengths)
    points, weights = [], []
    for i in range(4):
        start, end = corners[i], corners[(i + 1) % 4]
        count = max(8, int(round(nodes * lengths[i] / perimeter)))
        t, w = np.polynomial.legendre.leggauss(count)
        points.append(start + (end - start) * (t + 1) / 2)
        weights.append(w * (end - start) / 2)
    return np.concatenate(points), np.concatenate(weights)


def _circle_rule(disk: Disk, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    theta = 2 * np.pi * np.arange(nodes) / nodes
    e = np.exp(1j * theta)
    return disk.center + disk.radius * e, 1j * disk.radius * e * (2 * np.pi / nodes)


def _rule(region: Region, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(region, Disk):
        return _circle_rule(region, nodes)
    return _rectangle_rule(region, nodes)


# ── Counting ─────────────────────────────────────────────────────────────────

def _integrate(zeta: Holomorphic, region: Region, nodes: int) -> tuple[complex, float]:
    points, weights = _rule(region, nodes)
    values = np.empty(len(points), dtype=complex)
    logds = np.empty(len(points), dtype=complex)
    for i, s in enumerate(points):
        try:
            values[i], logds[i] = zeta.value_and_log_derivative(complex(s))
        except SingularMatrix as exc:
            raise BoundaryZeroSuspected(f"zeta vanishes on the contour at {s}") from exc
    mags = np.abs(values)
    if mags.min() < BOUNDARY_ZERO_RATIO * mags.max():
        raise BoundaryZeroSuspected(f"|zeta| drops to {mags.min():.2e} on the contour")
    return complex(np.sum(logds * weights) / (2j * np.pi)), float(mags.max())


def _winding(zeta: Holomorphic, region: Region, nodes: int) -> ContourResult:
    previous: Optional[complex] = None
    n = nodes
    while True:
        raw, peak = _integrate(zeta, region, n)
        near = round(raw.real)
        settled = abs(raw - near) <= INTEGER_TOLERANCE
        if previous is not None and settled and abs(raw - previous) <= INTEGER_TOLERANCE:
            return ContourResult(int(near), raw, n, peak, region)
        if n >= MAX_CONTOUR_NODES:
            if settled:
                return ContourResult(int(near), raw, n, peak, region)
            raise NonIntegerWinding(f"winding {raw.real:.6f}{raw.imag:+.6f}i with {n} nodes")
        previous, n = raw, min(2 * n, MAX_CONTOUR_NODES)


def contour_count(zeta: Holomorphic, region: Region, nodes: Optional[int] = None,
                  allow_dilation: bool = True) -> ContourResult:
    nodes = nodes or CONTOUR_NODES
    if region.area == 0:
        return ContourResult(0, 0j, 0, 0.0, region)
    try:
        return _winding(zeta, region, nodes)
    except BoundaryZeroSuspected:
        if not allow_dilation:
            raise
        logger.warning("Zero suspected on the contour; retrying on a 1%% dilation")
        return _winding(zeta, region.dilated(DILATION), nodes)


def count_zeros(zeta: Holomorphic, region: Region, nodes: Optional[int] = None,
                allow_dilation: bool = True) -> int:
    return contour_count(zeta, region, nodes, allow_dilation).winding


# ── Location ─────────────────────────────────────────────────────────────────

def _newton(zeta: Holomorphic, start: complex, multiplicity: int, tol: float,
            box: Rectangle) -> Optional[complex]:
    s = start
    for _ in range(NEWTON_MAX_STEPS):
        try:
            _, logd = zeta.value_and_log_derivative(s)
        except SingularMatrix:
            return s
        if logd == 0:
            return None
        step = multiplicity / logd
        s = s - step
        if not box.contains(s):
            return None
        if abs(step) < tol:
            return s
    return None


def _split(cell: Rectangle, fraction: float) -> tuple[Rectangle, Rectangle]:
    width, height = cell.re_max - cell.re_min, cell.im_max - cell.im_min
    if width >= height:
        cut = cell.re_min + fraction * width
        return (Rectangle(re_min=cell.re_min, re_max=cut, im_min=cell.im_min, im_max=cell.im_max),
                Rectangle(re_min=cut, re_max=cell.re_max, im_min=cell.im_min, im_max=cell.im_max))
    cut = cell.im_min + fraction * height
    return (Rectangle(re_min=cell.re_min, re_max=cell.re_max, im_min=cell.im_min, im_max=cut),
            Rectangle(re_min=cell.re_min, re_max=cell.re_max, im_min=cut, im_max=cell.im_max))


class _Locator:
    def __init__(self, zeta: Holomorphic, tol: float, nodes: int, max_depth: int):
        self.zeta = zeta
        self.tol = tol
        self.nodes = nodes
        self.max_depth = max_depth
        self.found: list[tuple[complex, int]] = []

    def resolve(self, cell: Rectangle, k: int, depth: int) -> None:
        if k == 0:
            return
        if depth > self.max_depth:
            raise MaxDepthExceeded(f"cell {cell} still holds {k} zeros at depth {depth}")
        z = _newton(self.zeta, cell.center, k, self.tol, cell)
        if z is not None and (k == 1 or self._confirm(z, k, cell)):
            self.found.append((z, k))
            return
        if depth == self.max_depth:
            raise NewtonDiverged(f"Newton failed in {cell} holding {k} zeros")
        self.resolve_split(cell, k, depth)

    def _confirm(self, z: complex, k: int, cell: Rectangle) -> bool:
        radius = max(1e-3 * cell.diameter, 1e3 * self.tol)
        try:
            return contour_count(self.zeta, Disk(center_re=z.real, center_im=z.imag, radius=radius),
                                 self.nodes, allow_dilation=False).winding == k
        except NumericalError:
            return False

    def resolve_split(self, cell: Rectangle, k: int, depth: int) -> None:
        last_error: Optional[NumericalError] = None
        for fraction in CUT_FRACTIONS:
            halves = _split(cell, fraction)
            try:
                counts = [contour_count(self.zeta, h, self.nodes, allow_dilation=False).winding
                          for h in halves]
            except (BoundaryZeroSuspected, NonIntegerWinding) as exc:
                last_error = exc
                continue
            if sum(counts) != k:
                logger.warning("Subcell windings %s do not add up to %d; trying another cut", counts, k)
                continue
            for half, count in zip(halves, counts):
                self.resolve(half, count, depth + 1)
            return
        if last_error is not None:
            raise last_error
        raise NonIntegerWinding(f"no consistent cut of {cell} holding {k} zeros")


def locate_zeros(zeta: Holomorphic, region: Region, tol: float = 1e-10,
                 nodes: Optional[int] = None, max_depth: Optional[int] = None,
                 allow_dilation: bool = True) -> ZeroReport:
    """Zeros of zeta inside region, with multiplicities summing to the winding number.

    A zero on the boundary moves the count to a 1% dilation unless
    allow_dilation is False; the report then carries the dilated region.
    """
    nodes = nodes or CONTOUR_NODES
    outer = contour_count(zeta, region, nodes, allow_dilation)
    if outer.region is not region:
        logger.info("Zeros reported for the dilated region %s", outer.region)
    if outer.winding == 0:
        return ZeroReport(region=outer.region, winding=0, zeros=[])

    if isinstance(outer.region, Disk):
        search = outer.region.bounding_rectangle(margin=0.02)
        total = contour_count(zeta, search, nodes, allow_dilation).winding
    else:
        search, total = outer.region, outer.winding

    locator = _Locator(zeta, tol, nodes, max_depth or LOCATE_MAX_DEPTH)
    locator.resolve(search, total, 0)

    zeros = []
    for z, k in sorted(locator.found, key=lambda item: (item[0].real, item[0].imag)):
        if not outer.region.contains(z):
            continue
        residual = abs(zeta.value(z)) / outer.boundary_max
        zeros.append(ZeroRecord(re=z.real, im=z.imag, multiplicity=k, residual=residual))
    report = ZeroReport(region=outer.region, winding=outer.winding, zeros=zeros)
    if report.multiplicity_sum != outer.winding:
        logger.warning("Located multiplicities %d differ from winding %d",
                       report.multiplicity_sum, outer.winding)
    return report


# ── Jensen bookkeeping ───────────────────────────────────────────────────────

def jensen_sides(zeta: Holomorphic, disk: Disk, zeros: Sequence[ZeroRecord],
                 nodes: Optional[int] = None) -> tuple[float, float, float]:
    """Both sides of Jensen's formula on the disk, plus sup log|zeta/zeta(b)| on its circle.

    lhs = sum over zeros of log(R/|z-b|), rhs = circle mean of log|zeta| - log|zeta(b)|.
    """
    nodes = nodes or JENSEN_NODES
    b, R = disk.center, disk.radius
    lhs = sum(z.multiplicity * np.log(R / abs(z.s - b)) for z in zeros if abs(z.s - b) < R)
    points, _ = _circle_rule(disk, nodes)
    mags = np.array([abs(zeta.value(complex(s))) for s in points])
    if mags.min() < BOUNDARY_ZERO_RATIO * mags.max():
        raise BoundaryZeroSuspected(f"|zeta| drops to {mags.min():.2e} on the Jensen circle")
    logs = np.log(mags)
    at_center = float(np.log(abs(zeta.value(b))))
    return float(lhs), float(logs.mean() - at_center), float(logs.max() - at_center)


def jensen_disk(delta: float, sigma0: float, height: float, factor: float = 1.05) -> Disk:
    """Disk centred mid-way along [sigma0, delta], radius factor x the reach to the corners of Rect.

    The centre stays off delta, where the untwisted zeta vanishes.
    """
    mid = (sigma0 + delta) / 2
    reach = float(np.hypot(delta - mid, height))
    return Disk(center_re=mid, center_im=0.0, radius=factor * reach)


def zero_count_bound(log_sup: float, radius: float, inner_radius: float) -> float:
    """Zeros in the inner disk are at most sup log|zeta/zeta(b)| / log(R/R')."""
    return log_sup / np.log(radius / inner_radius)
