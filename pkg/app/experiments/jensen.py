"""Jensen audit: located zeros against the circle mean of log|zeta|."""

from __future__ import annotations

import logging
from typing import Optional

from app.config import JENSEN_NODES
from app.models import Disk, JensenAudit, SchottkyData
from app.spectral.contour import jensen_disk, jensen_sides, locate_zeros, zero_count_bound
from app.spectral.representations import RepProvider
from app.spectral.zeta import ZetaFunction, ZetaKind, hausdorff_dimension

logger = logging.getLogger(__name__)

DISK_FACTOR = 1.05


def jensen_audit(rep: RepProvider, g: SchottkyData, kind: Optional[ZetaKind] = None,
                 disk: Optional[Disk] = None, degree: Optional[int] = None,
                 delta: Optional[float] = None, sigma0_fraction: float = 0.8, height: float = 1.0,
                 nodes: Optional[int] = None, contour_nodes: Optional[int] = None,
                 strict: Optional[bool] = None) -> JensenAudit:
    """|lhs - rhs| of Jensen's formula; the default disk encloses Rect(sigma0, H).

    A zero on the circle raises BoundaryZeroSuspected instead of moving the disk.
    """
    kind = kind or ZetaKind.standard()
    if disk is None:
        if delta is None:
            delta = hausdorff_dimension(g, degree=degree).delta
        disk = jensen_disk(delta, sigma0_fraction * delta, height, DISK_FACTOR)
    zeta = ZetaFunction(kind, g, rep, degree, strict=strict)
    report = locate_zeros(zeta, disk, nodes=contour_nodes, allow_dilation=False)
    lhs, rhs, log_sup = jensen_sides(zeta, disk, report.zeros, nodes or JENSEN_NODES)
    bound = zero_count_bound(log_sup, disk.radius, disk.radius / DISK_FACTOR)
    audit = JensenAudit(center_re=disk.center_re, center_im=disk.center_im, radius=disk.radius,
                        lhs=lhs, rhs=rhs, residual=abs(lhs - rhs), zeros=report.zeros,
                        count_bound=bound)
    logger.info("Jensen audit on %s: lhs=%.6f rhs=%.6f residual=%.2e (%d zeros, bound %.1f)",
                disk, lhs, rhs, audit.residual, report.multiplicity_sum, bound)
    return audit
