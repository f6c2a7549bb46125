"""Bergman space of a disk: orthonormal monomial basis, kernel, principal powers."""

from __future__ import annotations

import numpy as np

from app.errors import BranchCutHit, OutsideDisk
from app.models import SchottkyData

BRANCH_TOLERANCE = 1e-14


def basis_scale(degree: int, radius: float) -> np.ndarray:
    """sqrt((m+1)/(pi r^2)) for m = 0..degree."""
    return np.sqrt((np.arange(degree + 1) + 1) / (np.pi * radius * radius))


def basis_values(center: float, radius: float, z: np.ndarray, degree: int) -> np.ndarray:
    """e_m(z) = sqrt((m+1)/(pi r^2)) ((z-c)/r)^m, stacked on a trailing axis."""
    u = (np.asarray(z) - center) / radius
    powers = u[..., None] ** np.arange(degree + 1)
    return powers * basis_scale(degree, radius)


def kernel(center: float, radius: float, x1, x2):
    """Closed-form Bergman kernel of the disk |z - center| < radius (vectorized)."""
    r2 = radius * radius
    return r2 / (np.pi * (r2 - np.conj(x2 - center) * (x1 - center)) ** 2)


def bergman_kernel(a: int, x1: complex, x2: complex, g: SchottkyData) -> complex:
    c, rad = g.center(a), g.radius(a)
    for x in (x1, x2):
        if abs(x - c) >= rad:
            raise OutsideDisk(f"{x} is not inside D_{a}")
    return complex(kernel(c, rad, x1, x2))


def principal_log(base):
    """Principal logarithm, refusing points on the negative real axis."""
    base = np.asarray(base, dtype=complex)
    hit = (base.real <= 0) & (np.abs(base.imag) <= BRANCH_TOLERANCE)
    if np.any(hit):
        raise BranchCutHit("derivative weight on the negative real axis")
    return np.log(base)


def complex_power(base, s: complex):
    """exp(s * Log(base)) on the principal branch."""
    out = np.exp(s * principal_log(base))
    return complex(out) if np.ndim(out) == 0 else out
