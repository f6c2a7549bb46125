from __future__ import annotations

import numpy as np
import pytest

from app.errors import BranchCutHit, OutsideDisk
from app.models import SchottkyData
from app.spectral.bergman import basis_values, bergman_kernel, complex_power, kernel


def _disk_gram(center: float, radius: float, degree: int) -> np.ndarray:
    t, w = np.polynomial.legendre.leggauss(40)
    rho = radius * (t + 1) / 2
    theta = 2 * np.pi * np.arange(64) / 64
    z = center + (rho[:, None] * np.exp(1j * theta)[None, :]).ravel()
    weights = np.repeat((w * radius / 2 * rho)[:, None], 64, axis=1).ravel() * (2 * np.pi / 64)
    e = basis_values(center, radius, z, degree)
    return np.einsum("p,pm,pn->mn", weights, e, np.conj(e))


def test_monomial_basis_is_orthonormal() -> None:
    assert np.allclose(_disk_gram(-1.0, 0.5, 6), np.eye(7), atol=1e-10)


@pytest.mark.parametrize("center, radius", [(-3.0, 0.5), (1.0, 0.25)])
def test_basis_stays_orthonormal_up_to_degree_twenty(center: float, radius: float) -> None:
    assert np.allclose(_disk_gram(center, radius, 20), np.eye(21), atol=1e-8)


def test_kernel_is_the_basis_series() -> None:
    c, r = 1.0, 0.5
    x1, x2 = c + 0.1 + 0.05j, c - 0.12j
    series = np.sum(basis_values(c, r, x1, 120) * np.conj(basis_values(c, r, x2, 120)))
    assert kernel(c, r, x1, x2) == pytest.approx(series, rel=1e-10)


def test_kernel_on_the_diagonal_at_the_centre(group: SchottkyData) -> None:
    c = group.center(2)
    assert bergman_kernel(2, c, c, group) == pytest.approx(1 / (np.pi * 0.25))


def test_kernel_rejects_points_outside(group: SchottkyData) -> None:
    with pytest.raises(OutsideDisk):
        bergman_kernel(1, 0.0, group.center(1), group)


def test_principal_powers() -> None:
    assert complex_power(4.0, 0.5) == pytest.approx(2.0)
    assert complex_power(1j, 2.0) == pytest.approx(-1.0)
    with pytest.raises(BranchCutHit):
        complex_power(-1.0, 0.5)
