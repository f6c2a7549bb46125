"""Shared fixtures: the reference group and quantities derived from it."""

from __future__ import annotations

import pytest

from app.geometry.schottky import reference_group
from app.models import SchottkyData
from app.spectral.zeta import hausdorff_dimension

# Small enough for a quick suite, large enough that truncation stays below 1e-8.
TEST_DEGREE = 12


@pytest.fixture(scope="session")
def group() -> SchottkyData:
    return reference_group()


@pytest.fixture(scope="session")
def delta(group: SchottkyData) -> float:
    return hausdorff_dimension(group, degree=TEST_DEGREE).delta


@pytest.fixture
def bad_group_payload(group: SchottkyData) -> dict:
    payload = group.model_dump()
    payload["generators"][0][0][0] += 0.1
    return payload
