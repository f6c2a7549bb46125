from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from app.errors import InputError, NumericalError
from app.main import app
from app.models import SchottkyData

client = TestClient(app)


def test_health() -> None:
    response = client.get("/api/health")
    assert response.status_code == 200
    assert response.json() == {"status": "ok"}


def test_presets() -> None:
    presets = client.get("/api/presets").json()
    assert [p["value"] for p in presets] == ["quick", "desk", "acceptance"]


def test_validate_reference_group(group: SchottkyData) -> None:
    response = client.post("/api/validate", json=group.model_dump())
    assert response.status_code == 200
    assert response.json()["passed"] is True


def test_validate_reports_failing_group(bad_group_payload: dict) -> None:
    response = client.post("/api/validate", json=bad_group_payload)
    assert response.status_code == 200
    failed = [c["name"] for c in response.json()["checks"] if not c["passed"]]
    assert "unit determinant" in failed


def test_overlapping_disks_are_unprocessable() -> None:
    response = client.post("/api/validate", json={"centers": [-3, -1, 1, 1.5], "radii": [0.5] * 4})
    assert response.status_code == 422


def test_dimension(delta: float) -> None:
    response = client.post("/api/dimension", json={"taylor_degree": 12})
    assert response.status_code == 200
    assert response.json()["delta"] == pytest.approx(delta, abs=1e-8)


def test_zeta_vanishes_at_delta(delta: float) -> None:
    response = client.post("/api/zeta", json={"re": delta, "taylor_degree": 12})
    assert response.status_code == 200
    assert response.json()["abs"] < 1e-7


def test_refined_zeta_without_tau_is_unprocessable() -> None:
    response = client.post("/api/zeta", json={"kind": "refined", "re": 0.5})
    assert response.status_code == 422


def test_partition_rejects_non_positive_tau() -> None:
    assert client.post("/api/partition", json={"tau": 0}).status_code == 422


def test_partition_counts_words() -> None:
    body = client.post("/api/partition", json={"tau": 0.2, "mirror": True}).json()
    assert body["mirror"] is True
    assert body["count"] == len(body["words"]) > 0


def test_cover_is_deterministic() -> None:
    first = client.post("/api/cover", json={"n": 5, "seed": 9}).json()
    second = client.post("/api/cover", json={"n": 5, "seed": 9}).json()
    assert first == second
    assert first["n"] == 5 and len(first["images"]) == 2


def test_cover_input_errors_are_unprocessable(monkeypatch: pytest.MonkeyPatch) -> None:
    def refuse(n: int, r: int, seed: int):
        raise InputError(f"cannot sample degree {n}")

    monkeypatch.setattr("app.main.sample_rep", refuse)
    response = client.post("/api/cover", json={"n": 5, "seed": 9})
    assert response.status_code == 422
    assert response.json()["detail"] == "cannot sample degree 5"


def test_cover_numerical_errors_are_server_errors(monkeypatch: pytest.MonkeyPatch) -> None:
    def broken(n: int, r: int, seed: int):
        raise NumericalError("generator failed")

    monkeypatch.setattr("app.main.sample_rep", broken)
    response = client.post("/api/cover", json={"n": 5, "seed": 9})
    assert response.status_code == 500
    assert response.json()["detail"] == "generator failed"
