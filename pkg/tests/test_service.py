"""HTTP service contract tests over the ASGI app (no real socket)."""

import json

import pytest
from fastapi.testclient import TestClient

from mcnn_phase.config import config_hash, resolve_config
from mcnn_phase.document import build_portrait_document
from mcnn_phase.render import render_portrait
from mcnn_phase.serialize import export_json
from mcnn_phase.service import GRID_CAP, TRAJECTORY_CAP, create_app

BASE_HASH = config_hash(resolve_config({}))


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app()) as c:
        yield c


def test_health(client):
    resp = client.get("/api/health")
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "ok"
    assert body["version"]
    assert resp.headers["X-Config-Hash"] == BASE_HASH


def test_defaults_endpoint_returns_resolved_config(client):
    resp = client.get("/api/defaults")
    assert resp.status_code == 200
    assert resp.json() == resolve_config({})


def test_analyze_bytes_match_library_export(client):
    resp = client.post("/api/analyze")
    assert resp.status_code == 200
    assert resp.headers["content-type"].startswith("application/json")
    assert resp.headers["X-Config-Hash"] == BASE_HASH
    assert resp.content == export_json(build_portrait_document({}))


def test_analyze_with_config_override(client):
    resp = client.post("/api/analyze", json={"cell": {"r_ohms": 3000.0}})
    assert resp.status_code == 200
    assert resp.headers["X-Config-Hash"] != BASE_HASH
    doc = resp.json()
    assert doc["config"]["cell"]["r_ohms"] == 3000.0
    assert len(doc["field"]) == 441


def test_analyze_rejects_unknown_key(client):
    resp = client.post("/api/analyze", json={"cell": {"bogus": 1}})
    assert resp.status_code == 400
    body = resp.json()
    assert body["error"] == "config-error"
    assert body["path"] == "cell.bogus"


def test_analyze_rejects_malformed_body(client):
    resp = client.post("/api/analyze", content=b"{not json")
    assert resp.status_code == 400
    assert resp.json()["error"] == "invalid-json"
    resp = client.post("/api/analyze", json=[1, 2, 3])
    assert resp.status_code == 400
    assert resp.json()["error"] == "invalid-json"


def test_analyze_enforces_grid_cap(client):
    resp = client.post(
        "/api/analyze", json={"grid": {"v_c_samples": GRID_CAP + 1}})
    assert resp.status_code == 400
    body = resp.json()
    assert body["error"] == "cap-exceeded"
    assert str(GRID_CAP) in body["message"]


def test_analyze_enforces_trajectory_cap(client):
    seeds = [{"v_c0": 0.5, "n_d0": 1e27}] * (TRAJECTORY_CAP + 1)
    resp = client.post("/api/analyze", json={"trajectories": seeds})
    assert resp.status_code == 400
    assert resp.json()["error"] == "cap-exceeded"


def test_analyze_surfaces_field_overflow(client):
    resp = client.post("/api/analyze", json={"memristor": {"v_0": 1e-4}})
    assert resp.status_code == 422
    assert resp.json()["error"] == "numerical-failure"


def test_portrait_svg_endpoint(client):
    resp = client.post("/api/portrait.svg")
    assert resp.status_code == 200
    assert resp.headers["content-type"].startswith("image/svg+xml")
    assert resp.content == render_portrait(build_portrait_document({}))


def test_trajectory_endpoint_ok(client):
    resp = client.post("/api/trajectory",
                       json={"v_c0": 1.25, "n_d0": 1e27})
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "ok"
    assert body["initial"]["v_c"] == 1.25
    # seed concentration survives the ln/exp round trip of log-state mode
    assert body["initial"]["n_d"] == pytest.approx(1e27, rel=1e-12)
    assert len(body["points"]) >= 200
    assert "X-Config-Hash" in resp.headers


def test_trajectory_accepts_nested_config(client):
    resp = client.post(
        "/api/trajectory",
        json={"v_c0": 0.5, "n_d0": 2e27,
              "config": {"cell": {"r_ohms": 3000.0}}},
    )
    assert resp.status_code == 200
    assert abs(resp.json()["terminal"]["v_c"]) < 1e-6


def test_trajectory_missing_seed_field(client):
    resp = client.post("/api/trajectory", json={"v_c0": 1.0})
    assert resp.status_code == 400
    body = resp.json()
    assert body["error"] == "config-error"
    assert body["path"] == "n_d0"


def test_trajectory_seed_outside_bounds(client):
    resp = client.post("/api/trajectory", json={"v_c0": 0.0, "n_d0": 1e20})
    assert resp.status_code == 400
    assert resp.json()["path"] == "trajectories[0].n_d0"


def test_trajectory_numerical_failure_is_422(client):
    resp = client.post(
        "/api/trajectory",
        json={"v_c0": 1.25, "n_d0": 1e27,
              "config": {"memristor": {"v_0": 1e-4}}},
    )
    assert resp.status_code == 422
    assert resp.json()["status"] == "non-finite-derivative"


def test_cors_header_present(client):
    resp = client.get("/api/health", headers={"Origin": "http://localhost:5173"})
    assert resp.headers.get("access-control-allow-origin") == "*"


def test_app_with_preset_default_config():
    preset = resolve_config({"cell": {"r_ohms": 3000.0}})
    with TestClient(create_app(default_user_config=preset)) as c:
        resp = c.post("/api/analyze")
        assert resp.status_code == 200
        assert resp.json()["config"]["cell"]["r_ohms"] == 3000.0
        assert resp.headers["X-Config-Hash"] == config_hash(preset)