"""HTTP surface: schemas, computations, determinism, error mapping."""

import numpy as np
import pytest
from fastapi.testclient import TestClient

from jetspectra.service.app import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def test_health(client):
    r = client.get("/health")
    assert r.status_code == 200
    assert r.json()["status"] == "ok"


def test_spectrum_endpoint_linear_height(client):
    r = client.post("/spectrum", json={
        "family": {"g": "3*cos(q) + 4*sin(q)"},
        "grid": {"n_q": 1024, "n_w": 65},
    })
    assert r.status_code == 200
    body = r.json()
    assert body["b"] == 2
    assert body["values"][0] == pytest.approx(-5.0, abs=0.01)
    assert body["values"][1] == pytest.approx(5.0, abs=0.01)
    assert body["degrees"] == [0, 1]
    csv = body["files"]["spectrum.csv"]
    assert csv.startswith("k,c_k,degree,boundary_flag\r\n")


def test_spectrum_endpoint_with_region(client):
    r = client.post("/spectrum", json={
        "family": {"g": "2 + 0.3*sin(q)"},
        "grid": {"n_q": 384, "n_w": 65},
        "region_f": "cos(3*q)",
    })
    assert r.status_code == 200
    assert r.json()["b"] == 3


def test_spectrum_rejects_bad_expression_with_offset(client):
    r = client.post("/spectrum", json={"family": {"g": "cos(q"}})
    assert r.status_code == 400
    assert r.json()["offset"] == 5


def test_spectrum_rejects_unknown_variable(client):
    r = client.post("/spectrum", json={"family": {"g": "cos(q) + w1"}})
    assert r.status_code == 400


def test_spectrum_rejects_bad_grid(client):
    r = client.post("/spectrum", json={
        "family": {"g": "cos(q)"}, "grid": {"n_q": 8, "n_w": 65}})
    assert r.status_code == 422  # pydantic bound


def test_spectrum_deterministic(client):
    payload = {"family": {"g": "cos(3*q) + 0.2*sin(q)"}, "grid": {"n_q": 384, "n_w": 65}}
    a = client.post("/spectrum", json=payload).json()
    b = client.post("/spectrum", json=payload).json()
    assert a == b


def test_cerf_endpoint(client):
    r = client.post("/cerf", json={
        "family": {"g": "cos(q) + t*(2 + sin(q))"},
        "t0": 0.0, "t1": 1.0, "n_t": 32,
        "grid": {"n_q": 128, "n_w": 65},
    })
    assert r.status_code == 200
    body = r.json()
    assert body["positive"] and body["passed"]
    assert body["min_speed"] == pytest.approx(1.0, abs=1e-9)
    assert body["strict_end_to_end"]
    assert body["files"]["cerf.csv"].startswith("branch_id,t,z\r\n")
    assert "<svg" in body["files"]["cerf.svg"]


def test_positivity_endpoint_with_loop_check(client):
    r = client.post("/positivity", json={
        "family": {"g": "cos(q) + t*(2 + sin(q))"},
        "n_t": 16, "n_q": 128, "loop_check": True,
    })
    assert r.status_code == 200
    body = r.json()
    assert body["passed"] and body["loop_passed"]
    assert body["loop_min_alpha"] > 0.9


def test_loop_endpoint(client):
    r = client.post("/loop", json={"eps": 0.1, "n_samples": 512,
                                   "n_flow": 16, "n_raise": 4, "frame_count": 4,
                                   "leg_tol": 1e-5})
    assert r.status_code == 200
    body = r.json()
    assert body["passed"]
    assert body["min_alpha"] >= 0.1
    assert body["cusps"] == 2
    assert "front_000.svg" in body["files"]
    assert body["files"]["loop.csv"].startswith("s,q,p,u\r\n")


def test_lambda_scan_endpoint(client):
    r = client.post("/lambda-scan", json={
        "family": {"g": "2 + 0.3*sin(q)"},
        "f": "cos(3*q)", "lambda_max": 10.0, "n_lambda": 120,
        "grid": {"n_q": 384, "n_w": 65},
    })
    assert r.status_code == 200
    body = r.json()
    assert body["b"] == 3
    assert body["distinct_positive"] == 3
    assert body["passed"]
    assert all(v < 0 for v in body["final_values"])


def test_lambda_scan_positivity_precondition(client):
    r = client.post("/lambda-scan", json={
        "family": {"g": "-1 + 0*sin(q)"},
        "f": "cos(q)", "lambda_max": 5.0, "n_lambda": 64,
    })
    assert r.status_code == 400


def test_lambda_k_endpoint(client):
    r = client.post("/lambda-k", json={"g": "1", "k": 3, "n_samples": 1024})
    assert r.status_code == 200
    body = r.json()
    assert body["count"] == 6
    assert not body["degenerate"]
    assert body["files"]["intersections.csv"].startswith("s,q,lambda,residual\r\n")


def test_hodograph_endpoints(client):
    r = client.post("/hodograph", json={"mode": "fwd", "point": [0.0, 0.0, 1.0]})
    assert r.status_code == 200
    assert r.json()["element"] == pytest.approx([1.0, 0.0, 0.0])

    r = client.post("/hodograph", json={"mode": "inv", "element": [-2.0, 3.0, np.pi / 2]})
    assert r.status_code == 200
    q, p, u = r.json()["point"]
    assert (q, p, u) == pytest.approx((np.pi / 2, 2.0, 3.0), abs=1e-12)

    r = client.post("/hodograph", json={"mode": "fiber", "x": [3.0, 4.0], "n": 128})
    assert r.status_code == 200
    body = r.json()
    assert body["legendrian_pass"]
    assert body["files"]["contact_curve.csv"].startswith("s,x1,x2,theta\r\n")
    assert "<svg" in body["files"]["contact_curve.svg"]

    r = client.post("/hodograph", json={"mode": "fiber"})
    assert r.status_code == 422  # schema-level: missing x


def test_front_endpoint(client):
    r = client.post("/front", json={"family": {"g": "cos(q)"}, "n_q": 128})
    assert r.status_code == 200
    body = r.json()
    assert body["n_loops"] == 1
    assert body["cusps"] == 0
    assert body["winding"] == 1
    assert "<svg" in body["files"]["front.svg"]


def test_thm5_endpoint(client):
    r = client.post("/thm5", json={"n_lambda": 120, "n_q": 128})
    assert r.status_code == 200
    body = r.json()
    assert body["passed"]
    assert body["count"] == 2
    sides = sorted(pt["side"] for pt in body["points"])
    assert sides == [-1, 1]


def test_thm5_rejects_negative_deformation(client):
    r = client.post("/thm5", json={"deformation_g": "-t", "n_lambda": 64, "n_q": 128})
    assert r.status_code == 400
