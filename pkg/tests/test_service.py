import pytest
from fastapi.testclient import TestClient

from conftest import DANGLING_SRC, POLYMORPHISM_SRC, RVALUE_SRC
from minibmc.service import app

client = TestClient(app)


def test_health():
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok"}


def test_verify_successful_program():
    resp = client.post("/verify", json={"source": POLYMORPHISM_SRC,
                                        "filename": "fig.cpp"})
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "SUCCESSFUL"
    assert body["exit_code"] == 0
    assert body["output"] == "VERIFICATION SUCCESSFUL\n"
    assert body["violated_property"] is None


def test_verify_failed_program_includes_property_and_trace():
    resp = client.post("/verify", json={"source": DANGLING_SRC,
                                        "filename": "main6.cpp"})
    body = resp.json()
    assert body["status"] == "FAILED"
    assert body["exit_code"] == 1
    vp = body["violated_property"]
    assert vp["function"] == "Inc"
    assert vp["property_class"] == "dereference failure: invalidated dynamic object"
    assert "VERIFICATION FAILED" in body["output"]


def test_verify_error_program():
    resp = client.post("/verify", json={"source": "#include <iostream>\nint main(){}"})
    body = resp.json()
    assert body["status"] == "ERROR"
    assert body["exit_code"] == 2
    assert "unsupported header" in body["error"]


def test_options_and_artifacts_round_trip():
    resp = client.post("/verify", json={
        "source": RVALUE_SRC,
        "options": {"unwind": 5, "show_goto": True},
    })
    body = resp.json()
    assert body["status"] == "SUCCESSFUL"
    assert "rref = return_value" in body["artifacts"]["goto"]


def test_leak_check_option():
    src = "int main() { int *p = new int(1); return 0; }"
    resp = client.post("/verify", json={
        "source": src, "options": {"memory_leak_check": True}})
    body = resp.json()
    assert body["status"] == "FAILED"
    assert body["violated_property"]["property_class"] == "memory leak"


def test_invalid_options_rejected():
    resp = client.post("/verify", json={
        "source": "int main(){}", "options": {"unwind": 0}})
    assert resp.status_code == 422  # pydantic validation
    resp2 = client.post("/verify", json={
        "source": "int main(){}", "options": {"int_width": 7}})
    body = resp2.json()
    assert body["status"] == "ERROR"
