import asyncio

import pytest

from netsym.jobs import JobManager
from netsym.server.app import create_app


@pytest.fixture
def idle_manager(tmp_path):
    return JobManager(history_path=str(tmp_path / "history.json"), start=False)

@pytest.fixture
async def client(aiohttp_client, idle_manager):
    return await aiohttp_client(create_app(idle_manager))


async def test_analyze_closure(client):
    resp = await client.post("/netsym/analyze", json={"operation": "closure",
                                                      "network": {"cells": 3, "maps": [[2, 3, 1]]}})
    assert resp.status == 200
    body = await resp.json()
    assert body["operation"] == "closure"
    assert body["report"]["generated"] == 2
    assert body["report"]["is_monoid"]

async def test_analyze_classify_named_network(client):
    resp = await client.post("/netsym/analyze", json={"operation": "classify", "network": "running", "seed": 1})
    assert resp.status == 200
    report = (await resp.json())["report"]
    assert sorted(report["kinds"]) == ["saddle-node", "transcritical", "transcritical"]
    assert len(report["lifted"]) == 3

async def test_analyze_synchrony_of_fundamental(client):
    resp = await client.post("/netsym/analyze", json={"operation": "synchrony", "network": "running",
                                                      "fundamental": True})
    report = (await resp.json())["report"]
    assert report["fundamental"]
    assert report["symmetry_coverage"]["missed"] == []

async def test_analyze_unknown_operation(client):
    resp = await client.post("/netsym/analyze", json={"operation": "flatten", "network": "running"})
    assert resp.status == 400
    body = await resp.json()
    assert body["code"] == "invalid_config"
    assert "closure" in body["details"]["operations"]

async def test_analyze_invalid_network(client):
    resp = await client.post("/netsym/analyze", json={"operation": "closure", "network": {"cells": 2, "maps": []}})
    assert resp.status == 400
    assert (await resp.json())["code"] == "invalid_network"

async def test_analyze_bound_exceeded(client):
    resp = await client.post("/netsym/analyze", json={"operation": "enumerate-monoids", "n": 9})
    assert resp.status == 400
    assert (await resp.json())["code"] == "bound_exceeded"

async def test_body_must_be_a_json_object(client):
    resp = await client.post("/netsym/analyze", data="[1, 2", headers={"Content-Type": "application/json"})
    assert resp.status == 400
    resp = await client.post("/netsym/analyze", json=[1, 2])
    assert resp.status == 400

async def test_submit_and_cancel(client, idle_manager):
    resp = await client.post("/netsym/jobs", json={"kind": "decompose", "payload": {"network": "running"}})
    assert resp.status == 200
    job_id = (await resp.json())["job_id"]

    status = await (await client.get("/netsym/status")).json()
    assert [j["id"] for j in status["queue"]] == [job_id]

    resp = await client.post("/netsym/cancel", json={"job_id": job_id})
    assert resp.status == 200
    assert (await resp.json())["status"] == "cancelled"
    resp = await client.post("/netsym/cancel", json={"job_id": job_id})
    assert resp.status == 404

    job = await (await client.get(f"/netsym/jobs/{job_id}")).json()
    assert job["status"] == "cancelled"

async def test_submit_validation(client):
    resp = await client.post("/netsym/jobs", json={"payload": {}})
    assert resp.status == 400
    resp = await client.post("/netsym/jobs", json={"kind": "paint", "payload": {}})
    assert resp.status == 400
    assert (await resp.json())["code"] == "invalid_config"

async def test_retry_and_clear_history(client):
    job_id = (await (await client.post("/netsym/jobs", json={"kind": "decompose",
                                                             "payload": {"network": "running"}})).json())["job_id"]
    await client.post("/netsym/cancel", json={"job_id": job_id})

    resp = await client.post("/netsym/retry", json={"job_id": job_id})
    assert resp.status == 200
    assert (await resp.json())["success"]
    resp = await client.post("/netsym/retry", json={"job_id": "job_missing"})
    assert resp.status == 404
    resp = await client.post("/netsym/retry", json={})
    assert resp.status == 400

    resp = await client.post("/netsym/clear_history")
    assert resp.status == 200
    assert (await resp.json())["success"]

async def test_unknown_job(client):
    resp = await client.get("/netsym/jobs/job_missing")
    assert resp.status == 404


async def test_job_runs_to_completion(aiohttp_client, tmp_path):
    manager = JobManager(history_path=str(tmp_path / "history.json"))
    try:
        client = await aiohttp_client(create_app(manager))
        resp = await client.post("/netsym/jobs", json={"kind": "classify", "payload": {"network": "two_cell/sigma1"}})
        job_id = (await resp.json())["job_id"]
        for _ in range(600):
            job = await (await client.get(f"/netsym/jobs/{job_id}")).json()
            if job["status"] in ("completed", "failed"):
                break
            await asyncio.sleep(0.05)
        assert job["status"] == "completed"
        assert sorted(job["result"]["classification"]["kinds"]) == ["pitchfork", "saddle-node"]
    finally:
        manager.shutdown()
