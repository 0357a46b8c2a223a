from app.core.config import settings
from app.sim.rng import GENERATOR_ID

SCENARIO = {"n_boids": 10, "seed": 3, "ticks": 12, "n_sensors": 4}


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    body = response.json()
    assert body["status"] == "ok"
    assert body["generator"] == GENERATOR_ID
    assert body["version"] == settings.version


def test_run_returns_metrics_for_every_tick(client):
    response = client.post("/simulations/run", json=SCENARIO)
    assert response.status_code == 200
    body = response.json()
    assert [row["tick"] for row in body["metrics"]] == list(range(13))
    assert body["metadata"]["scenario"]["vision"] == 3.0
    assert body["metadata"]["generator"] == GENERATOR_ID
    assert [totals["sensor_id"] for totals in body["detections"]] == [0, 1, 2, 3]


def test_run_is_deterministic(client):
    first = client.post("/simulations/run", json=SCENARIO).json()
    second = client.post("/simulations/run", json=SCENARIO).json()
    assert first == second


def test_run_rejects_invalid_scenarios(client):
    response = client.post("/simulations/run", json={**SCENARIO, "vision": 400})
    assert response.status_code == 400
    assert response.json()["field"] == "vision"


def test_run_rejects_missing_fields(client):
    response = client.post("/simulations/run", json={"seed": 1})
    assert response.status_code == 422


def test_run_enforces_server_limits(client):
    response = client.post("/simulations/run", json={**SCENARIO, "ticks": settings.api_max_ticks + 1})
    assert response.status_code == 400
    assert "ticks" in response.json()["detail"]


def test_plot_returns_svg(client):
    response = client.post("/simulations/plot", params={"style": "snapshot"}, json=SCENARIO)
    assert response.status_code == 200
    assert response.headers["content-type"].startswith("image/svg+xml")
    assert response.text.startswith("<svg")
    assert 'class="sensor' in response.text
