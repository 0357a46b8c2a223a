import pytest
from fastapi.testclient import TestClient

from app.core.limiter import limiter
from app.sim.models import FlockParams, SimConfig, WorldBounds
from tests.support import BOUNDED, TORUS


@pytest.fixture
def params() -> FlockParams:
    return FlockParams()


@pytest.fixture
def torus() -> WorldBounds:
    return TORUS


@pytest.fixture
def bounded() -> WorldBounds:
    return BOUNDED


@pytest.fixture
def small_config() -> SimConfig:
    return SimConfig(n_boids=20, n_sensors=5, seed=7, ticks=25)


@pytest.fixture
def client(monkeypatch):
    from app.main import create_app

    monkeypatch.setattr(limiter, "enabled", False)
    with TestClient(create_app()) as test_client:
        yield test_client
