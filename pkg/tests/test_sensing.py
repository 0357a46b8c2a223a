import numpy as np
import pytest

from app.core.errors import ConfigError
from app.sim import geometry
from app.sim.models import Position, SensorNode
from app.sim.sensing import count_nearby_boids, deploy_sensors, recount, sense_all, sensor_counts
from tests.support import BOUNDED, TORUS, image_distance, make_boid, random_boids


def _sensor(sensor_id: int, x: float, y: float, radius: float = 5.0) -> SensorNode:
    return SensorNode(id=sensor_id, pos=Position(x=x, y=y), radius=radius)


def test_deploy_sensors_places_n_sensors_inside_the_world():
    sensors = deploy_sensors(25, 5.0, TORUS, seed=3)
    assert [s.id for s in sensors] == list(range(25))
    assert all(TORUS.contains(s.pos.x, s.pos.y) for s in sensors)
    assert all(s.radius == 5.0 and s.count_nearby_boids == 0 for s in sensors)


def test_deploy_sensors_is_reproducible():
    assert deploy_sensors(10, 2.0, TORUS, seed=11) == deploy_sensors(10, 2.0, TORUS, seed=11)
    assert deploy_sensors(10, 2.0, TORUS, seed=11) != deploy_sensors(10, 2.0, TORUS, seed=12)


def test_deploy_sensors_accepts_a_generator():
    first = deploy_sensors(4, 1.0, BOUNDED, np.random.default_rng(5))
    second = deploy_sensors(4, 1.0, BOUNDED, np.random.default_rng(5))
    assert first == second


def test_deploy_zero_sensors():
    assert deploy_sensors(0, 5.0, TORUS, seed=1) == []


@pytest.mark.parametrize(("n", "radius", "field"), [(-1, 5.0, "n_sensors"), (3, 0.0, "sensor_radius"), (3, -2.0, "sensor_radius")])
def test_deploy_sensors_rejects_bad_arguments(n, radius, field):
    with pytest.raises(ConfigError) as info:
        deploy_sensors(n, radius, TORUS, seed=1)
    assert info.value.field == field


def test_count_nearby_boids_examples():
    sensor = _sensor(0, 0, 0)
    boids = [make_boid(0, 3, 4), make_boid(1, 10, 0), make_boid(2, -1, -1)]
    assert count_nearby_boids(sensor, boids, TORUS) == 2
    assert count_nearby_boids(sensor, [], TORUS) == 0


def test_count_nearby_boids_radius_is_inclusive():
    sensor = _sensor(0, 0, 0, radius=5.0)
    for offset, expected in [(-1e-6, 1), (0.0, 1), (1e-6, 0)]:
        assert count_nearby_boids(sensor, [make_boid(0, 5.0 + offset, 0)], BOUNDED) == expected


def test_count_nearby_boids_sees_across_the_seam():
    sensor = _sensor(0, 34, 0, radius=2.0)
    boid = make_boid(0, -34.5, 0)
    assert count_nearby_boids(sensor, [boid], TORUS) == 1
    assert count_nearby_boids(sensor, [boid], BOUNDED) == 0


def test_sense_all_matches_scalar_count():
    rng = np.random.default_rng(77)
    for scene in range(100):
        bounds = TORUS if scene % 2 else BOUNDED
        boids = random_boids(rng, int(rng.integers(0, 120)), bounds)
        sensors = deploy_sensors(int(rng.integers(1, 30)), float(rng.uniform(0.5, 10)), bounds, rng)
        records = sense_all(sensors, boids, scene, bounds)
        for sensor, record in zip(sensors, records):
            expected = count_nearby_boids(sensor, boids, bounds)
            assert sensor.count_nearby_boids == expected
            assert record.count == expected
            assert record.detecting == (expected > 0)
            assert record.tick == scene and record.sensor_id == sensor.id


def test_count_nearby_boids_matches_a_periodic_image_scan():
    rng = np.random.default_rng(2024)
    for scene in range(200):
        bounds = TORUS if scene % 2 else BOUNDED
        boids = random_boids(rng, int(rng.integers(0, 80)), bounds)
        sensors = deploy_sensors(int(rng.integers(1, 51)), float(rng.uniform(0.5, 12)), bounds, rng)
        records = sense_all([s.model_copy() for s in sensors], boids, scene, bounds)
        for sensor, record in zip(sensors, records):
            expected = sum(1 for boid in boids if image_distance(sensor.pos, boid.pos, bounds) <= sensor.radius)
            assert count_nearby_boids(sensor, boids, bounds) == expected
            assert record.count == expected


def test_recount_leaves_the_input_sensors_alone():
    rng = np.random.default_rng(6)
    boids = random_boids(rng, 60, TORUS)
    sensors = deploy_sensors(8, 6.0, TORUS, rng)
    xy = geometry.coordinates(b.pos for b in boids)
    fresh, records = recount(sensors, xy, 3, TORUS)
    assert all(s.count_nearby_boids == 0 for s in sensors)
    assert [s.count_nearby_boids for s in fresh] == [count_nearby_boids(s, boids, TORUS) for s in sensors]
    assert [s.pos for s in fresh] == [s.pos for s in sensors]
    assert [r.count for r in records] == sensor_counts(sensors, xy, TORUS).tolist()
    assert {r.tick for r in records} == {3}


def test_sense_all_without_boids_clears_counts():
    sensors = [_sensor(0, 0, 0)]
    sensors[0].count_nearby_boids = 4
    records = sense_all(sensors, [], 9, TORUS)
    assert sensors[0].count_nearby_boids == 0
    assert records[0].detecting is False


def test_sense_all_without_sensors():
    assert sense_all([], [make_boid(0, 0, 0)], 0, TORUS) == []


def test_sensor_positions_are_untouched_by_sensing():
    sensors = deploy_sensors(5, 3.0, TORUS, seed=2)
    before = [s.pos for s in sensors]
    sense_all(sensors, random_boids(np.random.default_rng(0), 40, TORUS), 1, TORUS)
    assert [s.pos for s in sensors] == before
    assert all(geometry.distance(a, b, TORUS) == 0 for a, b in zip(before, [s.pos for s in sensors]))
