"""Proximity sensors: random deployment and per-tick boid counting.

A sensor counts the boids whose distance from it is at most its radius (the
same inclusive boundary boids use for vision) and reports itself as detecting
whenever that count is positive.
"""

from collections.abc import Sequence

import numpy as np

from app.core.errors import ConfigError
from app.sim import geometry
from app.sim.models import BoidState, DetectionRecord, Position, SensorNode, WorldBounds


def deploy_sensors(
    n: int, radius: float, bounds: WorldBounds, seed: int | np.random.Generator
) -> list[SensorNode]:
    if n < 0:
        raise ConfigError("n_sensors", "must be >= 0")
    if not radius > 0:
        raise ConfigError("sensor_radius", "must be > 0")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    xs = rng.uniform(bounds.min_x, bounds.max_x, size=n)
    ys = rng.uniform(bounds.min_y, bounds.max_y, size=n)
    return [
        SensorNode(id=i, pos=Position(x=x, y=y), radius=radius)
        for i, (x, y) in enumerate(zip(xs.tolist(), ys.tolist()))
    ]


def count_nearby_boids(sensor: SensorNode, boids: Sequence[BoidState], bounds: WorldBounds) -> int:
    return sum(1 for boid in boids if geometry.distance(sensor.pos, boid.pos, bounds) <= sensor.radius)


def sensor_counts(sensors: Sequence[SensorNode], xy: np.ndarray, bounds: WorldBounds) -> np.ndarray:
    """``count_nearby_boids`` for every sensor against an ``(n, 2)`` array of boid positions."""
    if not sensors or len(xy) == 0:
        return np.zeros(len(sensors), dtype=np.int64)
    dist = geometry.distance_matrix(geometry.coordinates(s.pos for s in sensors), xy, bounds)
    radii = np.array([s.radius for s in sensors])
    return (dist <= radii[:, None]).sum(axis=1)


def _records(sensors: Sequence[SensorNode], counts: list[int], tick: int) -> list[DetectionRecord]:
    return [
        DetectionRecord.model_construct(tick=tick, sensor_id=sensor.id, count=count, detecting=count > 0)
        for sensor, count in zip(sensors, counts)
    ]


def sense_all(
    sensors: Sequence[SensorNode], boids: Sequence[BoidState], tick: int, bounds: WorldBounds
) -> list[DetectionRecord]:
    """Recount every sensor against the current boid positions.

    Updates ``count_nearby_boids`` on each sensor in place; call it from a
    single writer per tick.
    """
    counts = sensor_counts(sensors, geometry.coordinates(b.pos for b in boids), bounds).tolist()
    for sensor, count in zip(sensors, counts):
        sensor.count_nearby_boids = count
    return _records(sensors, counts, tick)


def recount(
    sensors: Sequence[SensorNode], xy: np.ndarray, tick: int, bounds: WorldBounds
) -> tuple[list[SensorNode], list[DetectionRecord]]:
    """Like ``sense_all`` but leaves ``sensors`` alone and returns recounted copies."""
    counts = sensor_counts(sensors, xy, bounds).tolist()
    fresh = [
        SensorNode.model_construct(id=sensor.id, pos=sensor.pos, radius=sensor.radius, count_nearby_boids=count)
        for sensor, count in zip(sensors, counts)
    ]
    return fresh, _records(sensors, counts, tick)
