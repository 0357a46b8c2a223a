"""Flocking indices computed from traces.

A flock is a connected component of the vision graph: boids are joined when
they are within ``vision`` of each other. Polarization is the length of the
mean unit heading vector, global and averaged over components weighted by size.
"""

from collections.abc import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from app.core.errors import PreconditionError
from app.sim import geometry
from app.sim.models import BoidState, FlockParams, TickTrace, WorldBounds


class TickMetrics(BaseModel):
    model_config = ConfigDict(frozen=True)

    tick: int
    polarization: float
    mean_flockmates: float
    n_components: int
    mean_component_polarization: float
    detecting_fraction: float


class SensorTotals(BaseModel):
    sensor_id: int
    detection_ticks: int = 0
    cumulative_count: int = 0


def _polarization(headings: np.ndarray) -> float:
    rad = np.radians(headings)
    value = float(np.hypot(np.sin(rad).sum(), np.cos(rad).sum()) / len(headings))
    return min(value, 1.0)


def polarization(boids: Sequence[BoidState]) -> float:
    if not boids:
        raise PreconditionError("polarization needs at least one boid")
    return _polarization(np.array([boid.heading for boid in boids], dtype=float))


def _vision_graph(boids: Sequence[BoidState], params: FlockParams, bounds: WorldBounds) -> np.ndarray:
    xy = geometry.coordinates(boid.pos for boid in boids)
    adjacent = geometry.distance_matrix(xy, xy, bounds) <= params.vision
    np.fill_diagonal(adjacent, False)
    return adjacent


def _labels(adjacent: np.ndarray) -> np.ndarray:
    _, labels = connected_components(csr_matrix(adjacent, dtype=float), directed=False)
    return labels


def vision_components(
    boids: Sequence[BoidState], params: FlockParams, bounds: WorldBounds
) -> list[list[int]]:
    """Boid ids grouped by component; groups and ids inside them ascend."""
    if not boids:
        return []
    labels = _labels(_vision_graph(boids, params, bounds))
    groups: dict[int, list[int]] = {}
    for boid, label in zip(boids, labels.tolist()):
        groups.setdefault(label, []).append(boid.id)
    return sorted(sorted(group) for group in groups.values())


def compute_tick_metrics(trace_row: TickTrace, params: FlockParams, bounds: WorldBounds) -> TickMetrics:
    boids = trace_row.boids
    sensors = trace_row.sensors
    detecting = sum(1 for sensor in sensors if sensor.count_nearby_boids > 0)
    detecting_fraction = detecting / len(sensors) if sensors else 0.0
    if not boids:
        return TickMetrics(
            tick=trace_row.tick,
            polarization=0.0,
            mean_flockmates=0.0,
            n_components=0,
            mean_component_polarization=0.0,
            detecting_fraction=detecting_fraction,
        )

    headings = np.array([boid.heading for boid in boids], dtype=float)
    adjacent = _vision_graph(boids, params, bounds)
    labels = _labels(adjacent)
    weighted = 0.0
    components = np.unique(labels)
    for label in components:
        members = headings[labels == label]
        weighted += len(members) * _polarization(members)

    return TickMetrics(
        tick=trace_row.tick,
        polarization=_polarization(headings),
        mean_flockmates=float(adjacent.sum(axis=1).mean()),
        n_components=len(components),
        mean_component_polarization=min(weighted / len(boids), 1.0),
        detecting_fraction=detecting_fraction,
    )


def detection_summary(traces: Sequence[TickTrace]) -> dict[int, SensorTotals]:
    if not traces:
        raise PreconditionError("detection summary needs at least one trace row")
    totals: dict[int, SensorTotals] = {}
    for row in traces:
        for record in row.detections:
            entry = totals.setdefault(record.sensor_id, SensorTotals(sensor_id=record.sensor_id))
            entry.detection_ticks += int(record.detecting)
            entry.cumulative_count += record.count
    return dict(sorted(totals.items()))
