"""Simulation lifecycle: seeded setup, the synchronous tick and invariant checks.

A tick is two-phase. Every boid first decides its new heading against the same
start-of-tick snapshot (ordered by id), then all boids turn and move together,
and finally the sensors recount the moved boids. Because no boid sees another's
update within a tick, the order boids are stored in never affects a run.
"""

import logging
import time
from collections.abc import Iterator, Sequence

import numpy as np

from app.core.errors import InvariantViolationError
from app.sim import geometry, rng
from app.sim.flocking import advance_all, flock_headings
from app.sim.models import RULE_NONE, SimConfig, SimulationState, TickTrace, Violation
from app.sim.sensing import deploy_sensors, recount, sensor_counts

logger = logging.getLogger(__name__)


def init_simulation(config: SimConfig) -> SimulationState:
    bounds = config.bounds
    boid_rng = rng.generator(config.seed, rng.BOID_INIT)
    xs = boid_rng.uniform(bounds.min_x, bounds.max_x, size=config.n_boids)
    ys = boid_rng.uniform(bounds.min_y, bounds.max_y, size=config.n_boids)
    headings = geometry.normalize_headings(boid_rng.uniform(0.0, 360.0, size=config.n_boids))
    xy = np.column_stack((xs, ys))

    deployed = deploy_sensors(
        config.n_sensors,
        config.sensor_radius,
        bounds,
        rng.generator(config.seed, rng.SENSOR_DEPLOY),
    )
    sensors, detections = recount(deployed, xy, 0, bounds)
    state = SimulationState(
        config=config,
        tick=0,
        ids=np.arange(config.n_boids, dtype=np.int64),
        xy=xy,
        headings=headings,
        rules=np.full(config.n_boids, RULE_NONE, dtype=np.int64),
        turns=np.zeros(config.n_boids),
        sensors=sensors,
        sensor_origin={sensor.id: sensor.pos for sensor in sensors},
        detections=detections,
    )
    _apply_invariants(state)
    return state


def tick(state: SimulationState) -> SimulationState:
    """Advance one tick and return the new state; ``state`` is left untouched."""
    config = state.config
    bounds = config.bounds
    params = config.flock_params

    order = np.argsort(state.ids, kind="stable")
    xy = state.xy[order]
    update = flock_headings(xy, state.headings[order], params, bounds)
    moved = advance_all(xy, update.headings, params, bounds)

    sensors, detections = recount(state.sensors, moved, state.tick + 1, bounds)
    next_state = SimulationState.model_construct(
        config=config,
        tick=state.tick + 1,
        ids=state.ids[order],
        xy=moved,
        headings=update.headings,
        rules=update.rules,
        turns=update.turns,
        sensors=sensors,
        sensor_origin=state.sensor_origin,
        detections=detections,
        violations=[],
    )
    _apply_invariants(next_state)
    return next_state


def simulate(state: SimulationState, ticks: int) -> Iterator[SimulationState]:
    """Yield ``state`` and then each of the following ``ticks`` states."""
    yield state
    for _ in range(ticks):
        state = tick(state)
        yield state


def run(config: SimConfig) -> list[TickTrace]:
    started = time.perf_counter()
    logger.info(
        "Running %d boids, %d sensors for %d ticks (seed=%d, %s, invariants=%s, generator=%s)",
        config.n_boids,
        config.n_sensors,
        config.ticks,
        config.seed,
        config.bounds.topology,
        config.invariant_mode,
        rng.GENERATOR_ID,
    )
    traces = [state.to_trace() for state in simulate(init_simulation(config), config.ticks)]
    logger.info("Run finished in %.2fs", time.perf_counter() - started)
    return traces


def check_invariants(state: SimulationState) -> list[Violation]:
    """Evaluate every model invariant against ``state``; empty means conformant."""
    bounds = state.config.bounds
    violations: list[Violation] = []

    def report(kind: str, entity_id: int, predicate: str, detail: str) -> None:
        violations.append(
            Violation(tick=state.tick, entity_kind=kind, entity_id=entity_id, predicate=predicate, detail=detail)
        )

    repeated = np.ones(len(state.ids), dtype=bool)
    repeated[np.unique(state.ids, return_index=True)[1]] = False
    bad_heading = ~((state.headings >= 0.0) & (state.headings < 360.0))
    outside = ~geometry.inside(state.xy, bounds)
    for row in np.flatnonzero(repeated | bad_heading | outside).tolist():
        boid_id = int(state.ids[row])
        if repeated[row]:
            report("boid", boid_id, "unique_boid_id", "id appears more than once")
        if bad_heading[row]:
            report("boid", boid_id, "heading_range", f"heading {float(state.headings[row])} outside [0, 360)")
        if outside[row]:
            x, y = state.xy[row].tolist()
            report("boid", boid_id, "position_in_bounds", f"({x}, {y}) outside world")

    n_boids = len(state.ids)
    for sensor in state.sensors:
        if not 0 <= sensor.count_nearby_boids <= n_boids:
            report(
                "sensor",
                sensor.id,
                "sensor_count_range",
                f"count {sensor.count_nearby_boids} outside [0, {n_boids}]",
            )
        if not bounds.contains(sensor.pos.x, sensor.pos.y):
            report("sensor", sensor.id, "position_in_bounds", f"({sensor.pos.x}, {sensor.pos.y}) outside world")
        origin = state.sensor_origin.get(sensor.id)
        if origin is not None and origin != sensor.pos:
            report("sensor", sensor.id, "sensor_immobile", f"moved from ({origin.x}, {origin.y})")
    return violations


def _apply_invariants(state: SimulationState) -> None:
    mode = state.config.invariant_mode
    if mode == "off":
        return
    violations = check_invariants(state)
    if not violations:
        return
    if mode == "enforce":
        raise InvariantViolationError(violations)
    for violation in violations:
        logger.warning(
            "tick %d: %s %s violates %s: %s",
            violation.tick,
            violation.entity_kind,
            violation.entity_id,
            violation.predicate,
            violation.detail,
        )
    state.violations = violations


def check_trace(traces: Sequence[TickTrace], config: SimConfig) -> list[Violation]:
    """Re-validate a stored run: every row's predicates plus the run-level ones.

    Sensor counts are recomputed from each row's boid positions and must match
    the recorded ones exactly.
    """
    if not traces:
        return []
    first = traces[0]
    origin = {sensor.id: sensor.pos for sensor in first.sensors}
    violations: list[Violation] = []
    previous_tick = None
    for row in traces:
        if previous_tick is not None and row.tick != previous_tick + 1:
            violations.append(
                Violation(tick=row.tick, entity_kind="trace", predicate="tick_succession", detail=f"follows tick {previous_tick}")
            )
        previous_tick = row.tick
        if len(row.boids) != len(first.boids) or len(row.sensors) != len(first.sensors):
            violations.append(
                Violation(
                    tick=row.tick,
                    entity_kind="trace",
                    predicate="population_constant",
                    detail=f"{len(row.boids)} boids, {len(row.sensors)} sensors",
                )
            )
        state = SimulationState.from_records(
            config, row.boids, row.sensors, origin, tick=row.tick, decisions=row.decisions, detections=row.detections
        )
        violations.extend(check_invariants(state))
        expected = sensor_counts(row.sensors, state.xy, config.bounds).tolist()
        for sensor, count in zip(row.sensors, expected):
            if sensor.count_nearby_boids != count:
                violations.append(
                    Violation(
                        tick=row.tick,
                        entity_kind="sensor",
                        entity_id=sensor.id,
                        predicate="sensor_count_consistent",
                        detail=f"recorded {sensor.count_nearby_boids}, recount gives {count}",
                    )
                )
        for record in row.detections:
            if record.detecting != (record.count > 0):
                violations.append(
                    Violation(
                        tick=row.tick,
                        entity_kind="sensor",
                        entity_id=record.sensor_id,
                        predicate="detecting_flag",
                        detail=f"detecting={record.detecting} with count {record.count}",
                    )
                )
    return violations
