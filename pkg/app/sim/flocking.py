"""Per-boid flocking behaviour.

A boid looks for flockmates within ``vision``. If the nearest one is within
``min_separation`` it only turns away from that neighbour's heading; otherwise
it aligns with the flockmates' mean heading and then coheres toward their mean
bearing, each turn capped by its own maximum. A boid with no flockmates keeps
its heading.

The scalar functions below are the reference rules. ``flock_headings`` applies
the same rules to a whole snapshot at once and is what the engine runs.
"""

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import Optional

import numpy as np

from app.core.errors import PreconditionError
from app.sim import geometry
from app.sim.geometry import DEGENERATE_EPSILON
from app.sim.models import (
    RULE_ALIGN_COHERE,
    RULE_NONE,
    RULE_SEPARATE,
    BoidState,
    FlockParams,
    Heading,
    Position,
    TurnDecision,
    WorldBounds,
    turn_decisions,
)

NO_TURN = TurnDecision(rule_applied="none", turn=0.0)


def find_flockmates(
    boid: BoidState, boids: Iterable[BoidState], params: FlockParams, bounds: WorldBounds
) -> list[BoidState]:
    mates = [
        other
        for other in boids
        if other.id != boid.id and geometry.distance(boid.pos, other.pos, bounds) <= params.vision
    ]
    return sorted(mates, key=lambda other: other.id)


def find_nearest_neighbor(
    boid: BoidState, flockmates: Iterable[BoidState], bounds: WorldBounds
) -> Optional[BoidState]:
    best: Optional[BoidState] = None
    best_key: tuple[float, int] = (math.inf, 0)
    for other in flockmates:
        key = (geometry.distance(boid.pos, other.pos, bounds), other.id)
        if best is None or key < best_key:
            best, best_key = other, key
    return best


def clamp_turn(desired: float, max_turn: float) -> float:
    return math.copysign(min(abs(desired), max_turn), desired)


def towards_turn(boid: BoidState, target_heading: Heading) -> float:
    return geometry.subtract_heading(target_heading, boid.heading)


def away_turn(boid: BoidState, other_heading: Heading) -> float:
    return geometry.subtract_heading(boid.heading, other_heading)


def separate(boid: BoidState, nearest: BoidState, params: FlockParams) -> Heading:
    turn = clamp_turn(away_turn(boid, nearest.heading), params.max_separate_turn)
    return geometry.normalize_heading(boid.heading + turn)


def average_flockmate_heading(flockmates: Sequence[BoidState]) -> Heading:
    if not flockmates:
        raise PreconditionError("average heading needs at least one flockmate")
    mean, magnitude = geometry.circular_mean(mate.heading for mate in flockmates)
    if magnitude < DEGENERATE_EPSILON:
        return min(flockmates, key=lambda mate: mate.id).heading
    return mean


def align(boid: BoidState, avg_heading: Heading, params: FlockParams) -> Heading:
    turn = clamp_turn(towards_turn(boid, avg_heading), params.max_align_turn)
    return geometry.normalize_heading(boid.heading + turn)


def cohere(
    boid: BoidState, flockmates: Sequence[BoidState], params: FlockParams, bounds: WorldBounds
) -> Heading:
    if not flockmates:
        raise PreconditionError("cohere needs at least one flockmate")
    # A flockmate sitting exactly on the boid has no bearing and is skipped.
    bearings = [
        (mate.id, geometry.bearing(boid.pos, mate.pos, bounds))
        for mate in flockmates
        if geometry.displacement(boid.pos, mate.pos, bounds) != (0.0, 0.0)
    ]
    if not bearings:
        return boid.heading
    mean, magnitude = geometry.circular_mean(angle for _, angle in bearings)
    if magnitude < DEGENERATE_EPSILON:
        mean = min(bearings)[1]
    turn = clamp_turn(towards_turn(boid, mean), params.max_cohere_turn)
    return geometry.normalize_heading(boid.heading + turn)


def flock_step(
    boid: BoidState, boids: Iterable[BoidState], params: FlockParams, bounds: WorldBounds
) -> tuple[Heading, TurnDecision]:
    flockmates = find_flockmates(boid, boids, params, bounds)
    if not flockmates:
        return boid.heading, NO_TURN

    nearest = find_nearest_neighbor(boid, flockmates, bounds)
    if geometry.distance(boid.pos, nearest.pos, bounds) <= params.min_separation:
        heading = separate(boid, nearest, params)
        rule = "separate"
    else:
        aligned = align(boid, average_flockmate_heading(flockmates), params)
        heading = cohere(boid.model_copy(update={"heading": aligned}), flockmates, params, bounds)
        rule = "align_cohere"
    turn = geometry.subtract_heading(heading, boid.heading)
    return heading, TurnDecision(rule_applied=rule, turn=turn)


def advance(boid: BoidState, params: FlockParams, bounds: WorldBounds) -> Position:
    rad = math.radians(boid.heading)
    return geometry.wrap_position(
        boid.pos.x + params.speed * math.sin(rad),
        boid.pos.y + params.speed * math.cos(rad),
        bounds,
    )


def advance_all(xy: np.ndarray, headings: np.ndarray, params: FlockParams, bounds: WorldBounds) -> np.ndarray:
    """``advance`` for every row of an ``(n, 2)`` coordinate array."""
    rad = np.radians(headings)
    return geometry.wrap_positions(
        xy[:, 0] + params.speed * np.sin(rad),
        xy[:, 1] + params.speed * np.cos(rad),
        bounds,
    )


# --- batch kernel -------------------------------------------------------------


@dataclass(frozen=True)
class FlockUpdate:
    headings: np.ndarray
    rules: np.ndarray
    turns: np.ndarray

    def decisions(self) -> list[TurnDecision]:
        return turn_decisions(self.rules, self.turns)


def _clamp(desired: np.ndarray, max_turn: float) -> np.ndarray:
    return np.copysign(np.minimum(np.abs(desired), max_turn), desired)


def _mean_heading(
    angles: np.ndarray, members: np.ndarray, fallback: np.ndarray
) -> np.ndarray:
    """Row-wise circular mean of ``angles`` over ``members``, ``fallback`` when degenerate."""
    rad = np.radians(angles)
    sx = np.where(members, np.sin(rad), 0.0).sum(axis=1)
    sy = np.where(members, np.cos(rad), 0.0).sum(axis=1)
    mean = geometry.normalize_headings(np.degrees(np.arctan2(sx, sy)))
    return np.where(np.hypot(sx, sy) < DEGENERATE_EPSILON, fallback, mean)


def flock_headings(
    xy: np.ndarray, headings: np.ndarray, params: FlockParams, bounds: WorldBounds
) -> FlockUpdate:
    """Apply ``flock_step`` to every boid of one snapshot.

    Rows must be ordered by boid id: ties between equally near neighbours and
    degenerate means fall back to the lowest row index.
    """
    n = len(headings)
    if n == 0:
        empty = np.empty(0)
        return FlockUpdate(headings=empty, rules=np.empty(0, dtype=int), turns=empty)
    rows = np.arange(n)
    dist = geometry.distance_matrix(xy, xy, bounds)
    mates = dist <= params.vision
    mates[rows, rows] = False
    has_mates = mates.any(axis=1)

    masked = np.where(mates, dist, np.inf)
    nearest = masked.argmin(axis=1)
    separating = has_mates & (masked[rows, nearest] <= params.min_separation)

    separated = geometry.normalize_headings(
        headings + _clamp(geometry.subtract_headings(headings, headings[nearest]), params.max_separate_turn)
    )

    first_mate = mates.argmax(axis=1)
    avg = _mean_heading(np.broadcast_to(headings, (n, n)), mates, headings[first_mate])
    aligned = geometry.normalize_headings(
        headings + _clamp(geometry.subtract_headings(avg, headings), params.max_align_turn)
    )

    dx, dy = geometry.displacement_matrix(xy, xy, bounds)
    bearings = geometry.normalize_headings(np.degrees(np.arctan2(dx, dy)))
    sighted = mates & ((dx != 0.0) | (dy != 0.0))
    first_sighted = sighted.argmax(axis=1)
    mean_bearing = _mean_heading(bearings, sighted, bearings[rows, first_sighted])
    cohered = geometry.normalize_headings(
        aligned + _clamp(geometry.subtract_headings(mean_bearing, aligned), params.max_cohere_turn)
    )
    cohered = np.where(sighted.any(axis=1), cohered, aligned)

    new = np.where(has_mates, np.where(separating, separated, cohered), headings)
    rules = np.where(
        has_mates, np.where(separating, RULE_SEPARATE, RULE_ALIGN_COHERE), RULE_NONE
    )
    turns = np.where(rules == RULE_NONE, 0.0, geometry.subtract_headings(new, headings))
    return FlockUpdate(headings=new, rules=rules, turns=turns)
