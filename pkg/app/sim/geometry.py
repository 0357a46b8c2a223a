"""Angular and planar primitives.

Scalar functions are the reference implementations; the ``*_matrix`` helpers
apply the same arithmetic to numpy arrays so that batch code and per-boid code
agree on every comparison against a radius.
"""

import math
from collections.abc import Iterable

import numpy as np

from app.core.errors import InvalidAngleError
from app.sim.models import Heading, Position, WorldBounds

# Vector sums shorter than this have no meaningful direction.
DEGENERATE_EPSILON = 1e-9


def normalize_heading(raw: float) -> Heading:
    if not math.isfinite(raw):
        raise InvalidAngleError(raw)
    result = raw % 360.0
    # A tiny negative input rounds up to exactly 360.0
    if result >= 360.0:
        result = 0.0
    return result


def subtract_heading(a: Heading, b: Heading) -> float:
    """Signed minimal difference a - b in (-180, 180]."""
    diff = (a - b) % 360.0
    if diff > 180.0:
        diff -= 360.0
    return diff


def wrap_position(x: float, y: float, bounds: WorldBounds) -> Position:
    if bounds.is_torus:
        x = _wrap_axis(x, bounds.min_x, bounds.width)
        y = _wrap_axis(y, bounds.min_y, bounds.height)
    else:
        x = min(max(x, bounds.min_x), bounds.max_x)
        y = min(max(y, bounds.min_y), bounds.max_y)
    return Position(x=x, y=y)


def _wrap_axis(value: float, low: float, extent: float) -> float:
    wrapped = low + (value - low) % extent
    if wrapped >= low + extent:
        wrapped = low
    return wrapped


def _axis_gap(delta: float, extent: float, torus: bool) -> float:
    gap = abs(delta)
    if torus:
        gap = min(gap, extent - gap)
    return gap


def distance(a: Position, b: Position, bounds: WorldBounds) -> float:
    dx = _axis_gap(a.x - b.x, bounds.width, bounds.is_torus)
    dy = _axis_gap(a.y - b.y, bounds.height, bounds.is_torus)
    return math.sqrt(dx * dx + dy * dy)


def _signed_axis(delta: float, extent: float, torus: bool) -> float:
    if torus and abs(delta) > extent - abs(delta):
        delta -= math.copysign(extent, delta)
    return delta


def displacement(a: Position, b: Position, bounds: WorldBounds) -> tuple[float, float]:
    """Shortest vector from a to b, wrapping across the seam on a torus."""
    return (
        _signed_axis(b.x - a.x, bounds.width, bounds.is_torus),
        _signed_axis(b.y - a.y, bounds.height, bounds.is_torus),
    )


def bearing(a: Position, b: Position, bounds: WorldBounds) -> Heading:
    dx, dy = displacement(a, b, bounds)
    return normalize_heading(math.degrees(math.atan2(dx, dy)))


def circular_mean(angles: Iterable[Heading]) -> tuple[Heading, float]:
    """Heading of the summed unit vectors and the length of that sum."""
    sx = 0.0
    sy = 0.0
    for angle in angles:
        rad = math.radians(angle)
        sx += math.sin(rad)
        sy += math.cos(rad)
    magnitude = math.hypot(sx, sy)
    if magnitude < DEGENERATE_EPSILON:
        return 0.0, magnitude
    return normalize_heading(math.degrees(math.atan2(sx, sy))), magnitude


# --- numpy counterparts -------------------------------------------------------


def normalize_headings(raw: np.ndarray) -> np.ndarray:
    result = np.mod(raw, 360.0)
    result[result >= 360.0] = 0.0
    return result


def subtract_headings(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    diff = np.mod(a - b, 360.0)
    return np.where(diff > 180.0, diff - 360.0, diff)


def wrap_positions(xs: np.ndarray, ys: np.ndarray, bounds: WorldBounds) -> np.ndarray:
    """``wrap_position`` for whole coordinate columns; returns an ``(n, 2)`` array."""
    if bounds.is_torus:
        xs = _wrap_axis_array(xs, bounds.min_x, bounds.width)
        ys = _wrap_axis_array(ys, bounds.min_y, bounds.height)
    else:
        xs = np.clip(xs, bounds.min_x, bounds.max_x)
        ys = np.clip(ys, bounds.min_y, bounds.max_y)
    return np.column_stack((xs, ys))


def _wrap_axis_array(values: np.ndarray, low: float, extent: float) -> np.ndarray:
    wrapped = low + np.mod(values - low, extent)
    return np.where(wrapped >= low + extent, low, wrapped)


def inside(xy: np.ndarray, bounds: WorldBounds) -> np.ndarray:
    """Row-wise ``bounds.contains`` for an ``(n, 2)`` coordinate array."""
    xs, ys = xy[:, 0], xy[:, 1]
    return (bounds.min_x <= xs) & (xs <= bounds.max_x) & (bounds.min_y <= ys) & (ys <= bounds.max_y)


def displacement_matrix(
    origins: np.ndarray, targets: np.ndarray, bounds: WorldBounds
) -> tuple[np.ndarray, np.ndarray]:
    """Signed minimal displacements ``targets[j] - origins[i]`` per axis.

    ``origins`` and ``targets`` are ``(n, 2)`` coordinate arrays.
    """
    dx = targets[None, :, 0] - origins[:, None, 0]
    dy = targets[None, :, 1] - origins[:, None, 1]
    if bounds.is_torus:
        dx = _signed_axis_array(dx, bounds.width)
        dy = _signed_axis_array(dy, bounds.height)
    return dx, dy


def _signed_axis_array(delta: np.ndarray, extent: float) -> np.ndarray:
    gap = np.abs(delta)
    return np.where(gap > extent - gap, delta - np.copysign(extent, delta), delta)


def distance_matrix(origins: np.ndarray, targets: np.ndarray, bounds: WorldBounds) -> np.ndarray:
    dx = np.abs(origins[:, None, 0] - targets[None, :, 0])
    dy = np.abs(origins[:, None, 1] - targets[None, :, 1])
    if bounds.is_torus:
        dx = np.minimum(dx, bounds.width - dx)
        dy = np.minimum(dy, bounds.height - dy)
    return np.sqrt(dx * dx + dy * dy)


def coordinates(positions: Iterable[Position]) -> np.ndarray:
    return np.array([(p.x, p.y) for p in positions], dtype=float).reshape(-1, 2)
