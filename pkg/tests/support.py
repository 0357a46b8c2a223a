import math

import numpy as np

from app.sim.models import BoidState, Position, WorldBounds

TORUS = WorldBounds()
BOUNDED = WorldBounds(topology="bounded")


def image_distance(a: Position, b: Position, bounds: WorldBounds) -> float:
    """Distance as the shortest of the nine periodic images on a torus."""
    if not bounds.is_torus:
        return math.hypot(a.x - b.x, a.y - b.y)
    return min(
        math.hypot(a.x - b.x + i * bounds.width, a.y - b.y + j * bounds.height)
        for i in (-1, 0, 1)
        for j in (-1, 0, 1)
    )


def make_boid(boid_id: int, x: float, y: float, heading: float = 0.0) -> BoidState:
    return BoidState(id=boid_id, pos=Position(x=x, y=y), heading=heading)


def random_boids(rng: np.random.Generator, n: int, bounds: WorldBounds) -> list[BoidState]:
    xs = rng.uniform(bounds.min_x, bounds.max_x, size=n)
    ys = rng.uniform(bounds.min_y, bounds.max_y, size=n)
    hs = rng.uniform(0.0, 360.0, size=n)
    return [make_boid(i, float(x), float(y), float(h) % 360.0) for i, (x, y, h) in enumerate(zip(xs, ys, hs))]


def clustered_boids(rng: np.random.Generator, n: int, spread: float = 4.0) -> list[BoidState]:
    """Boids packed near the origin so that most of them see each other."""
    xs = rng.uniform(-spread, spread, size=n)
    ys = rng.uniform(-spread, spread, size=n)
    hs = rng.uniform(0.0, 360.0, size=n)
    return [make_boid(i, float(x), float(y), float(h) % 360.0) for i, (x, y, h) in enumerate(zip(xs, ys, hs))]
