"""Domain records shared by every simulation module.

Headings are compass degrees: 0 points to +y (north) and angles grow clockwise,
so a heading h moves a boid along (sin h, cos h). Coordinates are real-valued
world units.

Value records do not enforce the range predicates themselves (a heading of 400
is representable); those predicates are checked at runtime by
``app.sim.engine.check_invariants`` so that a corrupted trace can be loaded and
reported instead of refused.
"""

from collections.abc import Mapping, Sequence
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from pydantic_core import PydanticCustomError

from app.core.config import InvariantMode

Topology = Literal["torus", "bounded"]
RuleApplied = Literal["separate", "align_cohere", "none"]

# A heading is a bare float of compass degrees in [0, 360) once normalized.
Heading = float

RULE_NONE, RULE_SEPARATE, RULE_ALIGN_COHERE = 0, 1, 2
RULE_NAMES: tuple[RuleApplied, ...] = ("none", "separate", "align_cohere")


def _order_error(field: str, other: str, message: str) -> PydanticCustomError:
    return PydanticCustomError("field_order", message, {"field": field, "other": other})


class WorldBounds(BaseModel):
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    min_x: float = -35.0
    max_x: float = 35.0
    min_y: float = -35.0
    max_y: float = 35.0
    topology: Topology = "torus"

    @model_validator(mode="after")
    def _check_extent(self) -> "WorldBounds":
        if not self.min_x < self.max_x:
            raise _order_error("min_x", "max_x", "min_x must be smaller than max_x")
        if not self.min_y < self.max_y:
            raise _order_error("min_y", "max_y", "min_y must be smaller than max_y")
        return self

    @property
    def width(self) -> float:
        return self.max_x - self.min_x

    @property
    def height(self) -> float:
        return self.max_y - self.min_y

    @property
    def is_torus(self) -> bool:
        return self.topology == "torus"

    def contains(self, x: float, y: float) -> bool:
        return self.min_x <= x <= self.max_x and self.min_y <= y <= self.max_y


class Position(BaseModel):
    model_config = ConfigDict(frozen=True)

    x: float
    y: float


class BoidState(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: int
    pos: Position
    heading: Heading


class FlockParams(BaseModel):
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    min_separation: float = Field(1.0, ge=0)
    max_align_turn: float = Field(5.0, ge=0)
    max_cohere_turn: float = Field(3.0, ge=0)
    max_separate_turn: float = Field(1.5, ge=0)
    # vision <= 360 is kept as a validation rule even though vision is a radius
    vision: float = Field(3.0, ge=0, le=360)
    speed: float = Field(1.0, gt=0)

    @model_validator(mode="after")
    def _check_separation(self) -> "FlockParams":
        if not self.min_separation < self.vision:
            raise _order_error("min_separation", "vision", "min_separation must be smaller than vision")
        return self


class TurnDecision(BaseModel):
    """Which branch of the flocking rule fired for one boid in one tick."""

    model_config = ConfigDict(frozen=True)

    rule_applied: RuleApplied = "none"
    turn: float = 0.0

    @model_validator(mode="after")
    def _check_none_is_still(self) -> "TurnDecision":
        if self.rule_applied == "none" and self.turn != 0.0:
            raise ValueError("rule 'none' must carry a zero turn")
        return self


class SensorNode(BaseModel):
    id: int
    pos: Position
    radius: float = Field(gt=0)
    count_nearby_boids: int = 0

    @property
    def detecting(self) -> bool:
        return self.count_nearby_boids > 0


class DetectionRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    tick: int
    sensor_id: int
    count: int
    detecting: bool


class SimConfig(BaseModel):
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    bounds: WorldBounds = WorldBounds()
    flock_params: FlockParams = FlockParams()
    n_boids: int = Field(ge=0)
    n_sensors: int = Field(25, ge=0)
    sensor_radius: float = Field(5.0, gt=0)
    seed: int = Field(ge=0)
    ticks: int = Field(1000, ge=0)
    invariant_mode: InvariantMode = "enforce"

    @model_validator(mode="after")
    def _check_population(self) -> "SimConfig":
        if self.ticks >= 1 and self.n_boids < 1:
            raise _order_error("n_boids", "ticks", "n_boids must be at least 1 when ticks >= 1")
        return self


class TickTrace(BaseModel):
    """Everything needed to replay, measure or draw one tick."""

    tick: int
    boids: list[BoidState]
    sensors: list[SensorNode]
    detections: list[DetectionRecord]
    decisions: list[TurnDecision]


class Violation(BaseModel):
    model_config = ConfigDict(frozen=True)

    tick: int
    entity_kind: Literal["boid", "sensor", "trace"]
    entity_id: Optional[int] = None
    predicate: str
    detail: str = ""


def turn_decisions(rules: np.ndarray, turns: np.ndarray) -> list[TurnDecision]:
    return [
        TurnDecision.model_construct(rule_applied=RULE_NAMES[rule], turn=turn if rule != RULE_NONE else 0.0)
        for rule, turn in zip(rules.tolist(), turns.tolist())
    ]


class SimulationState(BaseModel):
    """One tick of a run.

    The flock is held as parallel arrays: ``ids``, ``xy`` (an ``(n, 2)`` array),
    ``headings`` and the rule code and turn each boid applied on the way into
    this tick. ``boids`` and ``decisions`` build record views on demand.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    config: SimConfig
    tick: int = 0
    ids: np.ndarray
    xy: np.ndarray
    headings: np.ndarray
    rules: np.ndarray
    turns: np.ndarray
    sensors: list[SensorNode]
    # Deployment positions, the reference for the sensor immobility predicate
    sensor_origin: dict[int, Position]
    detections: list[DetectionRecord] = []
    violations: list[Violation] = []

    @classmethod
    def from_records(
        cls,
        config: SimConfig,
        boids: Sequence[BoidState],
        sensors: Sequence[SensorNode],
        sensor_origin: Mapping[int, Position],
        *,
        tick: int = 0,
        decisions: Optional[Sequence[TurnDecision]] = None,
        detections: Sequence[DetectionRecord] = (),
    ) -> "SimulationState":
        if decisions is None:
            decisions = [TurnDecision()] * len(boids)
        return cls(
            config=config,
            tick=tick,
            ids=np.array([boid.id for boid in boids], dtype=np.int64),
            xy=np.array([(boid.pos.x, boid.pos.y) for boid in boids], dtype=float).reshape(-1, 2),
            headings=np.array([boid.heading for boid in boids], dtype=float),
            rules=np.array([RULE_NAMES.index(d.rule_applied) for d in decisions], dtype=np.int64),
            turns=np.array([d.turn for d in decisions], dtype=float),
            sensors=list(sensors),
            sensor_origin=dict(sensor_origin),
            detections=list(detections),
        )

    def with_boids(self, boids: Sequence[BoidState]) -> "SimulationState":
        """This state with its flock replaced by ``boids``, in the given storage order."""
        return SimulationState.from_records(
            self.config, boids, self.sensors, self.sensor_origin, tick=self.tick, detections=self.detections
        )

    @property
    def boids(self) -> list[BoidState]:
        return [
            BoidState.model_construct(id=boid_id, pos=Position.model_construct(x=x, y=y), heading=heading)
            for boid_id, (x, y), heading in zip(self.ids.tolist(), self.xy.tolist(), self.headings.tolist())
        ]

    @property
    def decisions(self) -> list[TurnDecision]:
        return turn_decisions(self.rules, self.turns)

    def to_trace(self) -> TickTrace:
        order = np.argsort(self.ids, kind="stable").tolist()
        boids = self.boids
        decisions = self.decisions
        return TickTrace.model_construct(
            tick=self.tick,
            boids=[boids[row] for row in order],
            sensors=[sensor.model_copy() for sensor in self.sensors],
            detections=list(self.detections),
            decisions=[decisions[row] for row in order],
        )
