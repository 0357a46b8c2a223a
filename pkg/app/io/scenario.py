"""Scenario documents: flat TOML key/value files resolved into a SimConfig.

Only ``n_boids`` and ``seed`` are required. Every other key falls back to the
defaults below, which are calibration values rather than measured ones, apart
from the +/-35 world extent.
"""

import re
import tomllib
from typing import Any, Literal, NoReturn, Optional

from pydantic import BaseModel, ConfigDict, ValidationError

from app.core.config import InvariantMode, settings
from app.core.errors import ConfigError, ConfigParseError
from app.sim.models import FlockParams, SimConfig, Topology, WorldBounds

DEFAULTS: dict[str, Any] = {
    "min_x": -35.0,
    "max_x": 35.0,
    "min_y": -35.0,
    "max_y": 35.0,
    "topology": "torus",
    "vision": 3.0,
    "min_separation": 1.0,
    "max_align_turn": 5.0,
    "max_cohere_turn": 3.0,
    "max_separate_turn": 1.5,
    "speed": 1.0,
    "n_sensors": 25,
    "sensor_radius": 5.0,
    "ticks": 1000,
}

_BOUNDS_KEYS = ("min_x", "max_x", "min_y", "max_y", "topology")
_FLOCK_KEYS = ("min_separation", "max_align_turn", "max_cohere_turn", "max_separate_turn", "vision", "speed")
_LINE_RE = re.compile(r"line (\d+)")


class ScenarioFile(BaseModel):
    """Every SimConfig field as one flat document."""

    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)

    n_boids: int
    seed: int
    ticks: int = DEFAULTS["ticks"]
    n_sensors: int = DEFAULTS["n_sensors"]
    sensor_radius: float = DEFAULTS["sensor_radius"]
    min_x: float = DEFAULTS["min_x"]
    max_x: float = DEFAULTS["max_x"]
    min_y: float = DEFAULTS["min_y"]
    max_y: float = DEFAULTS["max_y"]
    topology: Topology = DEFAULTS["topology"]
    vision: float = DEFAULTS["vision"]
    min_separation: float = DEFAULTS["min_separation"]
    max_align_turn: float = DEFAULTS["max_align_turn"]
    max_cohere_turn: float = DEFAULTS["max_cohere_turn"]
    max_separate_turn: float = DEFAULTS["max_separate_turn"]
    speed: float = DEFAULTS["speed"]
    invariant_mode: Optional[InvariantMode] = None


class ScenarioDocument(ScenarioFile):
    """A scenario file plus where the CLI should write its outputs."""

    trace_path: Optional[str] = None
    trace_format: Optional[Literal["csv", "jsonl"]] = None
    metrics_path: Optional[str] = None
    plot_path: Optional[str] = None
    plot_style: Literal["tracks", "snapshot"] = "tracks"


def _problems(exc: ValidationError) -> list[tuple[str, str]]:
    problems = []
    for error in exc.errors():
        field = ".".join(str(part) for part in error["loc"])
        if not field:
            field = error.get("ctx", {}).get("field", "scenario")
        rule = "required" if error["type"] == "missing" else error["msg"]
        problems.append((field, rule))
    return problems


def _raise_config_error(exc: ValidationError) -> NoReturn:
    problems = _problems(exc)
    raise ConfigError(problems[0][0], problems[0][1], problems) from None


def load_document(text: str) -> dict[str, Any]:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        line = getattr(exc, "lineno", None)
        if line is None:
            match = _LINE_RE.search(str(exc))
            line = int(match.group(1)) if match else None
        raise ConfigParseError(str(exc), line=line) from None
    for key, value in data.items():
        if isinstance(value, dict):
            raise ConfigParseError(f"nested table [{key}] is not allowed; keys must be flat")
    return data


def parse_scenario(text: str) -> ScenarioDocument:
    try:
        return ScenarioDocument.model_validate(load_document(text))
    except ValidationError as exc:
        _raise_config_error(exc)


def resolve(scenario: ScenarioFile) -> SimConfig:
    values = scenario.model_dump()
    try:
        return SimConfig(
            bounds=WorldBounds(**{key: values[key] for key in _BOUNDS_KEYS}),
            flock_params=FlockParams(**{key: values[key] for key in _FLOCK_KEYS}),
            n_boids=values["n_boids"],
            n_sensors=values["n_sensors"],
            sensor_radius=values["sensor_radius"],
            seed=values["seed"],
            ticks=values["ticks"],
            invariant_mode=values["invariant_mode"] or settings.default_invariant_mode,
        )
    except ValidationError as exc:
        _raise_config_error(exc)


def parse_config(text: str) -> SimConfig:
    return resolve(parse_scenario(text))


def config_from_mapping(mapping: dict[str, Any]) -> SimConfig:
    try:
        scenario = ScenarioFile.model_validate(mapping)
    except ValidationError as exc:
        _raise_config_error(exc)
    return resolve(scenario)


def resolved_document(config: SimConfig) -> dict[str, Any]:
    """The flat key/value form of ``config``, with every default filled in."""
    document: dict[str, Any] = {
        "n_boids": config.n_boids,
        "seed": config.seed,
        "ticks": config.ticks,
        "n_sensors": config.n_sensors,
        "sensor_radius": config.sensor_radius,
    }
    document.update(config.bounds.model_dump())
    document.update(config.flock_params.model_dump())
    document["invariant_mode"] = config.invariant_mode
    return document
