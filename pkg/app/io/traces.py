"""Trace and metrics codecs.

CSV traces have one row per boid and per sensor per tick, with reals written to
6 decimal places in fixed notation. JSONL traces hold one TickTrace per line
at full precision. Either format may open with a metadata record: the first
line of a JSONL trace, or a single ``# {...}`` comment line ahead of the CSV
header.
"""

import csv
import io
import json
from collections.abc import Sequence
from typing import Any, Literal, Optional

from pydantic import BaseModel, ValidationError

from app.core.config import settings
from app.core.errors import PreconditionError, TraceFormatError
from app.io.scenario import DEFAULTS, config_from_mapping, resolved_document
from app.sim import geometry, rng
from app.sim.metrics import TickMetrics
from app.sim.models import (
    BoidState,
    DetectionRecord,
    Position,
    SensorNode,
    SimConfig,
    TickTrace,
    TurnDecision,
)

TraceFormat = Literal["csv", "jsonl"]

CSV_HEADER = ["tick", "entity_kind", "entity_id", "x", "y", "heading", "count", "rule"]
METRICS_HEADER = [
    "tick",
    "polarization",
    "mean_flockmates",
    "n_components",
    "mean_component_polarization",
    "detecting_fraction",
]


class TraceMetadata(BaseModel):
    scenario: dict[str, Any]
    generator: str = rng.GENERATOR_ID
    streams: list[str] = list(rng.STREAMS)
    version: str = settings.version

    def config(self) -> SimConfig:
        return config_from_mapping(self.scenario)


class ParsedTrace(BaseModel):
    metadata: Optional[TraceMetadata] = None
    traces: list[TickTrace]


def build_metadata(config: SimConfig) -> TraceMetadata:
    return TraceMetadata(scenario=resolved_document(config))


def _fixed(value: float) -> str:
    return f"{value:.6f}"


def _heading(value: float) -> str:
    text = _fixed(value)
    # 359.9999996 would otherwise print as an out-of-range 360.000000
    return _fixed(0.0) if text == "360.000000" else text


def export_trace(
    traces: Sequence[TickTrace], format: TraceFormat = "csv", metadata: Optional[TraceMetadata] = None
) -> str:
    if not traces:
        raise PreconditionError("cannot export an empty trace")
    if format == "jsonl":
        lines = []
        if metadata is not None:
            lines.append(json.dumps({"metadata": metadata.model_dump()}, sort_keys=True))
        lines.extend(row.model_dump_json() for row in traces)
        return "\n".join(lines) + "\n"

    buffer = io.StringIO()
    if metadata is not None:
        buffer.write("# " + json.dumps(metadata.model_dump(), sort_keys=True) + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in traces:
        for boid, decision in zip(row.boids, row.decisions):
            writer.writerow(
                [
                    row.tick,
                    "boid",
                    boid.id,
                    _fixed(boid.pos.x),
                    _fixed(boid.pos.y),
                    _heading(boid.heading),
                    "",
                    decision.rule_applied,
                ]
            )
        for sensor in row.sensors:
            writer.writerow(
                [
                    row.tick,
                    "sensor",
                    sensor.id,
                    _fixed(sensor.pos.x),
                    _fixed(sensor.pos.y),
                    "",
                    sensor.count_nearby_boids,
                    "",
                ]
            )
    return buffer.getvalue()


def parse_trace(document: str) -> ParsedTrace:
    lines = document.splitlines()
    first = next((line for line in lines if line.strip()), "")
    if first.lstrip().startswith("{"):
        return _parse_jsonl(lines)
    return _parse_csv(lines)


def _parse_jsonl(lines: list[str]) -> ParsedTrace:
    metadata = None
    traces = []
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            if metadata is None and not traces and isinstance(record, dict) and "metadata" in record:
                metadata = TraceMetadata.model_validate(record["metadata"])
            else:
                traces.append(TickTrace.model_validate(record))
        except (ValidationError, ValueError, KeyError) as exc:
            raise TraceFormatError(f"invalid trace record: {exc}", line=number) from None
    if not traces:
        raise TraceFormatError("trace holds no tick records")
    return ParsedTrace(metadata=metadata, traces=traces)


def _parse_csv(lines: list[str]) -> ParsedTrace:
    metadata = None
    offset = 0
    if lines and lines[0].startswith("#"):
        try:
            metadata = TraceMetadata.model_validate_json(lines[0][1:].strip())
        except ValidationError as exc:
            raise TraceFormatError(f"invalid metadata: {exc}", line=1) from None
        offset = 1
    radius = metadata.scenario.get("sensor_radius", DEFAULTS["sensor_radius"]) if metadata else DEFAULTS["sensor_radius"]

    reader = csv.reader(lines[offset:])
    header = next(reader, None)
    if header != CSV_HEADER:
        raise TraceFormatError(f"expected header {','.join(CSV_HEADER)}", line=offset + 1)

    rows: dict[int, TickTrace] = {}
    previous: dict[int, float] = {}
    for record in reader:
        number = offset + reader.line_num
        if not record:
            continue
        try:
            tick_text, kind, entity_text, x, y, heading, count, rule = record
            tick = int(tick_text)
            row = rows.setdefault(
                tick, TickTrace(tick=tick, boids=[], sensors=[], detections=[], decisions=[])
            )
            pos = Position(x=float(x), y=float(y))
            if kind == "boid":
                boid = BoidState(id=int(entity_text), pos=pos, heading=float(heading))
                turn = 0.0
                if rule != "none" and boid.id in previous:
                    turn = geometry.subtract_heading(boid.heading, previous[boid.id])
                previous[boid.id] = boid.heading
                row.boids.append(boid)
                row.decisions.append(TurnDecision(rule_applied=rule, turn=turn))
            elif kind == "sensor":
                sensor = SensorNode(id=int(entity_text), pos=pos, radius=radius, count_nearby_boids=int(count))
                row.sensors.append(sensor)
                row.detections.append(
                    DetectionRecord(tick=tick, sensor_id=sensor.id, count=sensor.count_nearby_boids, detecting=sensor.detecting)
                )
            else:
                raise ValueError(f"unknown entity kind {kind!r}")
        except (ValidationError, ValueError) as exc:
            raise TraceFormatError(f"invalid row: {exc}", line=number) from None
    if not rows:
        raise TraceFormatError("trace holds no tick records")
    return ParsedTrace(metadata=metadata, traces=list(rows.values()))


def export_metrics(rows: Sequence[TickMetrics]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(METRICS_HEADER)
    for row in rows:
        writer.writerow(
            [
                row.tick,
                _fixed(row.polarization),
                _fixed(row.mean_flockmates),
                row.n_components,
                _fixed(row.mean_component_polarization),
                _fixed(row.detecting_fraction),
            ]
        )
    return buffer.getvalue()
