"""SVG renderings of a run.

``tracks`` draws the path of every boid over the whole run, one ``<g>`` per
boid; a path is split into several polylines wherever it jumps across the torus
seam. ``snapshot`` draws the final tick: sensors as circles of their sensing
radius, dark while detecting and light otherwise, with the boids on top.
"""

import math
import xml.etree.ElementTree as ET
from collections.abc import Sequence
from typing import Literal

from app.core.errors import PreconditionError
from app.sim.models import Position, TickTrace, WorldBounds

PlotStyle = Literal["tracks", "snapshot"]

SVG_NS = "http://www.w3.org/2000/svg"
STYLESHEET = """
.track-segment { fill: none; stroke: #1f4e79; stroke-width: 0.15; stroke-linejoin: round; }
.sensor { stroke: #555555; stroke-width: 0.1; }
.sensor.detecting { fill: #111111; fill-opacity: 0.85; }
.sensor.idle { fill: #cccccc; fill-opacity: 0.5; }
.boid { fill: #c0392b; }
.heading { stroke: #c0392b; stroke-width: 0.12; }
"""


def _num(value: float) -> str:
    return f"{value:.3f}"


def split_track(points: Sequence[Position], bounds: WorldBounds) -> list[list[Position]]:
    """Break a path wherever one step is longer than half the world on an axis."""
    segments: list[list[Position]] = []
    for point in points:
        if segments:
            last = segments[-1][-1]
            if abs(point.x - last.x) > bounds.width / 2 or abs(point.y - last.y) > bounds.height / 2:
                segments.append([point])
                continue
            segments[-1].append(point)
        else:
            segments.append([point])
    return segments


def _canvas(bounds: WorldBounds) -> tuple[ET.Element, ET.Element]:
    root = ET.Element(
        "svg",
        {
            "xmlns": SVG_NS,
            "viewBox": f"{_num(bounds.min_x)} {_num(bounds.min_y)} {_num(bounds.width)} {_num(bounds.height)}",
            "width": "700",
            "height": _num(700 * bounds.height / bounds.width),
        },
    )
    ET.SubElement(root, "style").text = STYLESHEET
    ET.SubElement(
        root,
        "rect",
        {
            "x": _num(bounds.min_x),
            "y": _num(bounds.min_y),
            "width": _num(bounds.width),
            "height": _num(bounds.height),
            "fill": "#ffffff",
            "stroke": "#999999",
            "stroke-width": "0.2",
        },
    )
    # World y grows north, SVG y grows down: mirror around the horizontal midline.
    world = ET.SubElement(
        root, "g", {"transform": f"matrix(1 0 0 -1 0 {_num(bounds.min_y + bounds.max_y)})"}
    )
    return root, world


def _draw_tracks(world: ET.Element, traces: Sequence[TickTrace], bounds: WorldBounds) -> None:
    paths: dict[int, list[Position]] = {}
    for row in traces:
        for boid in row.boids:
            paths.setdefault(boid.id, []).append(boid.pos)
    for boid_id in sorted(paths):
        group = ET.SubElement(world, "g", {"class": "track", "id": f"boid-{boid_id}"})
        for segment in split_track(paths[boid_id], bounds):
            ET.SubElement(
                group,
                "polyline",
                {
                    "class": "track-segment",
                    "points": " ".join(f"{_num(p.x)},{_num(p.y)}" for p in segment),
                },
            )


def _draw_snapshot(world: ET.Element, row: TickTrace) -> None:
    for sensor in row.sensors:
        state = "detecting" if sensor.count_nearby_boids > 0 else "idle"
        ET.SubElement(
            world,
            "circle",
            {
                "class": f"sensor {state}",
                "id": f"sensor-{sensor.id}",
                "cx": _num(sensor.pos.x),
                "cy": _num(sensor.pos.y),
                "r": _num(sensor.radius),
            },
        )
    for boid in row.boids:
        rad = math.radians(boid.heading)
        ET.SubElement(
            world,
            "circle",
            {"class": "boid", "id": f"boid-{boid.id}", "cx": _num(boid.pos.x), "cy": _num(boid.pos.y), "r": "0.35"},
        )
        ET.SubElement(
            world,
            "line",
            {
                "class": "heading",
                "x1": _num(boid.pos.x),
                "y1": _num(boid.pos.y),
                "x2": _num(boid.pos.x + 0.9 * math.sin(rad)),
                "y2": _num(boid.pos.y + 0.9 * math.cos(rad)),
            },
        )


def plot_tracks(traces: Sequence[TickTrace], bounds: WorldBounds, style: PlotStyle = "tracks") -> str:
    if not traces:
        raise PreconditionError("cannot plot an empty trace")
    root, world = _canvas(bounds)
    if style == "tracks":
        _draw_tracks(world, traces, bounds)
    else:
        _draw_snapshot(world, traces[-1])
    return ET.tostring(root, encoding="unicode")
