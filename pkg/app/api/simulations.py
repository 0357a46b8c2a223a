"""
Simulation API routes.
Runs a scenario on the server and returns its metrics or an SVG rendering.
"""

from typing import Literal

from fastapi import APIRouter, HTTPException, Query, Request, status
from fastapi.responses import Response
from pydantic import BaseModel
from starlette.concurrency import run_in_threadpool

from app.core.config import settings
from app.core.limiter import limiter
from app.io.plotting import plot_tracks
from app.io.scenario import ScenarioFile, resolve
from app.io.traces import TraceMetadata, build_metadata
from app.sim.engine import run
from app.sim.metrics import SensorTotals, TickMetrics, compute_tick_metrics, detection_summary
from app.sim.models import SimConfig, TickTrace

router = APIRouter(prefix="/simulations", tags=["simulations"])


class RunResponse(BaseModel):
    metadata: TraceMetadata
    metrics: list[TickMetrics]
    detections: list[SensorTotals]


def _resolve_within_limits(body: ScenarioFile) -> SimConfig:
    config = resolve(body)
    if config.n_boids > settings.api_max_boids:
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail=f"n_boids exceeds the server limit ({settings.api_max_boids})",
        )
    if config.ticks > settings.api_max_ticks:
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail=f"ticks exceeds the server limit ({settings.api_max_ticks})",
        )
    return config


def _summarize(config: SimConfig, traces: list[TickTrace]) -> RunResponse:
    return RunResponse(
        metadata=build_metadata(config),
        metrics=[compute_tick_metrics(row, config.flock_params, config.bounds) for row in traces],
        detections=list(detection_summary(traces).values()),
    )


@router.post("/run", response_model=RunResponse, summary="Run a scenario and return its metrics")
@limiter.limit(settings.api_rate_limit)
async def run_simulation(request: Request, body: ScenarioFile) -> RunResponse:
    config = _resolve_within_limits(body)
    traces = await run_in_threadpool(run, config)
    return _summarize(config, traces)


@router.post("/plot", summary="Run a scenario and render it as SVG")
@limiter.limit(settings.api_rate_limit)
async def plot_simulation(
    request: Request,
    body: ScenarioFile,
    style: Literal["tracks", "snapshot"] = Query("tracks"),
) -> Response:
    config = _resolve_within_limits(body)
    traces = await run_in_threadpool(run, config)
    return Response(content=plot_tracks(traces, config.bounds, style), media_type="image/svg+xml")
