"""HTTP service exposing session runs, metrics, sweeps, and worlds.

Every request is self-contained; nothing is kept between calls, so
the service can run with any number of workers.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..agents import run_agents
from ..config import SessionConfig
from ..errors import GenerationFailure, MalformedLog
from ..metrics import compute_metrics
from ..sessionlog import SESSION_END, SessionLog
from ..sweep import default_policy, rows_to_csv, run_sweep, summarize, sweep_configs
from ..viewsync import Variant
from ..world import generate_task
from .models import (
    HealthResponse,
    MetricsModel,
    MetricsRequest,
    RunResponse,
    SessionSettings,
    SweepRequest,
    SweepResponse,
    WorldRequest,
)


def _config_from(settings: SessionSettings) -> SessionConfig:
    variant = Variant(settings.variant)
    policy = settings.policy or default_policy(variant)
    return SessionConfig(
        variant=variant,
        task=settings.task,
        seed=settings.seed,
        duration_s=settings.duration_s,
        tick_hz=settings.tick_hz,
        latency_ms=settings.latency_ms,
        jitter_ms=settings.jitter_ms,
        policy1=policy,
        policy2=policy,
    )


def _metrics_model(log: SessionLog) -> MetricsModel:
    return MetricsModel(**compute_metrics(log).to_dict())


def create_app() -> FastAPI:
    app = FastAPI(title="portalsim", version=__version__)

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/sessions/run", response_model=RunResponse)
    def run(settings: SessionSettings) -> RunResponse:
        config = _config_from(settings)
        try:
            log = run_agents(config)
        except GenerationFailure as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        reason = next(r["payload"]["reason"] for r in log.of_kind(SESSION_END))
        return RunResponse(
            metrics=_metrics_model(log), reason=reason, log_ndjson=log.to_ndjson()
        )

    @app.post("/metrics", response_model=MetricsModel)
    def metrics(request: MetricsRequest) -> MetricsModel:
        try:
            log = SessionLog.from_ndjson(request.log_ndjson)
            return _metrics_model(log)
        except MalformedLog as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.post("/sweeps/run", response_model=SweepResponse)
    def sweep(request: SweepRequest) -> SweepResponse:
        base = SessionConfig(
            variant=Variant(request.variants[0]),
            task=request.task,
            seed=request.seeds[0],
            duration_s=request.duration_s,
            tick_hz=request.tick_hz,
            latency_ms=request.latency_ms,
            jitter_ms=request.jitter_ms,
        )
        configs = sweep_configs(
            [Variant(v) for v in request.variants], request.seeds, base
        )
        workers = request.workers if request.workers > 1 else None
        rows = run_sweep(configs, workers=workers)
        return SweepResponse(csv=rows_to_csv(rows), summary=summarize(rows))

    @app.post("/worlds/generate")
    def world(request: WorldRequest) -> dict:
        # Same derivation a session uses, so seed N here shows the
        # exact layout a session with seed N plays.
        config = SessionConfig(
            variant=Variant.BASELINE, task=request.task, seed=request.seed
        )
        try:
            task = generate_task(request.task, config.world_seed, config.world_params)
        except GenerationFailure as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return task.layout_dict()

    return app
