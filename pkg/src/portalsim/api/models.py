"""Request and response shapes for the HTTP service."""

from __future__ import annotations

from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field

VariantName = Literal[
    "baseline", "shaview", "teamportal", "teamportal-plus", "snap", "drop"
]
TaskName = Literal["simple", "complex"]
PolicyName = Literal["divide", "window"]


class SessionSettings(BaseModel):
    variant: VariantName = "teamportal-plus"
    task: TaskName = "complex"
    seed: int = 0
    duration_s: float = Field(600.0, gt=0)
    tick_hz: int = Field(50, gt=0)
    latency_ms: float = Field(50.0, ge=0)
    jitter_ms: float = Field(5.0, ge=0)
    policy: Optional[PolicyName] = None


class MetricsModel(BaseModel):
    matched: int
    placed: int
    accuracy: Optional[float]
    accumulated_distance: Dict[str, float]
    teleport_count: Dict[str, int]
    use_time: int
    ticks: int


class RunResponse(BaseModel):
    metrics: MetricsModel
    reason: str
    log_ndjson: str


class MetricsRequest(BaseModel):
    log_ndjson: str


class SweepRequest(BaseModel):
    variants: List[VariantName] = Field(min_length=1)
    seeds: List[int] = Field(min_length=1)
    task: TaskName = "complex"
    duration_s: float = Field(600.0, gt=0)
    tick_hz: int = Field(50, gt=0)
    latency_ms: float = Field(50.0, ge=0)
    jitter_ms: float = Field(5.0, ge=0)
    workers: int = Field(1, ge=1, le=64)


class SweepResponse(BaseModel):
    csv: str
    summary: Dict[str, Dict[str, float]]


class WorldRequest(BaseModel):
    task: TaskName = "complex"
    seed: int = 0


class HealthResponse(BaseModel):
    status: str
    version: str
