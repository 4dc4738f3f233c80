"""Behavioral metrics derived from session logs.

Movement is tracked as a thinned planar trace: a new (x, z) sample is
recorded only when the player has moved strictly more than the
threshold from the last recorded sample.  Accumulated distance is the
planar path length over those samples.  The remaining metrics are
simple counts over log records.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import MalformedLog
from .geometry import Vec3
from . import sessionlog
from .sessionlog import SessionLog

RECORD_THRESHOLD = 0.10


@dataclass
class MovementTrace:
    threshold: float = RECORD_THRESHOLD
    samples: List[Tuple[float, float]] = field(default_factory=list)

    def record(self, x: float, z: float) -> bool:
        """Append (x, z) if it moved past the threshold; report whether it did."""
        if not self.samples:
            self.samples.append((x, z))
            return True
        lx, lz = self.samples[-1]
        dx = x - lx
        dz = z - lz
        if math.sqrt(dx * dx + dz * dz) > self.threshold:
            self.samples.append((x, z))
            return True
        return False


def record_position(trace: MovementTrace, position: Vec3) -> bool:
    return trace.record(position.x, position.z)


def accumulated_distance(trace: MovementTrace) -> float:
    """Planar path length over recorded samples; 0 for fewer than 2."""
    samples = trace.samples
    total = 0.0
    for i in range(1, len(samples)):
        dx = samples[i][0] - samples[i - 1][0]
        dz = samples[i][1] - samples[i - 1][1]
        total += math.sqrt(dx * dx + dz * dz)
    return total


@dataclass(frozen=True)
class Metrics:
    matched: int
    placed: int
    accuracy: Optional[float]
    accumulated_distance: Dict[int, float]
    teleport_count: Dict[int, int]
    use_time: int
    ticks: int

    def to_dict(self) -> dict:
        return {
            "matched": self.matched,
            "placed": self.placed,
            "accuracy": self.accuracy,
            "accumulated_distance": {str(p): d for p, d in self.accumulated_distance.items()},
            "teleport_count": {str(p): c for p, c in self.teleport_count.items()},
            "use_time": self.use_time,
            "ticks": self.ticks,
        }


def compute_metrics(log: SessionLog) -> Metrics:
    """Single pass over a complete log; every field is a pure recount."""
    log.validate_complete()
    placed = 0
    matched = 0
    teleports = {1: 0, 2: 0}
    use_time = 0
    ticks = 0
    traces = {1: MovementTrace(), 2: MovementTrace()}
    for rec in log.records:
        kind = rec["kind"]
        if kind == sessionlog.PLACEMENT:
            placed += 1
            if rec["payload"]["correct"]:
                matched += 1
        elif kind == sessionlog.INPUT:
            if not rec.get("applied", False):
                continue
            action = rec["action"]
            player = rec["player"]
            if player not in (1, 2):
                raise MalformedLog(f"input record with bad player {player!r}")
            if action == "teleport":
                teleports[player] += 1
            elif action == "transfer":
                use_time += 1
        elif kind == sessionlog.MOVE_SAMPLE:
            p = rec["player"]
            if p not in traces:
                raise MalformedLog(f"move_sample with bad player {p!r}")
            traces[p].samples.append((rec["payload"]["x"], rec["payload"]["z"]))
        elif kind == sessionlog.SESSION_END:
            ticks = rec["tick"]
    accuracy = (matched / placed) if placed > 0 else None
    return Metrics(
        matched=matched,
        placed=placed,
        accuracy=accuracy,
        accumulated_distance={p: accumulated_distance(t) for p, t in traces.items()},
        teleport_count=teleports,
        use_time=use_time,
        ticks=ticks,
    )


def least_squares_slope(pairs: Sequence[Tuple[float, float]]) -> Optional[float]:
    """Slope of the least-squares line through (x, y) pairs.

    None when the x values have no variance (slope undefined).
    """
    n = len(pairs)
    if n < 2:
        return None
    mean_x = sum(x for x, _ in pairs) / n
    mean_y = sum(y for _, y in pairs) / n
    sxx = sum((x - mean_x) ** 2 for x, _ in pairs)
    if sxx == 0.0:
        return None
    sxy = sum((x - mean_x) * (y - mean_y) for x, y in pairs)
    return sxy / sxx
