"""Session configuration: one frozen value drives a whole run.

Every random decision in a session derives from the single user seed
through fixed substreams, so a config is a complete replay recipe.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

from .rng import derive_seed
from .viewsync import Variant, WindowParams
from .world import DEFAULT_PARAMS, WorldParams

DIVIDE = "divide"
WINDOW_POLICY = "window"

# Substream labels for derive_seed.
_STREAM_WORLD = 1
_STREAM_NET = 2
_STREAM_AGENT1 = 3
_STREAM_AGENT2 = 4


@dataclass(frozen=True)
class AgentParams:
    """Cost model for the scripted collaborators.

    The tick costs stand in for human reaction, inspection, and
    re-orientation effort; they are engineering knobs, not measured
    quantities.
    """

    reaction_ticks: int = 30
    recognition_ticks: int = 90
    recognition_range: float = 2.0
    scan_step_deg: float = 0.9
    turn_step_deg: float = 3.0
    reorient_ticks: int = 140
    grab_range: float = 2.2
    window_check_period: int = 30
    stability_ticks: int = 3
    hold_margin_ticks: int = 8
    lock_timeout_ticks: int = 60
    pull_timeout_ticks: int = 400
    show_range: float = 3.5
    show_timeout_ticks: int = 250
    scan_cone_deg: float = 28.0


@dataclass(frozen=True)
class SessionConfig:
    variant: Variant = Variant.TEAMPORTAL
    task: str = "simple"
    seed: int = 0
    duration_s: float = 600.0
    tick_hz: int = 50
    latency_ms: float = 50.0
    jitter_ms: float = 5.0
    policy1: str = DIVIDE
    policy2: str = DIVIDE
    window: WindowParams = field(default_factory=WindowParams)
    agent: AgentParams = field(default_factory=AgentParams)
    world_params: WorldParams = field(default_factory=lambda: DEFAULT_PARAMS)

    @property
    def world_seed(self) -> int:
        return derive_seed(self.seed, _STREAM_WORLD)

    @property
    def net_seed(self) -> int:
        return derive_seed(self.seed, _STREAM_NET)

    def agent_seed(self, player: int) -> int:
        return derive_seed(self.seed, _STREAM_AGENT1 if player == 1 else _STREAM_AGENT2)

    @property
    def duration_ticks(self) -> int:
        return round(self.duration_s * self.tick_hz)

    @property
    def dt_ms(self) -> float:
        return 1000.0 / self.tick_hz

    def policy_for(self, player: int) -> str:
        return self.policy1 if player == 1 else self.policy2

    def to_dict(self) -> dict:
        d = asdict(self)
        d["variant"] = self.variant.value
        d["world_seed"] = self.world_seed
        d["net_seed"] = self.net_seed
        return d
