"""Headless engine for two-user shared-view collaboration studies.

A deterministic tick simulation of two players solving a cube
matching task in one room, under several ways of seeing and reaching
into the partner's view. Scripted agents drive full sessions over a
simulated lossless network, and every session writes a replayable
event log that the metrics layer consumes.
"""

from .agents import Blackboard, ScriptedAgent, run_agents
from .config import AgentParams, SessionConfig
from .errors import (
    CubeAlreadyPlaced,
    GenerationFailure,
    LockDenied,
    MalformedLog,
    NoWindow,
    NotHolding,
    ObjectPlaced,
    OutOfBounds,
    PortalSimError,
    SlotOccupied,
)
from .geometry import Aabb, Frustum, Orientation, Pose, Ray, Vec3
from .metrics import Metrics, MovementTrace, compute_metrics
from .netsim import Network, NetConfig, SimSession, run_session
from .rng import Xoshiro256StarStar, derive_seed, splitmix64
from .session import OwnershipTable, Session
from .sessionlog import SessionLog, load_log, save_log
from .sweep import default_policy, run_one, run_sweep, rows_to_csv, sweep_configs
from .viewsync import SyncEvent, Variant, ViewWindow, WindowParams
from .world import TaskWorld, WorldParams, generate_task

__version__ = "0.1.0"

__all__ = [
    "Aabb",
    "AgentParams",
    "Blackboard",
    "CubeAlreadyPlaced",
    "Frustum",
    "GenerationFailure",
    "LockDenied",
    "MalformedLog",
    "Metrics",
    "MovementTrace",
    "NetConfig",
    "Network",
    "NoWindow",
    "NotHolding",
    "ObjectPlaced",
    "Orientation",
    "OutOfBounds",
    "OwnershipTable",
    "PortalSimError",
    "Pose",
    "Ray",
    "ScriptedAgent",
    "Session",
    "SessionConfig",
    "SessionLog",
    "SimSession",
    "SlotOccupied",
    "SyncEvent",
    "TaskWorld",
    "Variant",
    "Vec3",
    "ViewWindow",
    "WindowParams",
    "WorldParams",
    "Xoshiro256StarStar",
    "compute_metrics",
    "default_policy",
    "derive_seed",
    "generate_task",
    "load_log",
    "run_agents",
    "run_one",
    "run_session",
    "run_sweep",
    "rows_to_csv",
    "save_log",
    "splitmix64",
    "sweep_configs",
    "__version__",
]
