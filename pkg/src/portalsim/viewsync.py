"""View-window state machines for the six sharing variants.

A view window is a floating plane in one player's view that renders
the partner's camera.  Variants differ in how the displayed camera
follows the partner's head and in what happens while the owner's
controller is shuttled into the window:

* baseline        - no window at all.
* shaview         - continuous sync, no interaction.
* teamportal      - continuous sync, interactive.
* teamportal-plus - sync gated on >0.10 m or >5 deg of head motion
                    since the last synchronized pose, smoothed by a
                    fixed-duration interpolation.
* snap            - teamportal-plus, but the displayed camera freezes
                    while shuttled and resynchronizes on shuttle-out.
* drop            - teamportal-plus on the primary window at all
                    times; shuttling spawns a frozen secondary window
                    below it, and interaction targets the secondary.

Window state is client-owned: each player's client updates its own
window once per tick from the latest replicated partner pose.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Optional, Tuple

from .errors import NoWindow
from .geometry import (
    Frustum,
    Pose,
    Vec3,
    angular_difference,
    interpolate_pose,
    project_to_window,
)

SEMI_TRANSPARENT = "semi_transparent"
OPAQUE = "opaque"


class Variant(enum.Enum):
    BASELINE = "baseline"
    SHAVIEW = "shaview"
    TEAMPORTAL = "teamportal"
    TEAMPORTAL_PLUS = "teamportal-plus"
    SNAP = "snap"
    DROP = "drop"

    @property
    def has_window(self) -> bool:
        return self is not Variant.BASELINE

    @property
    def interactive_window(self) -> bool:
        """Shuttle, window grabs and transfers are allowed."""
        return self in (
            Variant.TEAMPORTAL,
            Variant.TEAMPORTAL_PLUS,
            Variant.SNAP,
            Variant.DROP,
        )

    @property
    def threshold_gated(self) -> bool:
        return self in (Variant.TEAMPORTAL_PLUS, Variant.SNAP, Variant.DROP)


@dataclass(frozen=True)
class WindowParams:
    """Sync policy plus window and camera geometry for one session."""

    pos_threshold: float = 0.10
    rot_threshold: float = 5.0
    interp_duration_s: float = 0.3
    window_distance: float = 1.0
    min_window_distance: float = 0.5
    max_window_distance: float = 2.0
    max_window_depth: float = 2.0
    camera_hfov: float = 100.0
    camera_vfov: float = 90.0
    camera_near: float = 0.05
    camera_far: float = 20.0
    # Angular size of the window plane in the owner's view; only the
    # controller-ray to window-point mapping depends on it.
    window_hangle: float = 40.0
    window_vangle: float = 30.0


class SyncEvent(NamedTuple):
    tick: int
    kind: str


FULL_SYNC = "full_sync"
INTERP_START = "interp_start"
FREEZE = "freeze"
UNFREEZE = "unfreeze"
SPAWN_SECONDARY = "spawn_secondary"
DESPAWN_SECONDARY = "despawn_secondary"


class WindowEntry(NamedTuple):
    kind: str  # "cube" or "slot"
    ident: int
    u: float
    v: float
    depth: float


@dataclass
class _Interp:
    from_pose: Pose
    to_pose: Pose
    start_tick: int
    end_tick: int


class ViewWindow:
    """One player's window onto the partner's view."""

    def __init__(
        self,
        variant: Variant,
        owner: int,
        params: WindowParams,
        tick_hz: int,
        initial_partner: Pose,
    ):
        if not variant.has_window:
            raise NoWindow("baseline sessions have no view window")
        self.variant = variant
        self.owner = owner
        self.params = params
        self.interp_ticks = max(1, round(params.interp_duration_s * tick_hz))
        self.window_distance = params.window_distance
        self.opacity = SEMI_TRANSPARENT
        self.displayed = initial_partner
        self.last_synced = initial_partner
        self.interp: Optional[_Interp] = None
        self.frozen: Optional[Pose] = None
        self.secondary: Optional[Pose] = None
        self._prev_shuttled = False

    # -- update ----------------------------------------------------------

    def update(self, partner_head: Pose, shuttled: bool, tick: int) -> List[SyncEvent]:
        events: List[SyncEvent] = []
        v = self.variant
        self.opacity = OPAQUE if (shuttled and v.interactive_window) else SEMI_TRANSPARENT

        entering = shuttled and not self._prev_shuttled
        leaving = self._prev_shuttled and not shuttled
        self._prev_shuttled = shuttled

        if v in (Variant.SHAVIEW, Variant.TEAMPORTAL):
            # Continuous sync; no events and no interpolation.
            self.displayed = partner_head
            self.last_synced = partner_head
            return events

        if v is Variant.SNAP:
            if entering:
                self.frozen = self.displayed
                self.interp = None
                events.append(SyncEvent(tick, FREEZE))
            if shuttled:
                return events
            if leaving:
                self.frozen = None
                events.append(SyncEvent(tick, UNFREEZE))
                if partner_head != self.displayed:
                    events.append(SyncEvent(tick, FULL_SYNC))
                    events.append(SyncEvent(tick, INTERP_START))
                    self.interp = _Interp(self.displayed, partner_head, tick, tick + self.interp_ticks)
                self.last_synced = partner_head

        if v is Variant.DROP:
            if entering:
                self.secondary = self.displayed
                events.append(SyncEvent(tick, SPAWN_SECONDARY))
            if leaving:
                self.secondary = None
                events.append(SyncEvent(tick, DESPAWN_SECONDARY))

        self._gated_update(partner_head, tick, events)
        return events

    def _gated_update(self, partner_head: Pose, tick: int, events: List[SyncEvent]) -> None:
        if self.interp is not None and tick >= self.interp.end_tick:
            self.displayed = self.interp.to_pose
            self.interp = None
        p = self.params
        dpos = partner_head.position.distance_to(self.last_synced.position)
        drot = angular_difference(partner_head.orientation, self.last_synced.orientation)
        if dpos > p.pos_threshold or drot > p.rot_threshold:
            events.append(SyncEvent(tick, FULL_SYNC))
            events.append(SyncEvent(tick, INTERP_START))
            # Retarget from the currently displayed pose, so a trigger
            # landing mid-interpolation never jumps.
            self.interp = _Interp(self.displayed, partner_head, tick, tick + self.interp_ticks)
            self.last_synced = partner_head
        if self.interp is not None:
            t = (tick - self.interp.start_tick) / (self.interp.end_tick - self.interp.start_tick)
            if t >= 1.0:
                self.displayed = self.interp.to_pose
                self.interp = None
            elif t > 0.0:
                self.displayed = interpolate_pose(self.interp.from_pose, self.interp.to_pose, t)

    # -- queries ---------------------------------------------------------

    def set_distance(self, d: float) -> float:
        self.window_distance = min(self.params.max_window_distance, max(self.params.min_window_distance, d))
        return self.window_distance

    def window_count(self) -> int:
        return 2 if self.secondary is not None else 1

    def effective_pose(self, interaction: bool = False) -> Pose:
        """Camera pose to render or interact through.

        Under drop, interaction goes through the frozen secondary
        window while it exists; everything else uses the displayed
        camera (which is itself frozen under snap while shuttled).
        """
        if interaction and self.secondary is not None:
            return self.secondary
        return self.displayed

    def effective_camera(self, interaction: bool = False) -> Frustum:
        p = self.params
        return Frustum(
            self.effective_pose(interaction),
            p.camera_hfov,
            p.camera_vfov,
            p.camera_near,
            p.camera_far,
        )

    def plane_half_extents(self) -> Tuple[float, float]:
        """Half width/height of the window plane at its distance."""
        d = self.window_distance
        return (
            d * math.tan(math.radians(self.params.window_hangle / 2)),
            d * math.tan(math.radians(self.params.window_vangle / 2)),
        )

    def contents(
        self,
        objects: Iterable[Tuple[str, int, Vec3]],
        use_secondary: bool = False,
    ) -> List[WindowEntry]:
        """Project (kind, ident, position) triples through the window.

        Entries are sorted by depth, nearest first, then by kind and
        id for deterministic ordering of equal depths.
        """
        if use_secondary and self.secondary is None:
            raise NoWindow("no secondary window outside drop shuttle")
        cam = self.effective_camera(interaction=use_secondary)
        out: List[WindowEntry] = []
        for kind, ident, pos in objects:
            hit = project_to_window(cam, pos)
            if hit is not None:
                out.append(WindowEntry(kind, ident, hit[0], hit[1], hit[2]))
        out.sort(key=lambda e: (e.depth, e.kind, e.ident))
        return out


def update_window(
    state: Optional[ViewWindow], partner_head: Pose, shuttled: bool, tick: int
) -> List[SyncEvent]:
    if state is None:
        raise NoWindow("variant has no view window")
    return state.update(partner_head, shuttled, tick)


def set_window_distance(state: Optional[ViewWindow], d: float) -> float:
    if state is None:
        raise NoWindow("variant has no view window")
    return state.set_distance(d)


def window_contents(
    state: Optional[ViewWindow],
    objects: Iterable[Tuple[str, int, Vec3]],
    use_secondary: bool = False,
) -> List[WindowEntry]:
    if state is None:
        raise NoWindow("variant has no view window")
    return state.contents(objects, use_secondary)
