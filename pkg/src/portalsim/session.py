"""Authoritative session core: players, distance grab, locks, placement.

All mutation happens on the host inside the simulation tick.  Clients
only submit inputs; the host validates each input against its own
state (re-casting claimed rays, checking locks) before applying it.

Frames: a held object lives either in the holder's own frame, where it
follows the controller ray at a fixed distance every tick, or in the
window frame, where it rests at a fixed anchor on the collaborator's
camera ray until the next transfer or release.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, NamedTuple, Optional, Tuple

from .errors import (
    LockDenied,
    NoWindow,
    NotHolding,
    ObjectPlaced,
    OutOfBounds,
    SelectionMismatch,
)
from .geometry import Aabb, Frustum, Orientation, Pose, Ray, Vec3, ray_aabb_intersection, unproject_from_window
from .viewsync import Variant, WindowParams
from .world import PlacementRecord, TaskWorld

OWN = "own"
WINDOW = "window"

HEAD_HEIGHT = 1.6
CONTROLLER_DROP = 0.25

# Sentinel owner in lock denials for objects that are permanently
# unavailable (already placed) rather than held by the other player.
UNAVAILABLE = 0


class LockResult(NamedTuple):
    granted: bool
    owner: int
    acquired_tick: int


class OwnershipTable:
    """object_id -> (owner, acquired_tick); at most one owner each."""

    def __init__(self) -> None:
        self._locks: Dict[int, Tuple[int, int]] = {}

    def try_acquire(self, object_id: int, player: int, tick: int) -> LockResult:
        """Grant if free or already owned by the requester (idempotent)."""
        held = self._locks.get(object_id)
        if held is None:
            self._locks[object_id] = (player, tick)
            return LockResult(True, player, tick)
        owner, acquired = held
        if owner == player:
            return LockResult(True, owner, acquired)
        return LockResult(False, owner, acquired)

    def release(self, object_id: int, player: int) -> bool:
        held = self._locks.get(object_id)
        if held is None or held[0] != player:
            return False
        del self._locks[object_id]
        return True

    def owner_of(self, object_id: int) -> Optional[int]:
        held = self._locks.get(object_id)
        return held[0] if held else None

    def owners(self) -> Dict[int, int]:
        return {obj: owner for obj, (owner, _) in self._locks.items()}


@dataclass
class HeldObject:
    object_id: int
    grab_distance: float
    frame: str = OWN
    anchor: Optional[Vec3] = None  # window frame only


@dataclass
class PlayerState:
    head: Pose
    controller: Pose
    shuttled: bool = False
    held: Optional[HeldObject] = None
    selected: Optional[int] = None


def default_pose(player: int, world: TaskWorld) -> Tuple[Pose, Pose]:
    """Starting head and controller poses, facing the room center."""
    w = world.params.room_width
    d = world.params.room_depth
    if player == 1:
        head_pos = Vec3(w * 0.2, HEAD_HEIGHT, d * 0.5)
        yaw = 90.0
    else:
        head_pos = Vec3(w * 0.8, HEAD_HEIGHT, d * 0.5)
        yaw = 270.0
    o = Orientation(yaw, 0.0)
    head = Pose(head_pos, o)
    controller = Pose(Vec3(head_pos.x, head_pos.y - CONTROLLER_DROP, head_pos.z), o)
    return head, controller


def cast_ray_at_cubes(world: TaskWorld, ray: Ray) -> Optional[Tuple[int, float]]:
    """Nearest unplaced cube hit by the ray: (object_id, distance)."""
    best_t = None
    best_id = None
    half = world.params.cube_side / 2
    for cube in world.cubes:
        if cube.placed_in is not None:
            continue
        t = ray_aabb_intersection(ray, Aabb(cube.position, Vec3(half, half, half)))
        if t is not None and (best_t is None or t < best_t):
            best_t = t
            best_id = cube.object_id
    if best_id is None:
        return None
    return best_id, best_t


def select_by_ray(world: TaskWorld, ray: Ray) -> Optional[int]:
    hit = cast_ray_at_cubes(world, ray)
    return hit[0] if hit else None


class Session:
    """Host-side authoritative state for one two-player session."""

    def __init__(self, world: TaskWorld, variant: Variant, window_params: WindowParams = WindowParams()):
        self.world = world
        self.variant = variant
        self.window_params = window_params
        self.locks = OwnershipTable()
        self.players: Dict[int, PlayerState] = {}
        for p in (1, 2):
            head, controller = default_pose(p, world)
            self.players[p] = PlayerState(head, controller)

    # -- poses ---------------------------------------------------------

    def set_pose(self, player: int, head: Pose, controller: Pose) -> None:
        self.players[player].head = self._clamp_head(head)
        self.players[player].controller = controller

    def _clamp_head(self, head: Pose) -> Pose:
        room = self.world.room
        p = head.position
        if room.contains(p):
            return head
        return Pose(room.closest_point(p), head.orientation)

    def teleport(self, player: int, target: Vec3) -> None:
        """Instant move to a floor point; height and orientation kept."""
        if not self.world.in_room_floor(target.x, target.z):
            raise OutOfBounds(f"teleport target ({target.x}, {target.z}) outside the room")
        st = self.players[player]
        old = st.head.position
        new_head = Vec3(target.x, old.y, target.z)
        delta = new_head - old
        st.head = Pose(new_head, st.head.orientation)
        st.controller = Pose(st.controller.position + delta, st.controller.orientation)

    # -- selection and locking -----------------------------------------

    def select(self, player: int, ray: Ray, claimed: Optional[int]) -> Optional[int]:
        """Re-cast the claimed selection; highlight only on agreement."""
        hit = select_by_ray(self.world, ray)
        if claimed is not None and hit != claimed:
            hit = None
        self.players[player].selected = hit
        return hit

    def try_acquire(self, object_id: int, player: int, tick: int) -> LockResult:
        """Lock arbitration; placed cubes are permanently unavailable."""
        if self.world.cube(object_id).placed_in is not None:
            return LockResult(False, UNAVAILABLE, tick)
        return self.locks.try_acquire(object_id, player, tick)

    # -- grab / release / transfer -------------------------------------

    def grab(
        self,
        player: int,
        object_id: int,
        ray: Ray,
        tick: int,
        frame: str = OWN,
    ) -> HeldObject:
        """Pick up the cube the ray actually hits, at its hit distance.

        The ray is the controller ray in the own frame, or the window
        camera ray through the aimed window point in the window frame.
        The held cube's center then rides the ray at grab_distance.
        """
        cube = self.world.cube(object_id)
        if cube.placed_in is not None:
            raise ObjectPlaced(f"cube {object_id} is placed and terminal")
        st = self.players[player]
        if frame == WINDOW and not st.shuttled:
            raise NoWindow("window-frame grab requires shuttled controller")
        result = self.try_acquire(object_id, player, tick)
        if not result.granted:
            raise LockDenied(object_id, result.owner)
        hit = cast_ray_at_cubes(self.world, ray)
        if hit is None or hit[0] != object_id:
            # Claim does not match authoritative state.  Drop the lock so
            # a rejected grab can never strand an object as unusable.
            self.locks.release(object_id, player)
            raise SelectionMismatch(
                f"grab claim for cube {object_id} does not match the host ray cast"
            )
        # Center distance along the ray; the cube re-centers on the ray.
        distance = (cube.position - ray.origin).dot(ray.direction)
        distance = max(distance, self.world.params.cube_side)
        if frame == WINDOW:
            depth = min(distance, self.window_params.max_window_depth)
            held = HeldObject(object_id, depth, WINDOW, anchor=ray.point_at(distance))
            cube.position = held.anchor
        else:
            held = HeldObject(object_id, distance, OWN)
            cube.position = ray.point_at(distance)
        st.held = held
        return held

    def update_held_follow(self) -> list[int]:
        """Re-anchor own-frame held cubes to their controller rays.

        Called once per tick after pose updates; returns the ids of
        cubes that moved.
        """
        moved = []
        for p, st in self.players.items():
            h = st.held
            if h is None or h.frame != OWN:
                continue
            ray = Ray(st.controller.position, st.controller.orientation.forward())
            pos = ray.point_at(h.grab_distance)
            cube = self.world.cube(h.object_id)
            if pos != cube.position:
                cube.position = pos
                moved.append(h.object_id)
        return moved

    def release(self, player: int) -> Tuple[Optional[PlacementRecord], Vec3]:
        """Drop the held cube: snap into a nearby empty slot or rest.

        Resting positions are clamped into the spawn volume so unheld
        cubes always satisfy the world containment invariant.
        """
        st = self.players[player]
        if st.held is None:
            raise NotHolding(f"player {player} is not holding anything")
        cube = self.world.cube(st.held.object_id)
        pos = cube.position
        record = None
        slot_id = self.world.nearest_slot(pos, self.world.params.snap_distance)
        if slot_id is not None:
            record = self.world.place_cube(cube.object_id, slot_id)
            pos = self.world.slot(slot_id).position
        else:
            pos = self.world.clamp_to_spawn(pos)
            cube.position = pos
        self.locks.release(cube.object_id, player)
        st.held = None
        if st.selected == cube.object_id:
            st.selected = None
        return record, pos

    def set_shuttled(self, player: int, shuttled: bool) -> None:
        if not self.variant.interactive_window:
            raise NoWindow(f"variant {self.variant.value} has no interactive window")
        self.players[player].shuttled = shuttled

    def transfer_held(self, player: int, camera: Pose, uv: Tuple[float, float]) -> str:
        """Flip a held cube between own and window frames.

        camera is the effective window camera reported by the holder's
        client; uv is the window point nearest the controller ray.
        Own-to-window re-anchors the cube on the camera ray through uv
        at the lesser of its current camera distance and the depth cap;
        window-to-own puts it back on the controller ray at
        grab_distance.  Returns the new frame name.
        """
        st = self.players[player]
        if st.held is None:
            raise NotHolding(f"player {player} is not holding anything")
        if not self.variant.interactive_window:
            raise NoWindow(f"variant {self.variant.value} has no interactive window")
        cube = self.world.cube(st.held.object_id)
        if st.held.frame == OWN:
            frustum = Frustum(
                camera,
                self.window_params.camera_hfov,
                self.window_params.camera_vfov,
                self.window_params.camera_near,
                self.window_params.camera_far,
            )
            u = min(1.0, max(0.0, uv[0]))
            v = min(1.0, max(0.0, uv[1]))
            cam_ray = unproject_from_window(frustum, u, v)
            depth = min(
                cube.position.distance_to(camera.position),
                self.window_params.max_window_depth,
            )
            st.held.frame = WINDOW
            st.held.anchor = cam_ray.point_at(depth)
            cube.position = st.held.anchor
        else:
            ray = Ray(st.controller.position, st.controller.orientation.forward())
            st.held.frame = OWN
            st.held.anchor = None
            cube.position = ray.point_at(st.held.grab_distance)
        return st.held.frame
