"""Scripted collaborator agents driving full sessions.

Two policies model the strategies observed with human pairs:

* divide: the pair splits the target slots spatially; each agent reads
  its own hints, roams the room scanning for matching cubes, and
  carries them home.  No window use, so use_time stays zero.
* window: divide, plus the partner's view window.  The agent
  identifies cubes through the window while the partner roams, and
  when a needed cube sits near the partner it asks them to look at it
  and pulls the cube through the window instead of traveling.

The ask goes over a shared blackboard standing in for the voice
channel.  Under TeamPortal and TeamPortal+ the partner must then hold
the view steady until the grab is done, and loses that time.  Under
Snap and Drop the shuttle freezes the interaction camera, so the
partner is released as soon as the puller shuttles in.  That
asymmetry, not any scripted outcome, is what separates the variants
in the metrics.

Every wait is a fixed number of ticks and every choice draws from the
agent's own seeded generator, so sessions replay identically.
"""

from __future__ import annotations

import math
from collections import deque
from typing import Deque, Dict, Generator, List, Optional, Set, Tuple

from .config import DIVIDE, SessionConfig, WINDOW_POLICY
from .geometry import (
    Orientation,
    Pose,
    Vec3,
    orientation_to,
    project_to_window,
    unproject_from_window,
)
from .netsim import ClientRuntime, run_session
from .rng import Xoshiro256StarStar
from .session import OWN, WINDOW
from .sessionlog import SessionLog
from .viewsync import Variant

Step = Generator[None, None, None]

CONTROLLER_HEIGHT_DROP = 0.25
FETCH_STAND_DISTANCE = 1.5
HINT_READ_DISTANCE = 1.1


def _shortest_delta(a: float, b: float) -> float:
    return ((b - a + 180.0) % 360.0) - 180.0


class Blackboard:
    """Stand-in for the voice channel between the two players.

    A request from player p asks the partner to look at a point (or
    just to hold still when the target is None) and stay that way
    until p clears the request.
    """

    def __init__(self) -> None:
        self._requests: Dict[int, Optional[Tuple[int, Optional[Vec3]]]] = {
            1: None,
            2: None,
        }

    def set_request(self, player: int, tick: int, target: Optional[Vec3] = None) -> None:
        self._requests[player] = (tick, target)

    def clear(self, player: int) -> None:
        self._requests[player] = None

    def request_of(self, player: int) -> Optional[Tuple[int, Optional[Vec3]]]:
        return self._requests[player]


class ScriptedAgent:
    """One player's deterministic task loop."""

    def __init__(
        self,
        player: int,
        client: ClientRuntime,
        config: SessionConfig,
        blackboard: Blackboard,
    ):
        self.player = player
        self.partner = 2 if player == 1 else 1
        self.client = client
        self.config = config
        self.p = config.agent
        self.policy = config.policy_for(player)
        self.blackboard = blackboard
        self.rng = Xoshiro256StarStar(config.agent_seed(player))
        self.tick = 0
        self._done = False
        self._comply_turned = False

        # Knowledge gained by inspection; replicas are complete, but the
        # agent only acts on what it has paid recognition time to learn.
        self.hints: Dict[int, int] = {}
        self.tangram_cube: Dict[int, int] = {}
        self.unknown_cubes: Set[int] = set(client.replica.cubes.keys())

        self.my_slots = self._assign_slots()
        self.area_centers = self._area_centers()
        self.vantages = self._vantage_tour()
        self._vantage_idx = 0
        self._swept_deg = 0.0
        self._last_window_check = -10_000
        self._gen = self._mission()

    # -- setup -----------------------------------------------------------

    def _assign_slots(self) -> List[int]:
        """Spatial split: player 1 takes the west half of the slots."""
        slots = self.client.slot_positions
        orderable = sorted(slots.items(), key=lambda kv: (kv[1].x, kv[1].z, kv[1].y, kv[0]))
        half = len(orderable) // 2
        chosen = orderable[:half] if self.player == 1 else orderable[half:]
        return [sid for sid, _ in sorted(chosen)]

    def _area_centers(self) -> Dict[int, Vec3]:
        groups: Dict[int, List[Vec3]] = {}
        for sid, pos in self.client.slot_positions.items():
            groups.setdefault(sid // 24, []).append(pos)
        centers = {}
        for area, positions in groups.items():
            n = len(positions)
            centers[area] = Vec3(
                sum(p.x for p in positions) / n,
                sum(p.y for p in positions) / n,
                sum(p.z for p in positions) / n,
            )
        return centers

    def _vantage_tour(self) -> List[Tuple[float, float]]:
        w = self.config.world_params.room_width
        d = self.config.world_params.room_depth
        xs = (w * 0.17, w * 0.5, w * 0.83)
        zs = (d * 0.17, d * 0.5, d * 0.83)
        points = [(x, z) for z in zs for x in xs]
        self.rng.shuffle(points)
        return points

    # -- driver ----------------------------------------------------------

    def on_tick(self, tick: int) -> None:
        self.tick = tick
        if self._comply():
            return
        if self._done:
            return
        try:
            next(self._gen)
        except StopIteration:
            self._done = True

    def _comply(self) -> bool:
        """Serve the partner's look-and-hold request, pausing my task.

        Ignored while my own request is out, so two simultaneous pulls
        degrade into timeouts instead of a deadlock.
        """
        request = self.blackboard.request_of(self.partner)
        if request is None:
            self._comply_turned = False
            return False
        if self.blackboard.request_of(self.player) is not None:
            return False
        asked_tick, target = request
        if self.tick < asked_tick + self.p.reaction_ticks:
            return False
        if target is not None and not self._comply_turned:
            head = self.client.head
            goal = orientation_to(head.position, target)
            cur = head.orientation
            dyaw = _shortest_delta(cur.yaw, goal.yaw)
            dpitch = goal.pitch - cur.pitch
            step = self.p.turn_step_deg
            if abs(dyaw) <= step and abs(dpitch) <= step:
                self._set_head_orientation(goal)
                self._comply_turned = True
            else:
                ny = cur.yaw + max(-step, min(step, dyaw))
                np_ = cur.pitch + max(-step, min(step, dpitch))
                self._set_head_orientation(Orientation(ny, np_).normalized())
        return True

    # -- small primitives --------------------------------------------------

    def _idle(self, n: int) -> Step:
        for _ in range(n):
            yield

    def _set_head_orientation(self, o: Orientation) -> None:
        head = self.client.head
        self.client.set_head(Pose(head.position, o))

    def _rotate_head_to(self, target: Orientation) -> Step:
        step = self.p.turn_step_deg
        while True:
            cur = self.client.head.orientation
            dyaw = _shortest_delta(cur.yaw, target.yaw)
            dpitch = target.pitch - cur.pitch
            if abs(dyaw) <= step and abs(dpitch) <= step:
                self._set_head_orientation(target)
                yield
                return
            ny = cur.yaw + max(-step, min(step, dyaw))
            np_ = cur.pitch + max(-step, min(step, dpitch))
            self._set_head_orientation(Orientation(ny, np_).normalized())
            yield

    def _look_at(self, point: Vec3) -> Step:
        yield from self._rotate_head_to(orientation_to(self.client.head.position, point))

    def _teleport_to(self, x: float, z: float) -> Step:
        w = self.config.world_params.room_width
        d = self.config.world_params.room_depth
        x = max(0.3, min(w - 0.3, x))
        z = max(0.3, min(d - 0.3, z))
        self.client.send_teleport(x, z)
        yield
        yield from self._idle(self.p.reorient_ticks)

    def _aim_controller_at(self, point: Vec3) -> Step:
        """Reaction delay, then an exact controller snap to the target."""
        yield from self._idle(self.p.reaction_ticks)
        cpos = self.client.controller.position
        self.client.set_controller(Pose(cpos, orientation_to(cpos, point)))
        yield

    # -- knowledge ---------------------------------------------------------

    def _learn_cube(self, object_id: int) -> None:
        cube = self.client.replica.cubes[object_id]
        self.tangram_cube[cube.tangram] = object_id
        self.unknown_cubes.discard(object_id)

    def _inspect_cube(self, object_id: int) -> Step:
        cube = self.client.replica.cubes[object_id]
        yield from self._look_at(cube.position)
        yield from self._idle(self.p.recognition_ticks)
        if cube.placed_in is None:
            dist = self.client.head.position.distance_to(cube.position)
            if dist <= self.p.recognition_range:
                self._learn_cube(object_id)

    def _local_scan_candidate(self) -> Optional[int]:
        head = self.client.head
        best = None
        best_key = None
        for oid in self.unknown_cubes:
            cube = self.client.replica.cubes[oid]
            if cube.placed_in is not None or cube.held_by != 0:
                continue
            d = head.position.distance_to(cube.position)
            if d > self.p.recognition_range:
                continue
            yaw_to = orientation_to(head.position, cube.position).yaw
            if abs(_shortest_delta(head.orientation.yaw, yaw_to)) > self.p.scan_cone_deg:
                continue
            if best_key is None or (d, oid) < best_key:
                best, best_key = oid, (d, oid)
        return best

    def _window_candidate(self) -> Optional[int]:
        win = self.client.window
        if win is None:
            return None
        cam = win.effective_camera()
        apex = cam.apex.position
        best = None
        best_key = None
        for oid in self.unknown_cubes:
            cube = self.client.replica.cubes[oid]
            if cube.placed_in is not None or cube.held_by != 0:
                continue
            if apex.distance_to(cube.position) > self.p.recognition_range:
                continue
            proj = project_to_window(cam, cube.position)
            if proj is None:
                continue
            if best_key is None or (proj[2], oid) < best_key:
                best, best_key = oid, (proj[2], oid)
        return best

    def _window_inspect(self) -> Generator[None, None, bool]:
        """Identify one unknown cube through the window, if any is close.

        The cube must still be in close view after the recognition
        dwell, so a moving partner view can waste the attempt.
        """
        oid = self._window_candidate()
        if oid is None:
            return False
        yield from self._idle(self.p.recognition_ticks)
        win = self.client.window
        cube = self.client.replica.cubes[oid]
        if win is not None and cube.placed_in is None:
            cam = win.effective_camera()
            if (
                cam.apex.position.distance_to(cube.position) <= self.p.recognition_range
                and project_to_window(cam, cube.position) is not None
            ):
                self._learn_cube(oid)
                return True
        return False

    def _window_sees(self, object_id: int) -> Optional[Tuple[float, float, float]]:
        win = self.client.window
        if win is None:
            return None
        cube = self.client.replica.cubes[object_id]
        if cube.placed_in is not None or cube.held_by != 0:
            return None
        cam = win.effective_camera()
        return project_to_window(cam, cube.position)

    # -- waiting on replicated outcomes -------------------------------------

    def _await_lock(self, object_id: int) -> Generator[None, None, bool]:
        replies = self.client.replica.lock_replies
        for _ in range(self.p.lock_timeout_ticks):
            if object_id in replies:
                _tick, granted, _owner = replies.pop(object_id)
                return granted
            yield
        return False

    def _await_held(self, object_id: int) -> Generator[None, None, bool]:
        for _ in range(self.p.lock_timeout_ticks):
            if self.client.held_object == object_id:
                return True
            yield
        return False

    def _await_slot_filled(self, slot_id: int) -> Generator[None, None, bool]:
        for _ in range(self.p.lock_timeout_ticks):
            if self.client.replica.slots_filled[slot_id]:
                return True
            yield
        return False

    def _await_window_shows(self, object_id: int) -> Generator[None, None, bool]:
        for _ in range(self.p.show_timeout_ticks):
            if self._window_sees(object_id) is not None:
                return True
            yield
        return False

    def _await_window_stable(self) -> Generator[None, None, bool]:
        win = self.client.window
        if win is None:
            return False
        last = win.displayed
        stable = 0
        for _ in range(self.p.pull_timeout_ticks):
            if win.displayed == last:
                stable += 1
                if stable >= self.p.stability_ticks:
                    return True
            else:
                last = win.displayed
                stable = 0
            yield
        return False

    # -- mission -----------------------------------------------------------

    def _mission(self) -> Step:
        yield from self._idle(5 * self.player)
        queue: Deque[Tuple[int, int]] = deque((sid, 0) for sid in self.my_slots)
        while queue:
            slot_id, retries = queue.popleft()
            if self.client.replica.slots_filled[slot_id]:
                continue
            done = yield from self._do_slot(slot_id)
            if not done and retries < 4:
                queue.append((slot_id, retries + 1))
        while True:
            yield

    def _do_slot(self, slot_id: int) -> Generator[None, None, bool]:
        if slot_id not in self.hints:
            yield from self._read_hints(slot_id // 24)
        need = self.hints.get(slot_id)
        if need is None:
            return False
        object_id = yield from self._find_cube(need)
        if object_id is None:
            return False
        cube = self.client.replica.cubes[object_id]
        if cube.placed_in is not None:
            self.tangram_cube.pop(need, None)
            return False
        if self._pull_is_worthwhile(object_id):
            pulled = yield from self._pull_through_window(object_id, slot_id)
            if pulled:
                return True
            cube = self.client.replica.cubes[object_id]
            if cube.placed_in is not None:
                return False
        return (yield from self._fetch_and_place(object_id, slot_id))

    def _pull_is_worthwhile(self, object_id: int) -> bool:
        """Pull only when the partner could show the cube by turning."""
        if self.policy != WINDOW_POLICY:
            return False
        if not self.config.variant.interactive_window:
            return False
        if self.client.window is None:
            return False
        cube = self.client.replica.cubes[object_id]
        partner = self.client.replica.partner_head.position
        return partner.distance_to(cube.position) <= self.p.show_range

    def _read_hints(self, area_id: int) -> Step:
        """Stand by the area and read hints for all my unread slots there."""
        center = self.area_centers[area_id]
        w = self.config.world_params.room_width
        d = self.config.world_params.room_depth
        dx = (w / 2) - center.x
        dz = (d / 2) - center.z
        norm = math.hypot(dx, dz) or 1.0
        stand_x = center.x + dx / norm * HINT_READ_DISTANCE
        stand_z = center.z + dz / norm * HINT_READ_DISTANCE
        yield from self._teleport_to(stand_x, stand_z)
        for sid in self.my_slots:
            if sid // 24 != area_id or sid in self.hints:
                continue
            if self.client.replica.slots_filled[sid]:
                continue
            pos = self.client.slot_positions[sid]
            yield from self._look_at(pos)
            yield from self._idle(self.p.recognition_ticks)
            self.hints[sid] = self.client.slot_hints[sid]

    def _find_cube(self, need: int) -> Generator[None, None, Optional[int]]:
        """Search until the needed tangram is known or the budget runs out."""
        deadline = self.tick + self.p.pull_timeout_ticks * 4
        while self.tick < deadline:
            if need in self.tangram_cube:
                return self.tangram_cube[need]
            if (
                self.policy == WINDOW_POLICY
                and self.client.window is not None
                and self.tick - self._last_window_check >= self.p.window_check_period
            ):
                self._last_window_check = self.tick
                learned = yield from self._window_inspect()
                if learned:
                    continue
            cand = self._local_scan_candidate()
            if cand is not None:
                yield from self._inspect_cube(cand)
                continue
            if self._swept_deg < 360.0:
                cur = self.client.head.orientation
                self._set_head_orientation(
                    Orientation(cur.yaw + self.p.scan_step_deg, cur.pitch).normalized()
                )
                self._swept_deg += self.p.scan_step_deg
                yield
            else:
                self._swept_deg = 0.0
                x, z = self.vantages[self._vantage_idx]
                self._vantage_idx = (self._vantage_idx + 1) % len(self.vantages)
                yield from self._teleport_to(x, z)
        return self.tangram_cube.get(need)

    # -- carrying ------------------------------------------------------------

    def _stand_point_for(self, target: Vec3, reach: float) -> Tuple[float, float]:
        """Floor point from which the controller is exactly reach away.

        Approaches along the direction from the target toward the
        current position, falling back toward the room center when
        that would leave the floor.
        """
        cy = self.client.head.position.y - CONTROLLER_HEIGHT_DROP
        dy = cy - target.y
        horiz = math.sqrt(max(reach * reach - dy * dy, 0.04))
        w = self.config.world_params.room_width
        d = self.config.world_params.room_depth
        me = self.client.head.position
        options = [(me.x - target.x, me.z - target.z), (w / 2 - target.x, d / 2 - target.z)]
        for dx, dz in options:
            norm = math.hypot(dx, dz)
            if norm < 1e-9:
                continue
            x = target.x + dx / norm * horiz
            z = target.z + dz / norm * horiz
            if 0.3 <= x <= w - 0.3 and 0.3 <= z <= d - 0.3:
                return x, z
        return w / 2, d / 2

    def _fetch_and_place(self, object_id: int, slot_id: int) -> Generator[None, None, bool]:
        cube = self.client.replica.cubes[object_id]
        if cube.placed_in is not None or cube.held_by != 0:
            return False
        x, z = self._stand_point_for(cube.position, FETCH_STAND_DISTANCE)
        yield from self._teleport_to(x, z)
        yield from self._look_at(cube.position)
        yield from self._aim_controller_at(cube.position)
        ray = self.client.controller_ray()
        self.client.send_select(object_id, ray)
        self.client.replica.lock_replies.pop(object_id, None)
        self.client.send_lock_request(object_id)
        granted = yield from self._await_lock(object_id)
        if not granted:
            return False
        grab_distance = self.client.controller.position.distance_to(cube.position)
        self.client.send_grab(object_id, self.client.controller_ray(), frame=OWN)
        held = yield from self._await_held(object_id)
        if not held:
            self.client.send_lock_request(object_id, release=True)
            return False
        return (yield from self._deliver(object_id, slot_id, grab_distance))

    def _deliver(
        self, object_id: int, slot_id: int, grab_distance: float
    ) -> Generator[None, None, bool]:
        slot_pos = self.client.slot_positions[slot_id]
        x, z = self._stand_point_for(slot_pos, grab_distance)
        yield from self._teleport_to(x, z)
        yield from self._look_at(slot_pos)
        yield from self._aim_controller_at(slot_pos)
        yield from self._idle(3)
        self.client.send_release()
        placed = yield from self._await_slot_filled(slot_id)
        if self.client.shuttled:
            self.client.press_shuttle_button()
            yield
        if placed:
            # A confirming glance at the snapped cube before moving on.
            yield from self._idle(self.p.reaction_ticks)
        return placed

    # -- window pull -----------------------------------------------------------

    def _pull_through_window(
        self, object_id: int, slot_id: int
    ) -> Generator[None, None, bool]:
        """Ask the partner to show a known cube, then grab it remotely.

        TeamPortal variants keep the partner held until the cube is
        transferred; Snap and Drop release them at shuttle-in, since
        the frozen camera cannot be disturbed.
        """
        cube_pos = self.client.replica.cubes[object_id].position
        hold_through_grab = self.config.variant in (
            Variant.TEAMPORTAL,
            Variant.TEAMPORTAL_PLUS,
        )
        requested = False
        if self._window_sees(object_id) is None or hold_through_grab:
            # One ask at a time; wait out the partner's own request
            # rather than talking over them.
            for _ in range(self.p.show_timeout_ticks):
                if self.blackboard.request_of(self.partner) is None:
                    break
                yield
            else:
                return False
            self.blackboard.set_request(self.player, self.tick, cube_pos)
            requested = True
            shown = yield from self._await_window_shows(object_id)
            if not shown:
                self.blackboard.clear(self.player)
                return False
            if hold_through_grab:
                stable = yield from self._await_window_stable()
                if not stable:
                    self.blackboard.clear(self.player)
                    return False
        try:
            if self.client.press_shuttle_button() != "shuttle":
                return False
            yield from self._idle(2)
            if requested and not hold_through_grab:
                self.blackboard.clear(self.player)
                requested = False
            proj = self._window_project_interaction(object_id)
            if proj is None:
                yield from self._unshuttle()
                return False
            target = self._window_plane_point(proj[0], proj[1])
            yield from self._aim_controller_at(target)
            proj = self._window_project_interaction(object_id)
            if proj is None:
                yield from self._unshuttle()
                return False
            cam = self.client.window.effective_camera(interaction=True)
            cam_ray = unproject_from_window(cam, proj[0], proj[1])
            self.client.send_select(object_id, cam_ray)
            self.client.replica.lock_replies.pop(object_id, None)
            self.client.send_lock_request(object_id)
            granted = yield from self._await_lock(object_id)
            if not granted:
                yield from self._unshuttle()
                return False
            self.client.send_grab(object_id, cam_ray, frame=WINDOW)
            held = yield from self._await_held(object_id)
            if not held:
                self.client.send_lock_request(object_id, release=True)
                yield from self._unshuttle()
                return False
            # The transfer will put the cube on my controller ray at the
            # camera hit distance capped by the pull depth limit.
            # Computed here, from pre-transfer state, because the
            # replica position lags the transfer by the network delay.
            hit = (cube_pos - cam_ray.origin).dot(cam_ray.direction)
            hit = max(hit, self.config.world_params.cube_side)
            grab_distance = min(hit, self.client.window.params.max_window_depth)
            # Flip the cube into my own frame; it lands on my controller
            # ray, and the carry continues exactly like a local fetch.
            self.client.press_shuttle_button()
            yield from self._idle(2)
        finally:
            if requested:
                self.blackboard.clear(self.player)
        return (yield from self._deliver(object_id, slot_id, grab_distance))

    def _window_project_interaction(self, object_id: int) -> Optional[Tuple[float, float, float]]:
        cube = self.client.replica.cubes[object_id]
        if cube.placed_in is not None:
            return None
        cam = self.client.window.effective_camera(interaction=True)
        return project_to_window(cam, cube.position)

    def _window_plane_point(self, u: float, v: float) -> Vec3:
        win = self.client.window
        head = self.client.head
        o = head.orientation
        center = head.position + o.forward().scaled(win.window_distance)
        half_w, half_h = win.plane_half_extents()
        return (
            center
            + o.right().scaled((2.0 * u - 1.0) * half_w)
            + o.up().scaled((2.0 * v - 1.0) * half_h)
        )

    def _unshuttle(self) -> Step:
        if self.client.shuttled and self.client.held_object is None:
            self.client.press_shuttle_button()
            yield


def make_agent_factory(blackboard: Optional[Blackboard] = None):
    bb = blackboard or Blackboard()

    def factory(player: int, client: ClientRuntime, config: SessionConfig):
        if config.policy_for(player) not in (DIVIDE, WINDOW_POLICY):
            raise ValueError(f"unknown policy {config.policy_for(player)!r}")
        return ScriptedAgent(player, client, config, bb)

    return factory


def run_agents(config: SessionConfig) -> SessionLog:
    """Run a full scripted session for the given configuration."""
    return run_session(config, make_agent_factory())
