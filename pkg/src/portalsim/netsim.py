"""Discrete-time network simulation and host-authoritative replication.

Topology is a listen server: the host arbitrates all state, client 1
shares its machine (loopback link), client 2 connects over a link with
configurable latency and jitter.  Transport is reliable and ordered:
each message is delayed by latency + U[0, jitter) quantized up to
whole ticks (minimum one), and per-link delivery times are made
nondecreasing so send order is preserved.

Each tick:
  1. deliver due messages in (src, dst, send-order) order;
  2. the host applies pose updates, then inputs and lock requests;
  3. the host replicates state diffs back to both clients;
  4. each client updates its view window and runs its agent.

Clients never mutate world state directly; every mutation in the log
traces back to a delivered input applied by the host.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Tuple

from . import sessionlog
from .config import SessionConfig
from .errors import LockDenied, PortalSimError
from .geometry import Orientation, Pose, Ray, Vec3, ray_window_uv_nearest
from .metrics import MovementTrace
from .rng import Xoshiro256StarStar
from .session import OWN, Session
from .sessionlog import SessionLog
from .viewsync import ViewWindow
from .world import generate_task

HOST = "host"
CLIENT1 = "client1"
CLIENT2 = "client2"

_RANK = {HOST: 0, CLIENT1: 1, CLIENT2: 2}
_CLIENT_OF_PLAYER = {1: CLIENT1, 2: CLIENT2}
_PLAYER_OF_CLIENT = {CLIENT1: 1, CLIENT2: 2}

POSE_UPDATE = "PoseUpdate"
LOCK_REQUEST = "LockRequest"
LOCK_GRANT = "LockGrant"
LOCK_DENY = "LockDeny"
OBJECT_STATE = "ObjectState"
PLACEMENT_EVENT = "PlacementEvent"
WINDOW_SYNC_EVENT = "WindowSyncEvent"
INPUT_EVENT = "InputEvent"


class NetConfig(NamedTuple):
    latency_ms: float = 50.0
    jitter_ms: float = 5.0
    seed: int = 0


class NetMessage(NamedTuple):
    seq: int
    src: str
    dst: str
    send_tick: int
    deliver_tick: int
    kind: str
    payload: Any


class TickClock:
    def __init__(self, tick_hz: int = 50):
        self.tick = 0
        self.tick_hz = tick_hz

    @property
    def dt_ms(self) -> float:
        return 1000.0 / self.tick_hz

    def advance(self) -> None:
        self.tick += 1


class Network:
    """Per-link delayed FIFO message queues between the three actors."""

    def __init__(self, cfg: NetConfig, tick_hz: int):
        self.cfg = cfg
        self.dt_ms = 1000.0 / tick_hz
        self.rng = Xoshiro256StarStar(cfg.seed)
        self._pending: Dict[int, List[NetMessage]] = {}
        self._last_deliver: Dict[Tuple[str, str], int] = {}
        self._seq = 0
        self.sent = 0
        self.delivered = 0

    def _link_delay_ms(self, src: str, dst: str) -> float:
        # Client 1 is co-located with the host; its link is loopback.
        if CLIENT2 in (src, dst):
            jitter = self.cfg.jitter_ms
            base = self.cfg.latency_ms
            if jitter > 0.0:
                return base + self.rng.random() * jitter
            return base
        return 0.0

    def send(self, src: str, dst: str, kind: str, payload: Any, now: int) -> NetMessage:
        delay = self._link_delay_ms(src, dst)
        delay_ticks = max(1, math.ceil(delay / self.dt_ms))
        deliver = now + delay_ticks
        link = (src, dst)
        floor = self._last_deliver.get(link)
        if floor is not None and deliver < floor:
            deliver = floor
        self._last_deliver[link] = deliver
        msg = NetMessage(self._seq, src, dst, now, deliver, kind, payload)
        self._seq += 1
        self.sent += 1
        self._pending.setdefault(deliver, []).append(msg)
        return msg

    def deliver(self, now: int) -> List[NetMessage]:
        due = self._pending.pop(now, None)
        if not due:
            return []
        due.sort(key=lambda m: (_RANK[m.src], _RANK[m.dst], m.seq))
        self.delivered += len(due)
        return due

    def undelivered(self) -> List[NetMessage]:
        out = [m for msgs in self._pending.values() for m in msgs]
        out.sort(key=lambda m: (m.deliver_tick, _RANK[m.src], _RANK[m.dst], m.seq))
        return out


@dataclass
class ReplicatedCube:
    position: Vec3
    tangram: int
    held_by: int = 0
    placed_in: Optional[int] = None
    highlighted: bool = False


@dataclass
class Replica:
    """A client's view of the authoritative state."""

    partner_head: Pose
    partner_controller: Pose
    cubes: Dict[int, ReplicatedCube] = field(default_factory=dict)
    slots_filled: Dict[int, bool] = field(default_factory=dict)
    lock_replies: Dict[int, Tuple[int, bool, int]] = field(default_factory=dict)


class ClientRuntime:
    """One player's client: local poses, replica, window, and outbox."""

    def __init__(
        self,
        player: int,
        config: SessionConfig,
        session: Session,
        window: Optional[ViewWindow],
    ):
        self.player = player
        self.partner = 2 if player == 1 else 1
        self.addr = _CLIENT_OF_PLAYER[player]
        self.config = config
        self.window = window
        self.head: Pose = session.players[player].head
        self.controller: Pose = session.players[player].controller
        self.shuttled = False
        self.held_object: Optional[int] = None
        self.replica = Replica(
            partner_head=session.players[self.partner].head,
            partner_controller=session.players[self.partner].controller,
        )
        world = session.world
        for c in world.cubes:
            self.replica.cubes[c.object_id] = ReplicatedCube(c.position, c.tangram)
        for s in world.slots:
            self.replica.slots_filled[s.slot_id] = False
        self.slot_positions = {s.slot_id: s.position for s in world.slots}
        self.slot_hints = {s.slot_id: s.hint for s in world.slots}
        self._pose_dirty = False
        self._outbox: List[Tuple[str, Any]] = []
        self.agent = None

    # -- local pose control (client-authoritative) ---------------------

    def set_head(self, pose: Pose) -> None:
        self.head = pose
        self._pose_dirty = True

    def set_controller(self, pose: Pose) -> None:
        self.controller = pose
        self._pose_dirty = True

    def controller_ray(self) -> Ray:
        return Ray(self.controller.position, self.controller.orientation.forward())

    def teleport_local(self, x: float, z: float) -> None:
        """Client-side prediction of a teleport; the input rides along."""
        old = self.head.position
        delta = Vec3(x - old.x, 0.0, z - old.z)
        self.set_head(Pose(Vec3(x, old.y, z), self.head.orientation))
        self.set_controller(Pose(self.controller.position + delta, self.controller.orientation))

    # -- input submission -----------------------------------------------

    def send_input(self, action: str, payload: dict) -> None:
        self._outbox.append((INPUT_EVENT, {"action": action, **payload}))

    def send_lock_request(self, object_id: int, release: bool = False) -> None:
        self._outbox.append((LOCK_REQUEST, {"object": object_id, "release": release}))

    def send_select(self, object_id: Optional[int], ray: Ray) -> None:
        self.send_input("select", {"object": object_id, "ray": ray})

    def send_grab(self, object_id: int, ray: Ray, frame: str = OWN) -> None:
        self.send_input("grab", {"object": object_id, "ray": ray, "frame": frame})

    def send_release(self) -> None:
        self.send_input("release", {})

    def send_teleport(self, x: float, z: float) -> None:
        self.send_input("teleport", {"x": x, "z": z})
        self.teleport_local(x, z)

    def press_shuttle_button(self) -> str:
        """One physical button: transfer while holding, else shuttle.

        Mirrors the A/X buttons: the shuttle toggle and the frame flip
        share a control, so the client decides from its held state.
        Does nothing under variants without an interactive window.
        """
        if self.window is None or not self.window.variant.interactive_window:
            return "rejected"
        if self.held_object is not None:
            camera = self.window.effective_pose(interaction=True) if self.window else self.head
            u, v = self._window_uv_of_controller()
            self.send_input("transfer", {"camera": camera, "uv": [u, v]})
            return "transfer"
        self.send_input("shuttle", {})
        self.shuttled = not self.shuttled
        return "shuttle"

    def _window_uv_of_controller(self) -> Tuple[float, float]:
        if self.window is None:
            return 0.5, 0.5
        half_w, half_h = self.window.plane_half_extents()
        return ray_window_uv_nearest(
            self.head, self.window.window_distance, half_w, half_h, self.controller_ray()
        )

    # -- replica integration ---------------------------------------------

    def integrate(self, msg: NetMessage) -> None:
        kind = msg.kind
        p = msg.payload
        if kind == POSE_UPDATE:
            self.replica.partner_head = p["head"]
            self.replica.partner_controller = p["controller"]
        elif kind == OBJECT_STATE:
            cube = self.replica.cubes[p["object"]]
            cube.position = p["position"]
            cube.held_by = p["held_by"]
            cube.placed_in = p["placed_in"]
            cube.highlighted = p["highlighted"]
            if cube.held_by == self.player:
                self.held_object = p["object"]
            elif self.held_object == p["object"]:
                self.held_object = None
        elif kind == PLACEMENT_EVENT:
            self.replica.slots_filled[p["slot"]] = True
            cube = self.replica.cubes[p["object"]]
            cube.placed_in = p["slot"]
            cube.position = self.slot_positions[p["slot"]]
            cube.held_by = 0
            if self.held_object == p["object"]:
                self.held_object = None
        elif kind == LOCK_GRANT:
            self.replica.lock_replies[p["object"]] = (msg.deliver_tick, True, self.player)
        elif kind == LOCK_DENY:
            self.replica.lock_replies[p["object"]] = (msg.deliver_tick, False, p["owner"])

    # -- per-tick client work ---------------------------------------------

    def update_window(self, tick: int) -> List[Tuple[str, Any]]:
        if self.window is None:
            return []
        events = self.window.update(self.replica.partner_head, self.shuttled, tick)
        return [
            (WINDOW_SYNC_EVENT, {"kind": e.kind, "tick": e.tick}) for e in events
        ]

    def window_objects(self):
        """World content triples for window projection."""
        for oid, cube in self.replica.cubes.items():
            yield ("cube", oid, cube.position)
        for sid, pos in self.slot_positions.items():
            yield ("slot", sid, pos)

    def drain_outbox(self) -> List[Tuple[str, Any]]:
        out = self._outbox
        self._outbox = []
        return out

    def take_pose_if_dirty(self) -> Optional[dict]:
        if not self._pose_dirty:
            return None
        self._pose_dirty = False
        return {"player": self.player, "head": self.head, "controller": self.controller}


def _jsonable(value: Any) -> Any:
    """JSON-safe copy of an input payload for logging."""
    if isinstance(value, Pose):
        return {
            "position": [value.position.x, value.position.y, value.position.z],
            "yaw": value.orientation.yaw,
            "pitch": value.orientation.pitch,
        }
    if isinstance(value, Ray):
        return {"origin": list(value.origin), "direction": list(value.direction)}
    if isinstance(value, (Vec3, Orientation)):
        return list(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


AgentFactory = Callable[[int, "ClientRuntime", SessionConfig], Optional[object]]


class SimSession:
    """A full simulated session: host, two clients, network, log."""

    def __init__(self, config: SessionConfig, agent_factory: Optional[AgentFactory] = None):
        self.config = config
        self.world = generate_task(config.task, config.world_seed, config.world_params)
        self.session = Session(self.world, config.variant, config.window)
        self.net = Network(
            NetConfig(config.latency_ms, config.jitter_ms, config.net_seed), config.tick_hz
        )
        self.clock = TickClock(config.tick_hz)
        self.log = SessionLog(config.to_dict())
        self.clients: Dict[int, ClientRuntime] = {}
        for p in (1, 2):
            window = None
            if config.variant.has_window:
                window = ViewWindow(
                    config.variant,
                    p,
                    config.window,
                    config.tick_hz,
                    initial_partner=self.session.players[2 if p == 1 else 1].head,
                )
            self.clients[p] = ClientRuntime(p, config, self.session, window)
        if agent_factory is not None:
            for p in (1, 2):
                self.clients[p].agent = agent_factory(p, self.clients[p], config)
        self.traces = {1: MovementTrace(), 2: MovementTrace()}
        self.finished = False
        self.end_reason: Optional[str] = None
        self._dirty_objects: set[int] = set()
        self._pose_dirty = {1: False, 2: False}
        self._placements: List[dict] = []

    # -- host-side message handling -----------------------------------

    def _host_apply_pose(self, msg: NetMessage) -> None:
        p = msg.payload
        self.session.set_pose(p["player"], p["head"], p["controller"])
        self._pose_dirty[p["player"]] = True

    def _host_apply(self, msg: NetMessage, now: int) -> None:
        player = _PLAYER_OF_CLIENT[msg.src]
        if msg.kind == LOCK_REQUEST:
            obj = msg.payload["object"]
            if msg.payload.get("release"):
                self.session.locks.release(obj, player)
                return
            result = self.session.try_acquire(obj, player, now)
            if result.granted:
                self.log.append(sessionlog.LOCK_GRANT, now, player=player, payload={"object": obj})
                self.net.send(HOST, msg.src, LOCK_GRANT, {"object": obj}, now)
            else:
                self.log.append(
                    sessionlog.LOCK_DENY,
                    now,
                    player=player,
                    payload={"object": obj, "owner": result.owner},
                )
                self.net.send(HOST, msg.src, LOCK_DENY, {"object": obj, "owner": result.owner}, now)
            return
        if msg.kind == WINDOW_SYNC_EVENT:
            self.log.append(msg.payload["kind"], msg.payload["tick"], player=player)
            return
        if msg.kind == INPUT_EVENT:
            self._host_apply_input(player, msg, now)
            return
        raise PortalSimError(f"unexpected message kind at host: {msg.kind}")

    def _host_apply_input(self, player: int, msg: NetMessage, now: int) -> None:
        payload = dict(msg.payload)
        action = payload.pop("action")
        applied = True
        reason = None
        s = self.session
        try:
            if action == "select":
                prev = s.players[player].selected
                hit = s.select(player, payload["ray"], payload["object"])
                for oid in (prev, hit):
                    if oid is not None:
                        self._dirty_objects.add(oid)
            elif action == "grab":
                held = s.grab(player, payload["object"], payload["ray"], now, payload["frame"])
                self._dirty_objects.add(held.object_id)
            elif action == "release":
                held = s.players[player].held
                record, _pos = s.release(player)
                if record is not None:
                    self.log.append(
                        sessionlog.PLACEMENT,
                        now,
                        player=player,
                        payload={
                            "object": record.object_id,
                            "slot": record.slot_id,
                            "correct": record.correct,
                        },
                    )
                    self._placements.append({"slot": record.slot_id, "object": record.object_id})
                    self._dirty_objects.discard(record.object_id)
                else:
                    self._dirty_objects.add(held.object_id)
            elif action == "teleport":
                s.teleport(player, Vec3(payload["x"], 0.0, payload["z"]))
                self._pose_dirty[player] = True
            elif action == "shuttle":
                if s.players[player].held is not None:
                    applied = False
                    reason = "holding"
                else:
                    s.set_shuttled(player, not s.players[player].shuttled)
            elif action == "transfer":
                s.transfer_held(player, payload["camera"], tuple(payload["uv"]))
                self._dirty_objects.add(s.players[player].held.object_id)
            else:
                applied = False
                reason = "unknown_action"
        except LockDenied as e:
            applied = False
            reason = type(e).__name__
            self.net.send(
                HOST,
                _CLIENT_OF_PLAYER[player],
                LOCK_DENY,
                {"object": e.object_id, "owner": e.owner},
                now,
            )
        except PortalSimError as e:
            applied = False
            reason = type(e).__name__
        rec: Dict[str, Any] = {
            "player": player,
            "action": action,
            "payload": _jsonable(payload),
            "applied": applied,
        }
        if reason is not None:
            rec["reason"] = reason
        self.log.append(sessionlog.INPUT, now, **rec)

    # -- replication -----------------------------------------------------

    def _replicate(self, now: int) -> None:
        s = self.session
        for p in (1, 2):
            if self._pose_dirty[p]:
                self._pose_dirty[p] = False
                other = 2 if p == 1 else 1
                self.net.send(
                    HOST,
                    _CLIENT_OF_PLAYER[other],
                    POSE_UPDATE,
                    {"player": p, "head": s.players[p].head, "controller": s.players[p].controller},
                    now,
                )
        if self._dirty_objects:
            selected = {
                st.selected for st in s.players.values() if st.selected is not None
            }
            held_by = {
                st.held.object_id: p for p, st in s.players.items() if st.held is not None
            }
            for oid in sorted(self._dirty_objects):
                cube = self.world.cube(oid)
                payload = {
                    "object": oid,
                    "position": cube.position,
                    "held_by": held_by.get(oid, 0),
                    "placed_in": cube.placed_in,
                    "highlighted": oid in selected,
                }
                for dst in (CLIENT1, CLIENT2):
                    self.net.send(HOST, dst, OBJECT_STATE, payload, now)
            self._dirty_objects.clear()
        for placement in self._placements:
            for dst in (CLIENT1, CLIENT2):
                self.net.send(HOST, dst, PLACEMENT_EVENT, placement, now)
        self._placements.clear()

    # -- main loop ---------------------------------------------------------

    def step(self) -> None:
        now = self.clock.tick
        delivered = self.net.deliver(now)
        host_inbox: List[NetMessage] = []
        for m in delivered:
            if m.dst == HOST:
                host_inbox.append(m)
            else:
                self.clients[_PLAYER_OF_CLIENT[m.dst]].integrate(m)
        for m in host_inbox:
            if m.kind == POSE_UPDATE:
                self._host_apply_pose(m)
        for oid in self.session.update_held_follow():
            self._dirty_objects.add(oid)
        for m in host_inbox:
            if m.kind != POSE_UPDATE:
                self._host_apply(m, now)
        for oid in self.session.update_held_follow():
            self._dirty_objects.add(oid)
        self._replicate(now)
        for p in (1, 2):
            pos = self.session.players[p].head.position
            if self.traces[p].record(pos.x, pos.z):
                self.log.append(
                    sessionlog.MOVE_SAMPLE, now, player=p, payload={"x": pos.x, "z": pos.z}
                )
        for p in (1, 2):
            client = self.clients[p]
            for kind, payload in client.update_window(now):
                self.net.send(client.addr, HOST, kind, payload, now)
            if client.agent is not None:
                client.agent.on_tick(now)
            pose = client.take_pose_if_dirty()
            if pose is not None:
                self.net.send(client.addr, HOST, POSE_UPDATE, pose, now)
            for kind, payload in client.drain_outbox():
                self.net.send(client.addr, HOST, kind, payload, now)
        self.clock.advance()
        if self.world.all_filled():
            self._finish("completed", now)
        elif self.clock.tick >= self.config.duration_ticks:
            self._finish("time_limit", self.config.duration_ticks)

    def _finish(self, reason: str, end_tick: int) -> None:
        for m in self.net.undelivered():
            self.log.append(
                sessionlog.UNDELIVERED,
                end_tick,
                payload={
                    "src": m.src,
                    "dst": m.dst,
                    "msg_kind": m.kind,
                    "send_tick": m.send_tick,
                    "deliver_tick": m.deliver_tick,
                },
            )
        score = self.world.score()
        self.log.append(
            sessionlog.SESSION_END,
            end_tick,
            payload={"reason": reason, "placed": score.placed, "matched": score.matched},
        )
        self.finished = True
        self.end_reason = reason

    def run_to_completion(self) -> SessionLog:
        while not self.finished:
            self.step()
        return self.log


def run_session(config: SessionConfig, agent_factory: Optional[AgentFactory] = None) -> SessionLog:
    return SimSession(config, agent_factory).run_to_completion()
