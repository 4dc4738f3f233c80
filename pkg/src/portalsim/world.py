"""Tangram-matching task worlds: room, target areas, slots, white cubes.

A world is a 6 m x 6 m room with 1.8 m walls containing one (simple)
or four (complex) target areas and one white cube per target slot.
Each target area is a 3x3x3 stack of 0.10 m cells with the central
vertical column removed, leaving 24 slots.  Every slot carries a hint
identifier and every cube a tangram identifier; hints and tangrams are
in bijection, so each cube has exactly one correct home.

Cube spawn positions are drawn by seeded rejection sampling inside a
margin-shrunk volume, keeping a clearance around every target area.
Generation is a pure function of (complexity, seed).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional

from .errors import CubeAlreadyPlaced, GenerationFailure, SlotOccupied
from .geometry import Aabb, Vec3
from .rng import Xoshiro256StarStar

SIMPLE = "simple"
COMPLEX = "complex"

SLOTS_PER_AREA = 24

LIGHT_BLUE = "light_blue"
ORANGE_RED = "orange_red"


@dataclass(frozen=True)
class WorldParams:
    """Tunable geometry constants; defaults match the studied task."""

    room_width: float = 6.0
    room_depth: float = 6.0
    wall_height: float = 1.8
    cube_side: float = 0.10
    spawn_margin: float = 0.20
    spawn_floor: float = 0.10
    spawn_ceiling_margin: float = 0.20
    area_clearance: float = 0.5
    snap_distance: float = 0.15
    # Minimum spacing between spawned cube centers.  Not part of the
    # task description; keeps cubes individually inspectable.  Set to
    # 0 to disable.
    min_separation: float = 0.25
    max_attempts_per_cube: int = 10_000
    area_height: float = 1.2


DEFAULT_PARAMS = WorldParams()


class PlacementRecord(NamedTuple):
    object_id: int
    slot_id: int
    correct: bool


class Score(NamedTuple):
    placed: int
    matched: int
    accuracy: Optional[float]


@dataclass
class TargetSlot:
    slot_id: int
    area_id: int
    position: Vec3
    hint: int
    filled_by: Optional[int] = None
    correct: Optional[bool] = None

    @property
    def color(self) -> str:
        return ORANGE_RED if self.filled_by is not None else LIGHT_BLUE


@dataclass
class TargetArea:
    area_id: int
    center: Vec3
    box: Aabb
    slots: List[TargetSlot] = field(default_factory=list)


@dataclass
class WhiteCube:
    object_id: int
    tangram: int
    position: Vec3
    placed_in: Optional[int] = None


def _area_centers(complexity: str, params: WorldParams) -> List[Vec3]:
    w, d, y = params.room_width, params.room_depth, params.area_height
    if complexity == SIMPLE:
        return [Vec3(w / 2, y, d / 2)]
    if complexity == COMPLEX:
        return [
            Vec3(w * 0.25, y, d * 0.25),
            Vec3(w * 0.75, y, d * 0.25),
            Vec3(w * 0.25, y, d * 0.75),
            Vec3(w * 0.75, y, d * 0.75),
        ]
    raise ValueError(f"unknown complexity {complexity!r}")


def _build_slots(area_id: int, center: Vec3, first_slot_id: int, cell: float) -> List[TargetSlot]:
    """3x3x3 cell stack minus the central vertical column, 24 slots.

    Slot order is layer-major bottom to top, then z, then x, so ids
    are stable for a given area.
    """
    slots = []
    slot_id = first_slot_id
    for yi in (-1, 0, 1):
        for zi in (-1, 0, 1):
            for xi in (-1, 0, 1):
                if xi == 0 and zi == 0:
                    continue
                pos = Vec3(center.x + xi * cell, center.y + yi * cell, center.z + zi * cell)
                slots.append(TargetSlot(slot_id, area_id, pos, hint=-1))
                slot_id += 1
    return slots


class TaskWorld:
    """Mutable authoritative world state plus its immutable layout."""

    def __init__(
        self,
        complexity: str,
        seed: int,
        areas: List[TargetArea],
        cubes: List[WhiteCube],
        params: WorldParams,
    ):
        self.complexity = complexity
        self.seed = seed
        self.areas = areas
        self.cubes = cubes
        self.params = params
        self.room = Aabb(
            Vec3(params.room_width / 2, params.wall_height / 2, params.room_depth / 2),
            Vec3(params.room_width / 2, params.wall_height / 2, params.room_depth / 2),
        )
        self.slots: List[TargetSlot] = [s for a in areas for s in a.slots]
        self._slot_by_id = {s.slot_id: s for s in self.slots}
        self._cube_by_id = {c.object_id: c for c in self.cubes}
        self.placed_count = 0

    def slot(self, slot_id: int) -> TargetSlot:
        return self._slot_by_id[slot_id]

    def cube(self, object_id: int) -> WhiteCube:
        return self._cube_by_id[object_id]

    def spawn_volume(self) -> Aabb:
        p = self.params
        lo = Vec3(p.spawn_margin, p.spawn_floor, p.spawn_margin)
        hi = Vec3(
            p.room_width - p.spawn_margin,
            p.wall_height - p.spawn_ceiling_margin,
            p.room_depth - p.spawn_margin,
        )
        center = Vec3((lo.x + hi.x) / 2, (lo.y + hi.y) / 2, (lo.z + hi.z) / 2)
        half = Vec3((hi.x - lo.x) / 2, (hi.y - lo.y) / 2, (hi.z - lo.z) / 2)
        return Aabb(center, half)

    def clamp_to_spawn(self, p: Vec3) -> Vec3:
        """Nearest point of the spawn volume; resting cubes live there."""
        return self.spawn_volume().closest_point(p)

    def in_room_floor(self, x: float, z: float) -> bool:
        return 0.0 < x < self.params.room_width and 0.0 < z < self.params.room_depth

    def nearest_slot(self, position: Vec3, max_dist: float) -> Optional[int]:
        """Closest empty slot within max_dist; near-ties go to the lowest id.

        Distances within 1e-9 of the minimum count as tied.
        """
        best: Optional[float] = None
        for s in self.slots:
            if s.filled_by is not None:
                continue
            d = s.position.distance_to(position)
            if d <= max_dist and (best is None or d < best):
                best = d
        if best is None:
            return None
        for s in self.slots:
            if s.filled_by is None and s.position.distance_to(position) <= best + 1e-9:
                return s.slot_id
        return None

    def place_cube(self, object_id: int, slot_id: int) -> PlacementRecord:
        """Fill a slot; correctness is recorded here and nowhere visible."""
        slot = self._slot_by_id[slot_id]
        cube = self._cube_by_id[object_id]
        if slot.filled_by is not None:
            raise SlotOccupied(f"slot {slot_id} already holds cube {slot.filled_by}")
        if cube.placed_in is not None:
            raise CubeAlreadyPlaced(f"cube {object_id} already placed in slot {cube.placed_in}")
        correct = cube.tangram == slot.hint
        slot.filled_by = object_id
        slot.correct = correct
        cube.placed_in = slot_id
        cube.position = slot.position
        self.placed_count += 1
        return PlacementRecord(object_id, slot_id, correct)

    def score(self) -> Score:
        placed = 0
        matched = 0
        for s in self.slots:
            if s.filled_by is not None:
                placed += 1
                if s.correct:
                    matched += 1
        accuracy = (matched / placed) if placed > 0 else None
        return Score(placed, matched, accuracy)

    def all_filled(self) -> bool:
        return self.placed_count == len(self.slots)

    def layout_dict(self) -> dict:
        """Static layout only; fill state and correctness never appear."""
        return {
            "seed": self.seed,
            "complexity": self.complexity,
            "areas": [
                {
                    "center": list(a.center),
                    "slots": [
                        {"id": s.slot_id, "pos": list(s.position), "hint": s.hint}
                        for s in a.slots
                    ],
                }
                for a in self.areas
            ],
            "cubes": [
                {"id": c.object_id, "pos": list(c.position), "tangram": c.tangram}
                for c in self.cubes
            ],
        }

    def layout_json(self) -> str:
        return json.dumps(self.layout_dict(), sort_keys=True, separators=(",", ":"))


def generate_task(complexity: str, seed: int, params: WorldParams = DEFAULT_PARAMS) -> TaskWorld:
    """Deterministically generate a task world for (complexity, seed).

    Raises GenerationFailure when rejection sampling cannot satisfy
    the clearance and separation constraints within the attempt cap,
    which signals inconsistent parameters rather than bad luck.
    """
    centers = _area_centers(complexity, params)
    rng = Xoshiro256StarStar(seed)

    areas: List[TargetArea] = []
    half = Vec3(1.5 * params.cube_side, 1.5 * params.cube_side, 1.5 * params.cube_side)
    for i, c in enumerate(centers):
        area = TargetArea(i, c, Aabb(c, half))
        area.slots = _build_slots(i, c, first_slot_id=i * SLOTS_PER_AREA, cell=params.cube_side)
        areas.append(area)

    # Hints: each area's slots receive a shuffled copy of that area's
    # tangram pool, so the bijection holds per pool and globally.
    for area in areas:
        pool = list(range(area.area_id * SLOTS_PER_AREA, (area.area_id + 1) * SLOTS_PER_AREA))
        rng.shuffle(pool)
        for slot, hint in zip(area.slots, pool):
            slot.hint = hint

    n_cubes = SLOTS_PER_AREA * len(areas)
    tangrams = list(range(n_cubes))
    rng.shuffle(tangrams)

    lo_x, hi_x = params.spawn_margin, params.room_width - params.spawn_margin
    lo_y, hi_y = params.spawn_floor, params.wall_height - params.spawn_ceiling_margin
    lo_z, hi_z = params.spawn_margin, params.room_depth - params.spawn_margin

    cubes: List[WhiteCube] = []
    positions: List[Vec3] = []
    for i in range(n_cubes):
        placed = False
        for _ in range(params.max_attempts_per_cube):
            pos = Vec3(
                rng.uniform(lo_x, hi_x),
                rng.uniform(lo_y, hi_y),
                rng.uniform(lo_z, hi_z),
            )
            if any(a.box.distance_to_point(pos) <= params.area_clearance for a in areas):
                continue
            if params.min_separation > 0.0 and any(
                pos.distance_to(q) < params.min_separation for q in positions
            ):
                continue
            positions.append(pos)
            cubes.append(WhiteCube(i, tangrams[i], pos))
            placed = True
            break
        if not placed:
            raise GenerationFailure(
                f"could not place cube {i} after {params.max_attempts_per_cube} attempts"
            )

    return TaskWorld(complexity, seed, areas, cubes, params)
