"""Vector, pose, ray, frustum and window-plane math.

Conventions used everywhere in this package:

* y is up and the floor is the x-z plane; units are meters.
* Orientations are yaw/pitch in degrees with roll fixed at zero.
  Yaw 0 faces +z and yaw 90 faces +x; pitch is positive above the
  horizon and clamped to [-90, +90].  Yaw is stored in [0, 360).
* Window coordinates (u, v) live in [0, 1] x [0, 1] with (0.5, 0.5)
  at the view center and v increasing upward.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Optional

_DEG = math.pi / 180.0


class Vec3(NamedTuple):
    x: float
    y: float
    z: float

    def __add__(self, other: "Vec3") -> "Vec3":  # type: ignore[override]
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def scaled(self, k: float) -> "Vec3":
        return Vec3(self.x * k, self.y * k, self.z * k)

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Vec3") -> "Vec3":
        return Vec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def normalized(self) -> "Vec3":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize a zero vector")
        return Vec3(self.x / n, self.y / n, self.z / n)

    def distance_to(self, other: "Vec3") -> float:
        return (self - other).norm()

    def planar_distance_to(self, other: "Vec3") -> float:
        """Distance projected onto the floor plane (y ignored)."""
        dx = self.x - other.x
        dz = self.z - other.z
        return math.sqrt(dx * dx + dz * dz)

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)


ZERO3 = Vec3(0.0, 0.0, 0.0)


class Orientation(NamedTuple):
    yaw: float
    pitch: float

    def normalized(self) -> "Orientation":
        """Wrap yaw into [0, 360) and clamp pitch to [-90, +90].

        Idempotent, so repeated normalization never drifts.
        """
        yaw = self.yaw % 360.0
        pitch = min(90.0, max(-90.0, self.pitch))
        return Orientation(yaw, pitch)

    def forward(self) -> Vec3:
        cp = math.cos(self.pitch * _DEG)
        return Vec3(
            math.sin(self.yaw * _DEG) * cp,
            math.sin(self.pitch * _DEG),
            math.cos(self.yaw * _DEG) * cp,
        )

    def right(self) -> Vec3:
        """Horizontal right-hand direction; unaffected by pitch."""
        return Vec3(math.cos(self.yaw * _DEG), 0.0, -math.sin(self.yaw * _DEG))

    def up(self) -> Vec3:
        sy = math.sin(self.yaw * _DEG)
        cy = math.cos(self.yaw * _DEG)
        sp = math.sin(self.pitch * _DEG)
        return Vec3(-sy * sp, math.cos(self.pitch * _DEG), -cy * sp)


class Pose(NamedTuple):
    position: Vec3
    orientation: Orientation


class Ray(NamedTuple):
    origin: Vec3
    direction: Vec3

    def point_at(self, t: float) -> Vec3:
        return Vec3(
            self.origin.x + self.direction.x * t,
            self.origin.y + self.direction.y * t,
            self.origin.z + self.direction.z * t,
        )


class Aabb(NamedTuple):
    center: Vec3
    half: Vec3

    @property
    def lo(self) -> Vec3:
        return Vec3(self.center.x - self.half.x, self.center.y - self.half.y, self.center.z - self.half.z)

    @property
    def hi(self) -> Vec3:
        return Vec3(self.center.x + self.half.x, self.center.y + self.half.y, self.center.z + self.half.z)

    def contains(self, p: Vec3) -> bool:
        return (
            abs(p.x - self.center.x) <= self.half.x
            and abs(p.y - self.center.y) <= self.half.y
            and abs(p.z - self.center.z) <= self.half.z
        )

    def closest_point(self, p: Vec3) -> Vec3:
        return Vec3(
            min(max(p.x, self.center.x - self.half.x), self.center.x + self.half.x),
            min(max(p.y, self.center.y - self.half.y), self.center.y + self.half.y),
            min(max(p.z, self.center.z - self.half.z), self.center.z + self.half.z),
        )

    def distance_to_point(self, p: Vec3) -> float:
        """Euclidean distance from p to the box surface, 0 inside."""
        return self.closest_point(p).distance_to(p)


def orientation_to(origin: Vec3, target: Vec3) -> Orientation:
    """Orientation whose forward vector points from origin at target."""
    d = target - origin
    horiz = math.sqrt(d.x * d.x + d.z * d.z)
    yaw = math.atan2(d.x, d.z) / _DEG
    pitch = math.atan2(d.y, horiz) / _DEG
    return Orientation(yaw, pitch).normalized()


def angular_difference(a: Orientation, b: Orientation) -> float:
    """Angle in degrees between the forward vectors of two orientations."""
    dot = a.forward().dot(b.forward())
    return math.acos(min(1.0, max(-1.0, dot))) / _DEG


def lerp_angle(a: float, b: float, t: float) -> float:
    """Shortest-arc interpolation between two angles in degrees."""
    delta = ((b - a + 180.0) % 360.0) - 180.0
    return (a + delta * t) % 360.0


def interpolate_pose(a: Pose, b: Pose, t: float) -> Pose:
    """Blend two poses: linear on position, shortest-arc on angles."""
    pa, pb = a.position, b.position
    pos = Vec3(pa.x + (pb.x - pa.x) * t, pa.y + (pb.y - pa.y) * t, pa.z + (pb.z - pa.z) * t)
    yaw = lerp_angle(a.orientation.yaw, b.orientation.yaw, t)
    pitch = a.orientation.pitch + (b.orientation.pitch - a.orientation.pitch) * t
    return Pose(pos, Orientation(yaw, pitch))


def pose_ray(pose: Pose) -> Ray:
    return Ray(pose.position, pose.orientation.forward())


def ray_aabb_intersection(ray: Ray, box: Aabb) -> Optional[float]:
    """Smallest nonnegative ray parameter hitting the box, or None.

    Slab test.  A ray starting inside the box hits at t = 0; a box
    entirely behind the origin misses.
    """
    t_near = -math.inf
    t_far = math.inf
    for o, d, lo, hi in (
        (ray.origin.x, ray.direction.x, box.center.x - box.half.x, box.center.x + box.half.x),
        (ray.origin.y, ray.direction.y, box.center.y - box.half.y, box.center.y + box.half.y),
        (ray.origin.z, ray.direction.z, box.center.z - box.half.z, box.center.z + box.half.z),
    ):
        if abs(d) < 1e-12:
            if o < lo or o > hi:
                return None
            continue
        t0 = (lo - o) / d
        t1 = (hi - o) / d
        if t0 > t1:
            t0, t1 = t1, t0
        if t0 > t_near:
            t_near = t0
        if t1 < t_far:
            t_far = t1
        if t_near > t_far:
            return None
    if t_far < 0.0:
        return None
    return max(t_near, 0.0)


class Frustum(NamedTuple):
    """View volume of a virtual camera.

    Field-of-view angles are full widths in degrees; near and far are
    distances along the view axis in meters.
    """

    apex: Pose
    hfov: float
    vfov: float
    near: float
    far: float

    def camera_coords(self, p: Vec3) -> tuple[float, float, float]:
        """(right, up, forward) components of p relative to the apex."""
        rel = p - self.apex.position
        o = self.apex.orientation
        return rel.dot(o.right()), rel.dot(o.up()), rel.dot(o.forward())

    def contains(self, p: Vec3) -> bool:
        dx, dy, dz = self.camera_coords(p)
        if dz < self.near or dz > self.far:
            return False
        if abs(math.atan2(dx, dz)) > self.hfov * 0.5 * _DEG:
            return False
        if abs(math.atan2(dy, dz)) > self.vfov * 0.5 * _DEG:
            return False
        return True


def project_to_window(frustum: Frustum, p: Vec3) -> Optional[tuple[float, float, float]]:
    """Perspective-project p into window coordinates.

    Returns (u, v, depth) with u, v in [0, 1] and depth the distance
    along the view axis, or None when p is outside the frustum.  The
    horizontal FOV edges map to u = 0 and u = 1, the view axis to
    (0.5, 0.5), and v grows upward.
    """
    dx, dy, dz = frustum.camera_coords(p)
    if dz < frustum.near or dz > frustum.far:
        return None
    su = (dx / dz) / math.tan(frustum.hfov * 0.5 * _DEG)
    sv = (dy / dz) / math.tan(frustum.vfov * 0.5 * _DEG)
    if abs(su) > 1.0 or abs(sv) > 1.0:
        return None
    return 0.5 + 0.5 * su, 0.5 + 0.5 * sv, dz


def unproject_from_window(frustum: Frustum, u: float, v: float) -> Ray:
    """Ray from the camera apex through window point (u, v).

    Inverse of project_to_window on the u, v components.
    """
    su = (2.0 * u - 1.0) * math.tan(frustum.hfov * 0.5 * _DEG)
    sv = (2.0 * v - 1.0) * math.tan(frustum.vfov * 0.5 * _DEG)
    o = frustum.apex.orientation
    f, r, up = o.forward(), o.right(), o.up()
    d = Vec3(
        f.x + r.x * su + up.x * sv,
        f.y + r.y * su + up.y * sv,
        f.z + r.z * su + up.z * sv,
    )
    return Ray(frustum.apex.position, d.normalized())


def ray_window_uv_nearest(
    head: Pose,
    distance: float,
    half_width: float,
    half_height: float,
    ray: Ray,
) -> tuple[float, float]:
    """Window point nearest to where the ray crosses the window plane.

    Like ray_window_uv but total: misses clamp to the nearest edge
    point, and a ray parallel to or pointing away from the plane falls
    back to the window center.
    """
    o = head.orientation
    normal = o.forward()
    center = head.position + normal.scaled(distance)
    denom = ray.direction.dot(normal)
    if abs(denom) < 1e-12:
        return 0.5, 0.5
    t = (center - ray.origin).dot(normal) / denom
    if t < 0.0:
        return 0.5, 0.5
    hit = ray.point_at(t)
    lx = (hit - center).dot(o.right())
    ly = (hit - center).dot(o.up())
    u = 0.5 + 0.5 * lx / half_width
    v = 0.5 + 0.5 * ly / half_height
    return min(1.0, max(0.0, u)), min(1.0, max(0.0, v))


def ray_window_uv(
    head: Pose,
    distance: float,
    half_width: float,
    half_height: float,
    ray: Ray,
) -> Optional[tuple[float, float]]:
    """Where a ray crosses a head-anchored window rectangle.

    The window is centered `distance` meters along the head's forward
    axis, spans half_width / half_height meters along the head's right
    and up axes, and returns (u, v) in [0, 1] or None on a miss.
    """
    o = head.orientation
    normal = o.forward()
    center = head.position + normal.scaled(distance)
    denom = ray.direction.dot(normal)
    if abs(denom) < 1e-12:
        return None
    t = (center - ray.origin).dot(normal) / denom
    if t < 0.0:
        return None
    hit = ray.point_at(t)
    lx = (hit - center).dot(o.right())
    ly = (hit - center).dot(o.up())
    if abs(lx) > half_width or abs(ly) > half_height:
        return None
    return 0.5 + 0.5 * lx / half_width, 0.5 + 0.5 * ly / half_height
