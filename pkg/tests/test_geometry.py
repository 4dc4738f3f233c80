"""Geometry oracles and invariants.

The direction and intersection code is checked against independent
formulations: a spherical-coordinate expansion for orientation
vectors and a ray-marching probe for box intersection distances.
"""

import math

import pytest

from portalsim.geometry import (
    Aabb,
    Frustum,
    Orientation,
    Pose,
    Ray,
    Vec3,
    angular_difference,
    interpolate_pose,
    lerp_angle,
    orientation_to,
    project_to_window,
    ray_aabb_intersection,
    unproject_from_window,
)
from portalsim.rng import Xoshiro256StarStar


def _spherical_forward(yaw_deg, pitch_deg):
    """Independent expansion: yaw from +z toward +x, pitch up."""
    yaw = math.radians(yaw_deg)
    pitch = math.radians(pitch_deg)
    return (
        math.sin(yaw) * math.cos(pitch),
        math.sin(pitch),
        math.cos(yaw) * math.cos(pitch),
    )


def _march_to_box(ray, box, limit=30.0, coarse=1e-3, fine=1e-7):
    """Ray-march to the first point inside the box, then bisect."""
    t = 0.0
    if box.contains(ray.origin):
        return 0.0
    prev = 0.0
    while t <= limit:
        if box.contains(ray.point_at(t)):
            lo, hi = prev, t
            while hi - lo > fine:
                mid = (lo + hi) / 2
                if box.contains(ray.point_at(mid)):
                    hi = mid
                else:
                    lo = mid
            return hi
        prev = t
        t += coarse
    return None


class TestOrientationVectors:
    def test_spherical_oracle_example(self):
        o = Orientation(37.0, -12.0)
        f = o.forward()
        ex, ey, ez = _spherical_forward(37.0, -12.0)
        assert abs(f.x - ex) < 1e-9
        assert abs(f.y - ey) < 1e-9
        assert abs(f.z - ez) < 1e-9

    def test_spherical_oracle_sweep(self):
        rng = Xoshiro256StarStar(21)
        for _ in range(500):
            yaw = rng.uniform(-720.0, 720.0)
            pitch = rng.uniform(-90.0, 90.0)
            f = Orientation(yaw, pitch).forward()
            ex, ey, ez = _spherical_forward(yaw, pitch)
            assert abs(f.x - ex) < 1e-9
            assert abs(f.y - ey) < 1e-9
            assert abs(f.z - ez) < 1e-9

    def test_cardinal_directions(self):
        assert Orientation(0.0, 0.0).forward().distance_to(Vec3(0, 0, 1)) < 1e-12
        assert Orientation(90.0, 0.0).forward().distance_to(Vec3(1, 0, 0)) < 1e-12
        assert Orientation(180.0, 0.0).forward().distance_to(Vec3(0, 0, -1)) < 1e-12
        assert Orientation(0.0, 90.0).forward().distance_to(Vec3(0, 1, 0)) < 1e-12

    def test_basis_is_orthonormal(self):
        rng = Xoshiro256StarStar(22)
        for _ in range(200):
            o = Orientation(rng.uniform(0, 360), rng.uniform(-89, 89))
            f, r, u = o.forward(), o.right(), o.up()
            assert abs(f.norm() - 1.0) < 1e-12
            assert abs(r.norm() - 1.0) < 1e-12
            assert abs(u.norm() - 1.0) < 1e-12
            assert abs(f.dot(r)) < 1e-12
            assert abs(f.dot(u)) < 1e-12
            assert abs(r.dot(u)) < 1e-12
            assert f.cross(r).distance_to(u.scaled(-1.0)) < 1e-9 or f.cross(r).distance_to(u) < 1e-9

    def test_normalized_wraps_yaw_and_clamps_pitch(self):
        o = Orientation(725.0, 120.0).normalized()
        assert 0.0 <= o.yaw < 360.0
        assert o.pitch == 90.0
        assert Orientation(-10.0, -120.0).normalized().pitch == -90.0


class TestOrientationTo:
    def test_round_trip_direction(self):
        rng = Xoshiro256StarStar(23)
        origin = Vec3(1.0, 1.5, 2.0)
        for _ in range(500):
            d = Vec3(rng.uniform(-1, 1), rng.uniform(-0.9, 0.9), rng.uniform(-1, 1))
            if d.norm() < 1e-3:
                continue
            target = origin + d.normalized().scaled(rng.uniform(0.5, 5.0))
            o = orientation_to(origin, target)
            restored = o.forward()
            want = (target - origin).normalized()
            assert restored.distance_to(want) < 1e-7

    def test_straight_up(self):
        o = orientation_to(Vec3(0, 0, 0), Vec3(0, 5, 0))
        assert o.pitch == pytest.approx(90.0)


class TestAngles:
    def test_angular_difference_symmetry(self):
        rng = Xoshiro256StarStar(24)
        for _ in range(300):
            a = Orientation(rng.uniform(0, 360), rng.uniform(-89, 89))
            b = Orientation(rng.uniform(0, 360), rng.uniform(-89, 89))
            assert angular_difference(a, b) == pytest.approx(angular_difference(b, a), abs=1e-9)

    def test_angular_difference_identity_and_bounds(self):
        a = Orientation(123.0, 45.0)
        assert angular_difference(a, a) == pytest.approx(0.0, abs=1e-5)
        rng = Xoshiro256StarStar(25)
        for _ in range(300):
            b = Orientation(rng.uniform(0, 360), rng.uniform(-89, 89))
            d = angular_difference(a, b)
            assert 0.0 <= d <= 180.0 + 1e-9

    def test_lerp_angle_shortest_arc(self):
        assert lerp_angle(350.0, 10.0, 0.5) % 360.0 == pytest.approx(0.0, abs=1e-9)
        assert lerp_angle(10.0, 350.0, 0.5) % 360.0 == pytest.approx(0.0, abs=1e-9)
        assert lerp_angle(0.0, 170.0, 0.5) == pytest.approx(85.0)
        # Opposite angles are ambiguous; either turn direction is fine.
        assert lerp_angle(0.0, 180.0, 0.25) % 360.0 in (pytest.approx(45.0), pytest.approx(315.0))

    def test_interpolate_pose_endpoints(self):
        a = Pose(Vec3(0, 1, 0), Orientation(10.0, 5.0))
        b = Pose(Vec3(2, 1, 4), Orientation(250.0, -30.0))
        assert interpolate_pose(a, b, 0.0) == a
        p1 = interpolate_pose(a, b, 1.0)
        assert p1.position.distance_to(b.position) < 1e-12
        assert angular_difference(p1.orientation, b.orientation) < 1e-9

    def test_interpolate_pose_midpoint_position(self):
        a = Pose(Vec3(0, 0, 0), Orientation(0, 0))
        b = Pose(Vec3(4, 2, 6), Orientation(0, 0))
        mid = interpolate_pose(a, b, 0.5)
        assert mid.position.distance_to(Vec3(2, 1, 3)) < 1e-12


class TestRayAabb:
    def test_marching_oracle_random_rays(self):
        rng = Xoshiro256StarStar(26)
        box = Aabb(Vec3(3.0, 1.0, 3.0), Vec3(0.4, 0.3, 0.2))
        hits = 0
        for i in range(400):
            origin = Vec3(rng.uniform(0, 6), rng.uniform(0, 2), rng.uniform(0, 6))
            if i % 2 == 0:
                # Aim near the box so hits are well represented.
                jitter = Vec3(rng.uniform(-0.5, 0.5), rng.uniform(-0.4, 0.4), rng.uniform(-0.3, 0.3))
                d = (box.center + jitter) - origin
            else:
                d = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1))
            if d.norm() < 1e-6:
                continue
            ray = Ray(origin, d.normalized())
            got = ray_aabb_intersection(ray, box)
            want = _march_to_box(ray, box)
            if want is None:
                assert got is None
            else:
                assert got is not None
                assert got == pytest.approx(want, abs=1e-4)
                hits += 1
        assert hits > 20

    def test_origin_inside_returns_zero(self):
        box = Aabb(Vec3(0, 0, 0), Vec3(1, 1, 1))
        ray = Ray(Vec3(0.2, -0.3, 0.1), Vec3(0, 0, 1))
        assert ray_aabb_intersection(ray, box) == 0.0

    def test_behind_misses(self):
        box = Aabb(Vec3(0, 0, 5), Vec3(1, 1, 1))
        ray = Ray(Vec3(0, 0, 0), Vec3(0, 0, -1))
        assert ray_aabb_intersection(ray, box) is None

    def test_axis_parallel_miss(self):
        box = Aabb(Vec3(0, 0, 5), Vec3(0.5, 0.5, 0.5))
        ray = Ray(Vec3(2.0, 0, 0), Vec3(0, 0, 1))
        assert ray_aabb_intersection(ray, box) is None

    def test_exact_face_distance(self):
        box = Aabb(Vec3(0, 0, 5), Vec3(0.5, 0.5, 0.5))
        ray = Ray(Vec3(0, 0, 0), Vec3(0, 0, 1))
        assert ray_aabb_intersection(ray, box) == pytest.approx(4.5, abs=1e-12)


class TestWindowProjection:
    def _camera(self):
        return Frustum(
            Pose(Vec3(1.0, 1.6, 2.0), Orientation(40.0, -5.0)),
            hfov=100.0,
            vfov=90.0,
            near=0.05,
            far=20.0,
        )

    def test_project_unproject_round_trip(self):
        cam = self._camera()
        rng = Xoshiro256StarStar(27)
        count = 0
        for _ in range(500):
            u = rng.uniform(0.02, 0.98)
            v = rng.uniform(0.02, 0.98)
            depth = rng.uniform(0.2, 10.0)
            ray = unproject_from_window(cam, u, v)
            point = ray.point_at(depth)
            proj = project_to_window(cam, point)
            assert proj is not None
            pu, pv, pd = proj
            assert pu == pytest.approx(u, abs=1e-7)
            assert pv == pytest.approx(v, abs=1e-7)
            count += 1
        assert count == 500

    def test_unproject_point_lies_on_ray(self):
        cam = self._camera()
        rng = Xoshiro256StarStar(28)
        for _ in range(200):
            point = Vec3(rng.uniform(0, 6), rng.uniform(0, 2), rng.uniform(0, 6))
            proj = project_to_window(cam, point)
            if proj is None:
                continue
            u, v, _depth = proj
            ray = unproject_from_window(cam, u, v)
            along = (point - ray.origin).dot(ray.direction)
            closest = ray.point_at(along)
            assert closest.distance_to(point) < 1e-6

    def test_center_of_window_is_forward(self):
        cam = self._camera()
        ray = unproject_from_window(cam, 0.5, 0.5)
        assert ray.direction.distance_to(cam.apex.orientation.forward()) < 1e-9

    def test_point_behind_camera_projects_none(self):
        cam = self._camera()
        behind = cam.apex.position - cam.apex.orientation.forward().scaled(1.0)
        assert project_to_window(cam, behind) is None

    def test_outside_fov_projects_none(self):
        cam = self._camera()
        right = cam.apex.orientation.right()
        fwd = cam.apex.orientation.forward()
        point = cam.apex.position + fwd.scaled(1.0) + right.scaled(10.0)
        assert project_to_window(cam, point) is None

    def test_contains_agrees_with_projection(self):
        cam = self._camera()
        rng = Xoshiro256StarStar(29)
        for _ in range(300):
            point = Vec3(rng.uniform(-2, 8), rng.uniform(-1, 3), rng.uniform(-2, 8))
            proj = project_to_window(cam, point)
            if proj is not None:
                assert cam.contains(point)


class TestAabbBasics:
    def test_contains_boundaries(self):
        box = Aabb(Vec3(0, 0, 0), Vec3(1, 1, 1))
        assert box.contains(Vec3(1, 1, 1))
        assert not box.contains(Vec3(1.0000001, 0, 0))

    def test_closest_point_clamps(self):
        box = Aabb(Vec3(0, 0, 0), Vec3(1, 1, 1))
        p = box.closest_point(Vec3(5, 0.5, -3))
        assert p == Vec3(1, 0.5, -1)

    def test_distance_to_point(self):
        box = Aabb(Vec3(0, 0, 0), Vec3(1, 1, 1))
        assert box.distance_to_point(Vec3(4, 0, 0)) == pytest.approx(3.0)
        assert box.distance_to_point(Vec3(0.5, 0.5, 0.5)) == 0.0
