import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from modboat.geometry import Pose2, angle_diff, dock_world_pose, wrap_angle

finite_angles = st.floats(min_value=-50.0, max_value=50.0,
                          allow_nan=False, allow_infinity=False)


def test_wrap_angle_identity_inside_range():
    for a in (0.0, 0.3, -0.3, 3.0, -3.0):
        assert wrap_angle(a) == pytest.approx(a, abs=1e-15)


def test_wrap_angle_boundary_is_pi_not_minus_pi():
    # convention: (-pi, pi], so both boundaries land on +pi
    assert wrap_angle(math.pi) == pytest.approx(math.pi)
    assert wrap_angle(-math.pi) == pytest.approx(math.pi)


def test_wrap_angle_multiple_turns():
    assert wrap_angle(7.0 * math.pi + 0.25) == pytest.approx(math.pi + 0.25 - 2 * math.pi, abs=1e-12)
    assert wrap_angle(-6.0 * math.pi - 0.25) == pytest.approx(-0.25, abs=1e-12)


def test_wrap_angle_rejects_non_finite():
    for bad in (math.nan, math.inf, -math.inf):
        with pytest.raises(ValueError):
            wrap_angle(bad)


@given(finite_angles)
def test_wrap_angle_range_property(a):
    w = wrap_angle(a)
    assert -math.pi < w <= math.pi


@given(finite_angles)
def test_wrap_angle_preserves_direction(a):
    # wrapped and raw angle must point the same way on the unit circle
    w = wrap_angle(a)
    assert math.cos(w) == pytest.approx(math.cos(a), abs=1e-9)
    assert math.sin(w) == pytest.approx(math.sin(a), abs=1e-9)


@given(finite_angles, finite_angles)
def test_angle_diff_antisymmetric(a, b):
    d1 = wrap_angle(angle_diff(a, b) + angle_diff(b, a))
    assert math.sin(d1) == pytest.approx(0.0, abs=1e-9)


def test_pose_wraps_theta_on_construction():
    p = Pose2(1.0, 2.0, 5.0 * math.pi)
    assert p.theta == pytest.approx(math.pi)


def test_point_to_world_matches_rotation_matrix():
    # oracle: plain homogeneous transform with numpy
    rng = np.random.default_rng(7)
    for _ in range(50):
        x, y, th = rng.uniform(-3, 3, size=3)
        px, py = rng.uniform(-1, 1, size=2)
        pose = Pose2(x, y, th)
        c, s = np.cos(pose.theta), np.sin(pose.theta)
        expected = np.array([[c, -s], [s, c]]) @ np.array([px, py]) + np.array([x, y])
        got = pose.point_to_world(px, py)
        assert got[0] == pytest.approx(expected[0], abs=1e-12)
        assert got[1] == pytest.approx(expected[1], abs=1e-12)


def test_compose_agrees_with_sequential_transform():
    a = Pose2(0.5, -0.25, 0.8)
    b = Pose2(0.1, 0.2, -0.3)
    ab = a.compose(b)
    # a point expressed in b's frame must land in the same world spot either way
    px, py = 0.33, -0.71
    direct = ab.point_to_world(px, py)
    staged = a.point_to_world(*b.point_to_world(px, py))
    assert direct[0] == pytest.approx(staged[0], abs=1e-12)
    assert direct[1] == pytest.approx(staged[1], abs=1e-12)


def test_dock_world_pose_frozen_case():
    # boat at (1, 2) heading +90 deg, port at body angle 0 (front), radius 0.076:
    # port sits straight up from the center, facing up.
    pose = dock_world_pose(Pose2(1.0, 2.0, math.pi / 2), 0.0, 0.076)
    assert pose.x == pytest.approx(1.0, abs=1e-12)
    assert pose.y == pytest.approx(2.076, abs=1e-12)
    assert pose.theta == pytest.approx(math.pi / 2, abs=1e-12)


def test_dock_world_pose_left_port_frozen_case():
    # heading 0, port at +90 deg body angle: position (0, r), heading +90 deg
    pose = dock_world_pose(Pose2(0.0, 0.0, 0.0), math.pi / 2, 0.2)
    assert pose.x == pytest.approx(0.0, abs=1e-12)
    assert pose.y == pytest.approx(0.2, abs=1e-12)
    assert pose.theta == pytest.approx(math.pi / 2)


def test_dock_world_pose_rejects_bad_radius():
    with pytest.raises(ValueError):
        dock_world_pose(Pose2(), 0.0, 0.0)


@given(finite_angles, finite_angles)
def test_dock_pose_sits_on_hull_circle(theta, psi):
    boat = Pose2(0.3, -0.4, theta)
    r = 0.076
    port = dock_world_pose(boat, psi, r)
    d = math.hypot(port.x - boat.x, port.y - boat.y)
    assert d == pytest.approx(r, abs=1e-12)
    # outward-facing: port heading matches the center-to-port direction
    outward = math.atan2(port.y - boat.y, port.x - boat.x)
    assert math.sin(port.theta - outward) == pytest.approx(0.0, abs=1e-9)
    assert math.cos(port.theta - outward) == pytest.approx(1.0, abs=1e-9)
