"""Planar geometry primitives: wrapped angles, poses, dock-port placement."""

from __future__ import annotations

import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi


def wrap_angle(a: float) -> float:
    """Wrap a finite angle to (-pi, pi]."""
    if not math.isfinite(a):
        raise ValueError(f"angle must be finite, got {a!r}")
    r = math.fmod(a, TWO_PI)
    if r > math.pi:
        r -= TWO_PI
    elif r <= -math.pi:
        r += TWO_PI
    return r


def angle_diff(a: float, b: float) -> float:
    """Shortest signed rotation taking ``b`` onto ``a``."""
    return wrap_angle(a - b)


@dataclass(frozen=True)
class Pose2:
    """Planar pose. ``theta`` is stored wrapped to (-pi, pi]."""

    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta", wrap_angle(self.theta))

    def point_to_world(self, px: float, py: float) -> tuple[float, float]:
        """Map a body-frame point into the world frame."""
        c = math.cos(self.theta)
        s = math.sin(self.theta)
        return self.x + c * px - s * py, self.y + s * px + c * py

    def compose(self, other: "Pose2") -> "Pose2":
        """World pose of ``other`` when ``other`` is expressed in this frame."""
        ox, oy = self.point_to_world(other.x, other.y)
        return Pose2(ox, oy, self.theta + other.theta)


def dock_world_pose(boat_pose: Pose2, psi: float, radius: float) -> Pose2:
    """World pose of a dock port mounted on the hull circle.

    The port sits on the hull at body angle ``psi`` and faces outward, so its
    world heading is the boat heading plus ``psi``.
    """
    if radius <= 0.0:
        raise ValueError("hull radius must be positive")
    px, py = boat_pose.point_to_world(radius * math.cos(psi), radius * math.sin(psi))
    return Pose2(px, py, boat_pose.theta + psi)
