"""Planar simulator and controllers for magnetically docking surface modules."""

__version__ = "0.1.0"

from .geometry import Pose2, angle_diff, dock_world_pose, wrap_angle

__all__ = ["Pose2", "angle_diff", "dock_world_pose", "wrap_angle", "__version__"]
