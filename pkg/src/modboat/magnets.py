"""Magnetic dock-port interaction: attraction, alignment, latch and bond limits.

The permanent magnets behind each port are reduced to a pairwise point model
between facing ports.  Attraction acts along the line joining the two port
points, saturating at the rated holding force once the ports are closer than
a reference gap and falling off with a power law beyond it.  The pull is
gated to a capture region: beyond a cutoff distance, or when either port
faces more than a quarter turn away from the other, the interaction is zero.
A weak internal couple turns facing ports toward the anti-parallel heading
they latch in.  Same-polarity pairs see the whole wrench negated.

Latching itself is an event, not a force: `check_latch` says when two ports
are close, aligned and slow enough to snap into a rigid bond, and the bond
survives until the tension across it exceeds the holding force.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import Pose2, dock_world_pose, wrap_angle

ZERO_WRENCH = ((0.0, 0.0, 0.0), (0.0, 0.0, 0.0))


@dataclass(frozen=True)
class MagnetModel:
    hold_force: float = 4.1           # rated pull at contact; also the bond limit [N]
    capture_distance: float = 0.15    # no interaction beyond this port gap [m]
    capture_half_angle: float = math.pi / 4   # port must face partner this closely [rad]
    falloff_exponent: int = 4         # far-field decay power
    # saturation gap sized so an at-rest pair at the capture edge drifts
    # together within seconds, while the pull at approach range stays far
    # too weak to disturb a maneuvering boat
    contact_gap_ref: float = 0.018    # gap where the pull saturates [m]
    align_gain: float = 0.05          # heading couple stiffness [N m/rad]
    latch_gap: float = 0.002          # ports latch when closer than this [m]
    latch_max_angle: float = math.radians(20.0)   # heading mismatch tolerance [rad]
    # a contact bounce reverses the gap rate within a step, but a rebound
    # slower than the escape speed of a lone hull from the rated well
    # (~0.52 m/s) stays bound and mates on the fall-back, so treat it as
    # latched; only a genuine high-speed escape is let go
    latch_max_opening: float = 0.5    # no latch while separating faster [m/s]
    min_gap: float = 1e-6             # numerical floor for the force direction

    def __post_init__(self) -> None:
        if self.hold_force <= 0.0 or self.capture_distance <= 0.0:
            raise ValueError("hold_force and capture_distance must be positive")
        if not 0.0 < self.contact_gap_ref < self.capture_distance:
            raise ValueError("contact_gap_ref must sit inside the capture distance")
        if self.falloff_exponent < 2:
            raise ValueError("falloff_exponent must be at least 2")
        if not 0.0 < self.latch_gap < self.contact_gap_ref:
            raise ValueError("latch_gap must sit inside the saturation gap")


def pair_force(pose_a: Pose2, psi_a: float, radius_a: float,
               pose_b: Pose2, psi_b: float, radius_b: float,
               model: MagnetModel, same_polarity: bool = False):
    """Wrench each hull feels from one facing port pair.

    Returns ``((fxa, fya, taua), (fxb, fyb, taub))`` with forces in world
    coordinates and torques about each boat's own center.  Zero outside the
    capture region.  The two forces are exactly equal and opposite and the
    full wrench conserves angular momentum about any fixed point.
    """
    port_a = dock_world_pose(pose_a, psi_a, radius_a)
    port_b = dock_world_pose(pose_b, psi_b, radius_b)
    dx = port_b.x - port_a.x
    dy = port_b.y - port_a.y
    gap = math.hypot(dx, dy)
    if gap > model.capture_distance:
        return ZERO_WRENCH
    if gap < model.min_gap:
        # coincident ports: pull direction undefined, fall back to a's normal
        dx, dy = math.cos(port_a.theta), math.sin(port_a.theta)
        gap = 1.0
        ratio = 1.0
    else:
        if abs(wrap_angle(math.atan2(dy, dx) - port_a.theta)) > model.capture_half_angle:
            return ZERO_WRENCH
        if abs(wrap_angle(math.atan2(-dy, -dx) - port_b.theta)) > model.capture_half_angle:
            return ZERO_WRENCH
        ratio = min(1.0, (model.contact_gap_ref / gap) ** model.falloff_exponent)

    sign = -1.0 if same_polarity else 1.0
    f = sign * model.hold_force * ratio
    fx = f * dx / gap
    fy = f * dy / gap
    # port offset from the hull center gives the lever arm
    tau_a = (port_a.x - pose_a.x) * fy - (port_a.y - pose_a.y) * fx
    tau_b = (port_b.x - pose_b.x) * (-fy) - (port_b.y - pose_b.y) * (-fx)
    couple = sign * model.align_gain * ratio * wrap_angle(port_b.theta + math.pi - port_a.theta)
    return (fx, fy, tau_a + couple), (-fx, -fy, tau_b - couple)


def port_gap(port_a: Pose2, port_b: Pose2) -> float:
    return math.hypot(port_b.x - port_a.x, port_b.y - port_a.y)


def check_latch(port_a: Pose2, port_b: Pose2, opening_rate: float,
                model: MagnetModel) -> bool:
    """True when two ports may snap into a rigid bond this step.

    ``opening_rate`` is the growth rate of the port gap; a small positive
    value is tolerated so a grazing pass can still stick.
    """
    if port_gap(port_a, port_b) > model.latch_gap:
        return False
    if abs(wrap_angle(port_b.theta + math.pi - port_a.theta)) > model.latch_max_angle:
        return False
    return opening_rate <= model.latch_max_opening


def bond_exceeded(tension: float, model: MagnetModel) -> bool:
    """True when the tension across a latched pair overcomes the magnets."""
    return tension > model.hold_force


def escape_energy(model: MagnetModel, gap_from: float, gap_to: float | None = None) -> float:
    """Work needed to drag a latched pair from one gap out to another.

    Closed form of the force law integral; the default upper limit is the
    capture distance, i.e. the energy needed to leave the capture region.
    """
    if gap_to is None:
        gap_to = model.capture_distance
    if not 0.0 < gap_from <= gap_to:
        raise ValueError("need 0 < gap_from <= gap_to")
    a = model.contact_gap_ref
    e = model.falloff_exponent
    flat = max(0.0, min(a, gap_to) - gap_from)      # saturated segment
    lo = max(a, gap_from)
    hi = max(a, gap_to)
    tail = a ** e / (e - 1) * (lo ** (1 - e) - hi ** (1 - e))
    return model.hold_force * (flat + tail)
