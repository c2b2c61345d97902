"""Two-body planar dynamics for a single oscillating surface module.

Model notes
-----------
Each module is two concentric rigid bodies joined by one motor.  The top
body is the hull: it carries the dock magnets and takes the water drag.
The bottom body carries the passive flippers and the protruding spiral
tail.  All actuation is the single motor torque, applied positively to the
bottom body and negatively to the top body, so swimming strokes, reaction
wheel turns and tail maneuvers are all torque profiles on the same pair.

Propulsion is a calibrated surrogate for the flipper hydrodynamics: the
squared bottom-body spin maps to a forward force once the spin clears an
engagement threshold (slow reaction-wheel motion does not engage the
flippers).  Linear and angular motion are opposed by quadratic drag.
Defaults are calibrated so a base swimming gait cruises near 0.09 m/s and
a pi reorientation completes in a few seconds; see the calibration notes
in the README and the `calibrate` CLI subcommand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .geometry import wrap_angle

HALF_PI = math.pi / 2.0


@dataclass(frozen=True)
class BoatParams:
    mass: float = 0.66                # total mass [kg]
    top_radius: float = 0.076         # hull radius, docks sit on this circle [m]
    top_inertia: float = 1.3e-3       # hull yaw inertia [kg m^2]
    # light paddle+tail assembly: a heavy bottom body makes every shaft
    # command kick the hull hard enough to limit-cycle the heading loop
    bottom_inertia: float = 2.0e-4    # flipper/tail body yaw inertia [kg m^2]
    linear_drag: float = 0.35         # Stokes part of hull drag [N s/m]
    quadratic_drag: float = 1.6       # form part of hull drag [N s^2/m^2]
    angular_drag_top: float = 1.1e-3  # quadratic yaw drag on the hull [N m s^2]
    angular_drag_bottom: float = 2.0e-4
    thrust_gain: float = 0.014        # surrogate flipper gain [N s^2/rad^2]
    flipper_threshold: float = 1.0    # bottom spin below this gives no thrust [rad/s]
    thrust_cap: float = 0.20          # blade stall: thrust saturates here [N]
    tail_base_radius: float = 0.076   # spiral tail root radius [m]
    tail_protrusion: float = 0.04     # tip excess beyond the hull circle [m]
    tail_arc: float = HALF_PI         # angular extent of the spiral [rad]
    tail_tip_angle: float = math.pi   # tip location in the bottom-body frame [rad]
    steer_torque: float = 8e-4        # hull yaw moment from paused-paddle steering [N m]
    motor_torque_max: float = 0.6     # servo torque limit [N m]
    motor_kp: float = 0.9             # position-servo stiffness [N m/rad]
    motor_kd: float = 0.02            # position-servo damping [N m s/rad]
    # kv * dt * (1/top_inertia + 1/bottom_inertia) must stay below 1 at the
    # simulation rate or the discrete velocity loop rings at Nyquist
    motor_kv: float = 0.03            # velocity-servo gain [N m s/rad]
    # profile acceleration: rate commands ramp at this slope instead of
    # jumping, as servo firmware does; an instant +-rate_limit flip would
    # otherwise slew the light shaft by tens of rad/s inside one tick and
    # kick the hull hard enough to sustain a heading limit cycle
    motor_accel: float = 40.0         # commanded-rate ramp limit [rad/s^2]

    def __post_init__(self) -> None:
        for name in ("mass", "top_radius", "top_inertia", "bottom_inertia",
                     "motor_torque_max", "tail_arc", "motor_accel"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        for name in ("linear_drag", "quadratic_drag", "angular_drag_top",
                     "angular_drag_bottom", "thrust_gain", "flipper_threshold",
                     "steer_torque", "thrust_cap"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be non-negative")
        if self.tail_protrusion <= 0.0:
            raise ValueError("tail_protrusion must be positive; the tip has to protrude")
        if self.tail_base_radius + self.tail_protrusion <= self.top_radius:
            raise ValueError("tail tip must reach beyond the hull circle")

    @property
    def reaction_ratio(self) -> float:
        """Fraction of relative motor rotation that shows up on the hull."""
        return self.bottom_inertia / (self.top_inertia + self.bottom_inertia)

    @property
    def tail_tip_reach(self) -> float:
        return self.tail_base_radius + self.tail_protrusion

    def with_overrides(self, **kw) -> "BoatParams":
        return replace(self, **kw)


# Motor behavior modes.  `idle` freewheels, `oscillate` swims a stroke
# waveform, `orient` runs the reaction-wheel velocity servo, `tail` tracks a
# scripted sweep profile.
MOTOR_MODES = ("idle", "oscillate", "orient", "tail")


@dataclass(slots=True)
class BoatState:
    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0          # hull heading [rad]
    vx: float = 0.0
    vy: float = 0.0
    omega: float = 0.0          # hull yaw rate [rad/s]
    bottom_angle: float = 0.0   # bottom body world orientation [rad]
    bottom_omega: float = 0.0
    mode: str = "idle"
    docked_psis: tuple[float, ...] = field(default=())

    def copy(self) -> "BoatState":
        return BoatState(self.x, self.y, self.theta, self.vx, self.vy, self.omega,
                         self.bottom_angle, self.bottom_omega, self.mode,
                         self.docked_psis)

    @property
    def rel_angle(self) -> float:
        """Motor shaft angle: bottom body relative to the hull."""
        return wrap_angle(self.bottom_angle - self.theta)

    @property
    def rel_rate(self) -> float:
        return self.bottom_omega - self.omega


@dataclass(frozen=True)
class OscillationParams:
    """Base swimming gait: two sinusoidal half strokes about a centerline."""

    t1: float = 1.5          # first half-stroke duration [s]
    t2: float = 1.5          # second half-stroke duration [s]
    amplitude: float = 2.0   # stroke amplitude [rad]
    centerline: float = 0.0  # mean motor angle, sets the swim axis [rad]

    def __post_init__(self) -> None:
        if self.t1 <= 0.0 or self.t2 <= 0.0:
            raise ValueError("stroke durations must be positive")
        if self.amplitude <= 0.0:
            raise ValueError("stroke amplitude must be positive")

    @property
    def period(self) -> float:
        return self.t1 + self.t2


def motor_waveform(t_in_cycle: float, params: OscillationParams,
                   pause_fraction: float = 0.0) -> float:
    """Target relative motor angle at a time within one (possibly paused) cycle.

    A cycle is an optional pause followed by two opposite sinusoidal half
    strokes.  During the pause the target holds at the centerline; the first
    stroke then rises to +amplitude and returns, the second mirrors it.
    """
    if not 0.0 <= pause_fraction <= 1.0:
        raise ValueError("pause_fraction must lie in [0, 1]")
    pause = pause_fraction * params.period
    total = params.period + pause
    if not 0.0 <= t_in_cycle < total:
        raise ValueError(f"t_in_cycle {t_in_cycle!r} outside cycle of length {total!r}")
    t = t_in_cycle - pause
    if t < 0.0:
        return params.centerline
    if t < params.t1:
        return params.centerline + params.amplitude * math.sin(math.pi * t / params.t1)
    return params.centerline - params.amplitude * math.sin(math.pi * (t - params.t1) / params.t2)


def flipper_thrust(bottom_ang_vel: float, params: BoatParams) -> float:
    """Surrogate forward thrust magnitude for a given bottom-body spin.

    Quadratic in the spin rate between a dead band (slow flapping just
    sloshes water) and a stall plateau (the blades ventilate).
    """
    w = abs(bottom_ang_vel)
    if w < params.flipper_threshold:
        return 0.0
    return min(params.thrust_gain * w * w, params.thrust_cap)


def tail_tip_radius(angle_from_base: float, params: BoatParams) -> float:
    """Radius of the spiral tail at an angular offset from its base."""
    if not 0.0 <= angle_from_base <= params.tail_arc:
        raise ValueError("angle outside the tail arc")
    return params.tail_base_radius + params.tail_protrusion * (angle_from_base / params.tail_arc)


def tail_tip_position(state: BoatState, params: BoatParams) -> tuple[float, float]:
    """World position of the tail tip (the one contact point of the tail)."""
    ang = state.bottom_angle + params.tail_tip_angle
    r = params.tail_tip_reach
    return state.x + r * math.cos(ang), state.y + r * math.sin(ang)


def hull_drag_force(params: BoatParams, vx: float, vy: float) -> tuple[float, float]:
    c = params.linear_drag + params.quadratic_drag * math.hypot(vx, vy)
    return -c * vx, -c * vy


def top_drag_torque(params: BoatParams, omega: float) -> float:
    return -params.angular_drag_top * omega * abs(omega)


def bottom_drag_torque(params: BoatParams, omega: float) -> float:
    return -params.angular_drag_bottom * omega * abs(omega)


def step_boat(state: BoatState, motor_torque: float, dt: float, params: BoatParams,
              external_force: tuple[float, float] = (0.0, 0.0),
              external_torque_top: float = 0.0,
              external_torque_bottom: float = 0.0) -> BoatState:
    """One semi-implicit Euler step of a free single boat.

    The motor torque acts positively on the bottom body and negatively on
    the hull.  External forces act on the common center (the bodies are
    concentric), external torques on their respective bodies.  Quadratic
    drag is applied here; thrust is an external force chosen by the caller.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    fx, fy = external_force
    if not (math.isfinite(fx) and math.isfinite(fy) and math.isfinite(motor_torque)
            and math.isfinite(external_torque_top) and math.isfinite(external_torque_bottom)):
        raise ValueError("non-finite input to step_boat")

    m = params.mass
    dfx, dfy = hull_drag_force(params, state.vx, state.vy)
    ax = (fx + dfx) / m
    ay = (fy + dfy) / m
    alpha_top = (-motor_torque + external_torque_top
                 + top_drag_torque(params, state.omega)) / params.top_inertia
    alpha_bot = (motor_torque + external_torque_bottom
                 + bottom_drag_torque(params, state.bottom_omega)) / params.bottom_inertia

    vx = state.vx + ax * dt
    vy = state.vy + ay * dt
    omega = state.omega + alpha_top * dt
    bottom_omega = state.bottom_omega + alpha_bot * dt
    return BoatState(
        x=state.x + vx * dt,
        y=state.y + vy * dt,
        theta=wrap_angle(state.theta + omega * dt),
        vx=vx,
        vy=vy,
        omega=omega,
        bottom_angle=wrap_angle(state.bottom_angle + bottom_omega * dt),
        bottom_omega=bottom_omega,
        mode=state.mode,
        docked_psis=state.docked_psis,
    )


# -- motor servo laws ---------------------------------------------------------

def _clamp(v: float, lim: float) -> float:
    if v > lim:
        return lim
    if v < -lim:
        return -lim
    return v


def motor_position_torque(target: float, target_rate: float, rel_angle: float,
                          rel_rate: float, params: BoatParams) -> float:
    """PD position servo on the relative motor angle, torque limited."""
    err = wrap_angle(target - rel_angle)
    return _clamp(params.motor_kp * err + params.motor_kd * (target_rate - rel_rate),
                  params.motor_torque_max)


def motor_velocity_torque(target_rate: float, rel_rate: float, params: BoatParams) -> float:
    """P velocity servo on the relative motor rate, torque limited."""
    return _clamp(params.motor_kv * (target_rate - rel_rate), params.motor_torque_max)


