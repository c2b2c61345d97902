"""Steering and orientation controllers.

Two very different regimes share the one motor.  While swimming, the hull
heading is only controllable in the cycle average: a discrete steering loop
picks a signed pause fraction once per gait cycle, and the pause both rests
the stroke and lets an asymmetric paddle impulse (modeled as a small yaw
moment on the hull) turn the average heading.  For instantaneous heading
control the strokes stop entirely and the lower body works as a reaction
wheel: a gain-scheduled PID converts heading error into a commanded shaft
rate, aggressive far from the goal and relaxed near it so the final
approach does not chatter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .boat import OscillationParams, motor_waveform
from .geometry import wrap_angle


@dataclass(frozen=True)
class PidGains:
    kp: float
    ki: float
    kd: float

    def __post_init__(self) -> None:
        if self.kp < 0.0 or self.ki < 0.0 or self.kd < 0.0:
            raise ValueError("gains must be non-negative")


AGGRESSIVE_GAINS = PidGains(30.0, 0.0, 30.0)
GENTLE_GAINS = PidGains(10.0, 0.0, 30.0)


@dataclass
class OrientationController:
    """Gain-scheduled heading PID commanding the reaction-wheel shaft rate.

    Starts on the aggressive gain set and drops, once and permanently for
    the maneuver, to the gentle set when the error and the hull rate are
    both small.  Output is the commanded relative shaft rate: the lower
    body spins against the intended hull turn, so the sign is inverted
    relative to the raw PID value.
    """

    hot: PidGains = AGGRESSIVE_GAINS
    soft: PidGains = GENTLE_GAINS
    error_switch: float = 0.15   # relax below this heading error [rad]
    rate_switch: float = 1.0     # ... and below this hull rate [rad/s]
    rate_limit: float = 6.0      # shaft rate command clamp [rad/s]
    windup_limit: float = 1.0    # integral clamp [rad s]
    scheduled: bool = True       # False pins the gentle gains (for comparison runs)
    integral: float = 0.0
    prev_error: float | None = None
    relaxed: bool = False

    def reset(self) -> None:
        self.integral = 0.0
        self.prev_error = None
        self.relaxed = False

    def gains(self) -> PidGains:
        if not self.scheduled or self.relaxed:
            return self.soft
        return self.hot

    def step(self, theta: float, omega: float, theta_des: float, dt: float) -> float:
        if dt <= 0.0:
            raise ValueError("dt must be positive")
        err = wrap_angle(theta_des - theta)
        if self.scheduled and not self.relaxed:
            if abs(err) < self.error_switch and abs(omega) < self.rate_switch:
                self.relaxed = True
        g = self.gains()
        self.integral = _clamp(self.integral + err * dt, self.windup_limit)
        if self.prev_error is None:
            derr = 0.0
        else:
            derr = wrap_angle(err - self.prev_error) / dt
        self.prev_error = err
        u = g.kp * err + g.ki * self.integral + g.kd * derr
        return -_clamp(u, self.rate_limit)


def _clamp(v: float, lim: float) -> float:
    if v > lim:
        return lim
    if v < -lim:
        return -lim
    return v


def should_begin_final_turn(theta: float, omega: float, theta_des: float,
                            omega_min: float = 0.2) -> bool:
    """Moment test for handing over from swimming to the reaction wheel.

    The wheel is engaged only while the hull already swings toward the
    desired heading fast enough, so the maneuver starts with momentum in
    the right direction instead of fighting the swim wobble.
    """
    if abs(omega) < omega_min:
        return False
    return omega * wrap_angle(theta - theta_des) < 0.0


def required_heading(bearing: float, psi: float) -> float:
    """Hull heading that points dock `psi` along a world bearing."""
    return wrap_angle(bearing - psi)


def circular_mean(angles) -> float:
    s = 0.0
    c = 0.0
    n = 0
    for a in angles:
        s += math.sin(a)
        c += math.cos(a)
        n += 1
    if n == 0:
        raise ValueError("circular_mean of no angles")
    if math.hypot(s, c) < 1e-9 * n:
        raise ValueError("angles cancel; mean undefined")
    return math.atan2(s, c)


@dataclass
class GaitStep:
    """Per-step swimming directive for the motor and hull."""
    target_angle: float        # shaft position target [rad]
    steering: float            # -1/0/+1, yaw-moment direction during a pause
    in_pause: bool
    cycle_started: bool        # True on the step that begins a new cycle


@dataclass
class GaitRunner:
    """Stroke scheduler with once-per-cycle pause steering.

    Each cycle is an optional leading pause plus two opposite strokes.  At
    every cycle boundary the cycle-averaged hull heading is compared with
    the requested course and a signed pause fraction is chosen; during the
    pause the strokes rest and a steering moment (applied by the caller)
    turns the hull.  Headings are averaged circularly so wrap-around
    courses do not bias the estimate.

    Course errors beyond ``pivot_threshold`` switch to pivot cycles: a
    half period of pure pause steering with the paddle parked, repeated
    until the error re-enters the proportional band.  Stroking through a
    near-reversal would out-run the turn and carry the hull the wrong
    way faster than the pause could bring it around.
    """

    osc: OscillationParams = field(default_factory=OscillationParams)
    steer_feedback: float = 0.8   # fraction of the heading error to remove per cycle
    full_pause_turn: float = 1.6  # calibrated hull turn from a full-period pause [rad]
    max_pause: float = 0.6        # cap on the commanded pause fraction
    pivot_threshold: float = 1.2  # errors beyond this turn in place [rad]
    allow_pivot: bool = True      # callers clear this near obstacles: the park
                                  # kick of a pivot cycle swings the hull too
                                  # hard for close-quarters work
    # fresh runners start at a boundary so the first step already steers;
    # a full blind cycle from a bad initial heading can cover half a meter
    t_in_cycle: float = math.inf
    pause_cmd: float = 0.0        # signed; magnitude is the pause fraction
    pivoting: bool = False
    _sin: float = 0.0
    _cos: float = 0.0
    _n: int = 0

    def cycle_length(self) -> float:
        if self.pivoting:
            return 0.5 * self.osc.period
        return self.osc.period * (1.0 + abs(self.pause_cmd))

    def step(self, dt: float, heading: float, course: float | None) -> GaitStep:
        if dt <= 0.0:
            raise ValueError("dt must be positive")
        started = False
        if self.t_in_cycle >= self.cycle_length():
            if course is not None:
                # no averaged history on the very first cycle: use the
                # instantaneous heading
                if self._n > 0:
                    avg = math.atan2(self._sin, self._cos)
                else:
                    avg = heading
                err = wrap_angle(course - avg)
                self.pivoting = self.allow_pivot and abs(err) > self.pivot_threshold
                if self.pivoting:
                    self.pause_cmd = math.copysign(1.0, err)
                else:
                    raw = self.steer_feedback * err / self.full_pause_turn
                    self.pause_cmd = _clamp(raw, self.max_pause)
            else:
                self.pivoting = False
                self.pause_cmd = 0.0
            self._sin = 0.0
            self._cos = 0.0
            self._n = 0
            self.t_in_cycle = 0.0
            started = True
        self._sin += math.sin(heading)
        self._cos += math.cos(heading)
        self._n += 1
        if self.pivoting:
            in_pause = True
            target = self.osc.centerline
        else:
            pause = abs(self.pause_cmd)
            in_pause = self.t_in_cycle < pause * self.osc.period
            target = motor_waveform(self.t_in_cycle, self.osc, pause)
        steering = math.copysign(1.0, self.pause_cmd) if in_pause and self.pause_cmd else 0.0
        self.t_in_cycle += dt
        return GaitStep(target, steering, in_pause, started)

    def reset(self) -> None:
        self.t_in_cycle = math.inf
        self.pause_cmd = 0.0
        self.pivoting = False
        self._sin = 0.0
        self._cos = 0.0
        self._n = 0
