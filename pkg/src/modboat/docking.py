"""Three-stage docking strategy around a conical approach region.

The plane around the target port is split into four zones: outside the
approach cone, inside it but beyond the approach distance, inside it and
closing, and the dock zone within reach of the magnets.  The phase machine
walks forward through distancing (swim to a staging waypoint out along the
dock axis), far and near homing (swim at the port), and a final orienting
maneuver (stop the strokes, reaction-wheel the hull so the chosen dock
faces the target while the magnets pull the boat in).  Leaving the cone,
or drifting back out of range during the final turn, aborts the attempt
and restarts from distancing; a latch on the commanded port completes it.

The phase machine is deliberately pure: it consumes measured observations
and emits directives (a course to swim or a heading to hold) and never
touches simulation state, so it can be driven by recorded or synthetic
data in tests.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .control import required_heading, should_begin_final_turn
from .docks import cardinal_psi
from .geometry import wrap_angle


class Region(enum.IntEnum):
    OUTSIDE = 0
    FAR_CONE = 1
    MID_CONE = 2
    DOCK_ZONE = 3


class Phase(enum.Enum):
    DISTANCING = "DISTANCING"
    HOMING_FAR = "HOMING_FAR"
    HOMING_NEAR = "HOMING_NEAR"
    ORIENTING = "ORIENTING"
    DONE = "DONE"
    ABORTED_RESET = "ABORTED_RESET"


def default_dock_distance(psi_b: float, free_floating: bool = False) -> float:
    """Dock-zone radius used unless a scenario overrides it.

    The rear approach gets a tighter zone so the long final flip starts
    closer in; free-floating targets get a wider one because they give way
    during capture.
    """
    psi_b = cardinal_psi(psi_b)
    if psi_b == math.pi:
        return 0.27
    if free_floating:
        return 0.33
    return 0.30


@dataclass(frozen=True)
class DockingParams:
    psi_t: float                  # target-side dock to connect to
    psi_b: float                  # mobile-side dock to connect with
    approach_distance: float = 1.2
    cone_width: float = math.radians(40.0)   # full width of the approach cone
    dock_distance: float | None = None       # None -> default for psi_b
    omega_trans: float = 0.2      # hull-rate floor for starting the final turn
    brake_margin: float = 0.08    # stop paddling this far outside the stop ring
    creep_rate: float = 0.02      # glide slower than this and the gait pulses again
    orient_patience: float = 12.0  # give up on a final turn that latches nothing
    timeout: float = 180.0
    free_floating_target: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "psi_t", cardinal_psi(self.psi_t))
        object.__setattr__(self, "psi_b", cardinal_psi(self.psi_b))
        if self.dock_distance is None:
            object.__setattr__(
                self, "dock_distance",
                default_dock_distance(self.psi_b, self.free_floating_target))
        if not 0.0 < self.dock_distance < self.approach_distance:
            raise ValueError("dock_distance must sit inside the approach distance")
        if not 0.0 < self.cone_width < math.pi:
            raise ValueError("cone_width out of range")
        if self.brake_margin < 0.0:
            raise ValueError("brake_margin must be non-negative")
        if self.creep_rate <= 0.0:
            raise ValueError("creep_rate must be positive")
        if self.orient_patience <= 0.0:
            raise ValueError("orient_patience must be positive")


def classify_region(distance: float, off_axis: float, params: DockingParams) -> Region:
    """Zone of a mobile boat relative to the target port.

    ``distance`` is center-to-center, ``off_axis`` the angle between the
    dock axis and the port-to-mobile direction.  Boundary rule: ties go
    toward docking progress — at exactly the dock distance the zone is
    DOCK_ZONE, on the cone edge the boat counts as inside, and at exactly
    the approach distance it counts as already closing (MID_CONE).
    """
    if distance <= params.dock_distance:
        return Region.DOCK_ZONE
    if abs(wrap_angle(off_axis)) > params.cone_width / 2.0:
        return Region.OUTSIDE
    if distance > params.approach_distance:
        return Region.FAR_CONE
    return Region.MID_CONE


@dataclass(frozen=True)
class DockObservation:
    """Measured quantities the strategy sees each step."""
    time: float
    mobile_x: float
    mobile_y: float
    theta: float        # hull heading
    omega: float        # hull rate
    target_x: float     # target boat center
    target_y: float
    port_x: float       # target port point
    port_y: float
    axis: float         # outward world direction of the target port

    def distance(self) -> float:
        return math.hypot(self.mobile_x - self.target_x, self.mobile_y - self.target_y)

    def off_axis(self) -> float:
        toward = math.atan2(self.mobile_y - self.port_y, self.mobile_x - self.port_x)
        return wrap_angle(toward - self.axis)

    def bearing_to_port(self) -> float:
        return math.atan2(self.port_y - self.mobile_y, self.port_x - self.mobile_x)


@dataclass(frozen=True)
class Directive:
    action: str                   # 'swim' | 'orient' | 'hold'
    course: float | None = None   # swim: desired course over ground
    heading: float | None = None  # orient: hull heading to hold
    pivot: bool = True            # swim: whether turn-in-place cycles are allowed
    shaft_limit: float | None = None   # orient: cap on the commanded shaft rate


class DockingStrategy:
    """Phase machine for one docking attempt (retries internally on abort)."""

    # closing-rate baseline: long enough that mm-level position noise
    # averages down to a few mm/s of rate error
    RANGE_BASELINE = 0.25
    # give an adverse leftover spin this long to bleed off before the
    # final turn starts anyway
    CATCH_WAIT = 0.6
    # bow-error band for the braking glide: coast while the bow holds the
    # port bearing, trim only when it wanders out.  The first trim waits
    # for the paddle park to engage so the grab does not have to brake a
    # shaft in full swing (that would kick the hull hard)
    TRIM_BAND = 0.15
    GRAB_DELAY = 0.5
    # shaft-rate envelopes this close to the target: trim below the
    # flipper threshold (no thrust at all), turn slow enough that the
    # thrust vector sweeps full paddle revolutions and averages out
    # instead of shoving the hull off the approach axis
    TRIM_SHAFT = 1.0
    TURN_SHAFT = 2.5

    def __init__(self, params: DockingParams):
        self.params = params
        self.phase: Phase | None = None   # set from the first observation
        self._range_mark: tuple[float, float] | None = None
        self._closing = 0.0
        self._orient_since: float | None = None
        self._zone_since: float | None = None
        self._brake_since: float | None = None
        self._trimming = False

    def theta_des(self, obs: DockObservation) -> float:
        return required_heading(obs.bearing_to_port(), self.params.psi_b)

    def waypoint(self, obs: DockObservation) -> tuple[float, float]:
        """Staging point out along the dock axis at the approach distance."""
        d = self.params.approach_distance
        return (obs.port_x + d * math.cos(obs.axis),
                obs.port_y + d * math.sin(obs.axis))

    def mark_done(self) -> None:
        self.phase = Phase.DONE

    def step(self, obs: DockObservation) -> Directive:
        p = self.params
        d_now = obs.distance()
        region = classify_region(d_now, obs.off_axis(), p)

        if self._range_mark is None:
            self._range_mark = (obs.time, d_now)
        elif obs.time - self._range_mark[0] >= self.RANGE_BASELINE:
            span = obs.time - self._range_mark[0]
            self._closing = (self._range_mark[1] - d_now) / span
            self._range_mark = (obs.time, d_now)

        if self.phase is None:
            if region is Region.OUTSIDE:
                self.phase = Phase.DISTANCING
            elif region is Region.FAR_CONE:
                self.phase = Phase.HOMING_FAR
            else:
                self.phase = Phase.HOMING_NEAR

        if self.phase is Phase.DONE:
            return Directive("hold")

        if self.phase is Phase.ABORTED_RESET:
            # spend at least one full step back in DISTANCING regardless of
            # the (possibly noise-flickering) region
            self.phase = Phase.DISTANCING
            wx, wy = self.waypoint(obs)
            return Directive("swim", course=math.atan2(wy - obs.mobile_y,
                                                       wx - obs.mobile_x))

        if self.phase in (Phase.HOMING_FAR, Phase.HOMING_NEAR):
            if region is Region.OUTSIDE:
                self.phase = Phase.ABORTED_RESET
        elif self.phase is Phase.ORIENTING:
            # lenient while turning: the cone angle is meaningless right at
            # the port, so apply it (doubled) only outside the dock zone
            stuck = (self._orient_since is not None
                     and obs.time - self._orient_since > p.orient_patience)
            if stuck or d_now > p.approach_distance or (
                    d_now > p.dock_distance + 0.05
                    and abs(obs.off_axis()) > p.cone_width):
                self.phase = Phase.ABORTED_RESET

        if self.phase is Phase.ABORTED_RESET:
            wx, wy = self.waypoint(obs)
            return Directive("swim", course=math.atan2(wy - obs.mobile_y,
                                                       wx - obs.mobile_x))

        if self.phase is Phase.DISTANCING:
            if region is Region.FAR_CONE:
                self.phase = Phase.HOMING_FAR
            else:
                wx, wy = self.waypoint(obs)
                return Directive("swim", course=math.atan2(wy - obs.mobile_y,
                                                           wx - obs.mobile_x))

        if self.phase is Phase.HOMING_FAR:
            if region in (Region.MID_CONE, Region.DOCK_ZONE):
                self.phase = Phase.HOMING_NEAR
            # same directive either way; the advance takes effect next step,
            # which keeps the logged sequence strictly one phase at a time
            return Directive("swim", course=obs.bearing_to_port())

        if self.phase is Phase.HOMING_NEAR:
            if region is Region.DOCK_ZONE and self._zone_since is None:
                self._zone_since = obs.time
            elif region is not Region.DOCK_ZONE:
                self._zone_since = None
            # the momentum test exploits leftover stroke spin; a boat that
            # glided in with a parked paddle may arrive with none, so a calm
            # hull hands over directly, and an adverse spin only defers the
            # handover until CATCH_WAIT has drained most of it
            if region is Region.DOCK_ZONE and (
                    abs(obs.omega) < p.omega_trans
                    or obs.time - self._zone_since > self.CATCH_WAIT
                    or should_begin_final_turn(
                        obs.theta, obs.omega, self.theta_des(obs),
                        p.omega_trans)):
                self.phase = Phase.ORIENTING
                self._orient_since = obs.time
                self._zone_since = None
            elif (d_now <= p.dock_distance + p.brake_margin
                    and self._closing > p.creep_rate):
                # coast the last stretch: crossing the stop ring slowly
                # keeps the bow magnets below capture strength while the
                # final turn sweeps the bow past the target.  Mostly drift
                # with the paddle parked, with short wheel-trim episodes
                # when the bow wanders off the bearing
                if self._brake_since is None:
                    self._brake_since = obs.time
                bow_err = wrap_angle(obs.bearing_to_port() - obs.theta)
                if abs(bow_err) > self.TRIM_BAND:
                    self._trimming = True
                elif abs(bow_err) < self.TRIM_BAND / 3.0:
                    self._trimming = False
                if self._trimming and obs.time - self._brake_since > self.GRAB_DELAY:
                    return Directive("orient", heading=obs.bearing_to_port(),
                                     shaft_limit=self.TRIM_SHAFT)
                return Directive("hold")
            else:
                # no turn-in-place strokes this close in: the park kick of
                # a pivot cycle satisfies the handover test mid-spin and
                # the final turn would start from a flying hull
                self._trimming = False
                self._brake_since = None
                return Directive("swim", course=obs.bearing_to_port(),
                                 pivot=d_now > p.dock_distance + p.brake_margin)

        return Directive("orient", heading=self.theta_des(obs))


# transitions the phase log may contain; used by the trial-grammar check
PHASE_SUCCESSORS: dict[Phase, frozenset[Phase]] = {
    Phase.DISTANCING: frozenset({Phase.DISTANCING, Phase.HOMING_FAR}),
    Phase.HOMING_FAR: frozenset({Phase.HOMING_FAR, Phase.HOMING_NEAR,
                                 Phase.ABORTED_RESET}),
    Phase.HOMING_NEAR: frozenset({Phase.HOMING_NEAR, Phase.ORIENTING,
                                  Phase.ABORTED_RESET}),
    Phase.ORIENTING: frozenset({Phase.ORIENTING, Phase.DONE, Phase.ABORTED_RESET}),
    Phase.ABORTED_RESET: frozenset({Phase.DISTANCING}),
    Phase.DONE: frozenset({Phase.DONE}),
}

_VALID_STARTS = frozenset({Phase.DISTANCING, Phase.HOMING_FAR, Phase.HOMING_NEAR})


def phase_sequence_violations(phases) -> list[str]:
    """Check a phase log against the in-order-with-reset grammar.

    Phases must only move forward (distancing, far homing, near homing,
    orienting, done), except that an abort marker may follow any homing or
    orienting phase and must be followed by distancing.  Returns human
    readable violations, empty when the sequence is legal.
    """
    seq = [p if isinstance(p, Phase) else Phase(p) for p in phases]
    if not seq:
        return ["empty phase sequence"]
    problems = []
    if seq[0] not in _VALID_STARTS:
        problems.append(f"illegal start phase {seq[0].value}")
    for i in range(1, len(seq)):
        if seq[i] not in PHASE_SUCCESSORS[seq[i - 1]]:
            problems.append(
                f"illegal transition {seq[i - 1].value} -> {seq[i].value} at index {i}")
    return problems
