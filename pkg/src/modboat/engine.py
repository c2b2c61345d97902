"""Fixed-step world simulation: boats, magnets, contacts, latches.

One `World` owns any number of boats, the connection graph between their
dock ports, and a seeded random stream for sensor noise.  Every step runs
the same stage order, so trials are bit-reproducible for a given seed:

1. sense: draw noisy measurements for every boat, in id order;
2. control: each boat's active mode turns measurements into a motor torque
   (gait tracking, reaction-wheel servo, tail slewing or freewheel);
3. forces: flipper thrust, pause-steering moments, the nearest free-port
   magnet pull per boat pair, hull and tail contact penalties;
4. integrate: each rigid structure (latched cluster or single boat) steps
   with semi-implicit Euler;
5. separations: bond tensions above the magnet holding force break edges;
6. latches: free ports meeting the gap/alignment/speed gate snap together;
7. bookkeeping: events, time, numeric health.

Control loops close over measurements one step old — callers read
`World.measurements` after `step()` and issue commands for the next step,
the way a real controller trails its sensors.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .boat import (
    BoatParams,
    BoatState,
    OscillationParams,
    flipper_thrust,
    motor_position_torque,
    motor_velocity_torque,
    tail_tip_position,
)
from .control import GaitRunner, OrientationController
from .docking import DockingParams, DockingStrategy, DockObservation, Phase
from .docks import CARDINAL_PSIS, ConnectionGraph, DockId, Polarity
from .geometry import Pose2, dock_world_pose, wrap_angle
from .magnets import MagnetModel, check_latch, pair_force
from .structures import (
    Loads,
    ZERO_KINETICS,
    edge_tension,
    integrate_structure,
    merged_velocity,
    rotate_about,
    translate,
)


# shaft speed below which the idle park grabs the paddle [rad/s]
PARK_ENGAGE_RATE = 0.8


class SimulationNumericsError(RuntimeError):
    """Raised when a state stops being finite; carries a diagnostic dump."""

    def __init__(self, message: str, dump: dict):
        super().__init__(message)
        self.dump = dump


@dataclass(frozen=True)
class NoiseModel:
    pos_sigma: float = 0.001      # position measurement noise [m]
    theta_sigma: float = 0.005    # heading measurement noise [rad]
    omega_sigma: float = 0.01     # hull-rate measurement noise [rad/s]
    force_sigma: float = 0.0      # random disturbance force per boat [N]

    def __post_init__(self) -> None:
        for name in ("pos_sigma", "theta_sigma", "omega_sigma", "force_sigma"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be non-negative")


@dataclass(frozen=True)
class Measurement:
    x: float
    y: float
    theta: float
    omega: float

    def pose(self) -> Pose2:
        return Pose2(self.x, self.y, self.theta)


@dataclass
class Boat:
    """A boat plus its attached low-level controllers and current command."""

    params: BoatParams
    state: BoatState
    polarity: Polarity
    fixed: bool = False
    gait: GaitRunner = field(default_factory=GaitRunner)
    orienter: OrientationController = field(default_factory=OrientationController)
    course: float | None = None
    theta_des: float = 0.0
    tail_point: float = 0.0     # slewed shaft target while sweeping
    tail_target: float = 0.0
    tail_rate: float = 0.0
    profiled_rate: float = 0.0  # ramped shaft-rate command while orienting
    park_point: float | None = None  # shaft hold angle while idle
    _prev_wave_target: float | None = None

    @property
    def mode(self) -> str:
        return self.state.mode

    def set_idle(self) -> None:
        if self.state.mode != "idle":
            self.state.mode = "idle"
            self.park_point = None   # grab the shaft afresh on the next step

    def set_oscillate(self, course: float | None, pivot: bool = True) -> None:
        if self.state.mode != "oscillate":
            self.state.mode = "oscillate"
            self.gait.reset()
            self._prev_wave_target = None
        self.gait.allow_pivot = pivot
        self.course = course

    def set_orient(self, theta_des: float, shaft_limit: float | None = None) -> None:
        if self.state.mode != "orient":
            self.state.mode = "orient"
            self.orienter.reset()
            # bumpless: the rate profile starts from wherever the shaft is
            self.profiled_rate = self.state.rel_rate
        self.theta_des = theta_des
        # per-command envelope: close-quarters maneuvers cap the shaft rate
        # to bound the flipper thrust a turn throws around
        self.orienter.rate_limit = (OrientationController.rate_limit
                                    if shaft_limit is None else shaft_limit)

    def set_tail(self, target: float, rate: float) -> None:
        """Sweep the shaft to `target` (relative angle) at `rate`."""
        if rate <= 0.0:
            raise ValueError("tail rate must be positive")
        if self.state.mode != "tail":
            self.state.mode = "tail"
            self.tail_point = self.state.rel_angle
        self.tail_target = target
        self.tail_rate = rate

    def tail_settled(self, tol: float = 0.05) -> bool:
        if self.state.mode != "tail":
            return False
        return (self.tail_point == self.tail_target
                and abs(wrap_angle(self.state.rel_angle - self.tail_target)) < tol
                and abs(self.state.rel_rate) < 0.2)


class World:
    def __init__(self, dt: float = 1.0 / 120.0, seed: int = 0,
                 noise: NoiseModel | None = None,
                 magnet_model: MagnetModel | None = None,
                 contact_stiffness: float = 3000.0,
                 contact_damping: float = 20.0,
                 contact_mu: float = 0.4,
                 contact_tangent_visc: float = 30.0):
        if dt <= 0.0:
            raise ValueError("dt must be positive")
        self.dt = dt
        self.rng = random.Random(seed)
        self.noise = noise if noise is not None else NoiseModel()
        self.magnets = magnet_model if magnet_model is not None else MagnetModel()
        self.contact_stiffness = contact_stiffness
        self.contact_damping = contact_damping
        self.contact_mu = contact_mu
        self.contact_tangent_visc = contact_tangent_visc
        self.boats: dict[int, Boat] = {}
        self.graph = ConnectionGraph()
        self.time = 0.0
        self.step_count = 0
        self.events: list[dict] = []
        self.measurements: dict[int, Measurement] = {}
        self._disturbance: dict[int, tuple[float, float]] = {}

    # -- construction -------------------------------------------------------

    def add_boat(self, boat_id: int, params: BoatParams, state: BoatState,
                 polarity: Polarity, fixed: bool = False) -> Boat:
        if boat_id in self.boats:
            raise ValueError(f"boat id {boat_id} already present")
        b = Boat(params=params, state=state, polarity=polarity, fixed=fixed)
        self.boats[boat_id] = b
        self.graph.add_node(boat_id)
        return b

    def weld(self, a: DockId, b: DockId) -> None:
        """Pre-latch two ports without snapping (for scenario setup).

        The caller is responsible for placing the boats consistently;
        `validate_connection_graph` can check the result.
        """
        if self.boats[a.boat].polarity == self.boats[b.boat].polarity:
            raise ValueError("latched boats must have opposite polarities")
        self.graph.add_edge(a, b)
        self._sync_docked(a.boat)
        self._sync_docked(b.boat)

    # -- helpers -------------------------------------------------------------

    def pose(self, i: int) -> Pose2:
        st = self.boats[i].state
        return Pose2(st.x, st.y, st.theta)

    def port_pose(self, dock: DockId) -> Pose2:
        return dock.world_pose(self.pose(dock.boat), self.boats[dock.boat].params.top_radius)

    def free_psis(self, i: int) -> list[float]:
        used = {d.psi for d in self.graph.ports_of(i)}
        return [p for p in CARDINAL_PSIS if p not in used]

    def port_gap(self, a: DockId, b: DockId) -> float:
        pa = self.port_pose(a)
        pb = self.port_pose(b)
        return math.hypot(pb.x - pa.x, pb.y - pa.y)

    def _sync_docked(self, i: int) -> None:
        self.boats[i].state.docked_psis = tuple(
            sorted(d.psi for d in self.graph.ports_of(i)))

    def _port_velocity(self, i: int, psi: float) -> tuple[float, float]:
        b = self.boats[i]
        st = b.state
        px, py = Pose2(st.x, st.y, st.theta).point_to_world(
            b.params.top_radius * math.cos(psi), b.params.top_radius * math.sin(psi))
        rx, ry = px - st.x, py - st.y
        return st.vx - st.omega * ry, st.vy + st.omega * rx

    def _event(self, kind: str, **data) -> dict:
        ev = {"t": round(self.time, 9), "kind": kind}
        ev.update(data)
        self.events.append(ev)
        return ev

    # -- the step ------------------------------------------------------------

    def step(self) -> list[dict]:
        """Advance one tick; returns the events raised during it."""
        dt = self.dt
        ids = sorted(self.boats)
        n_events_before = len(self.events)

        # 1. sensors and disturbance draws, fixed order
        meas: dict[int, Measurement] = {}
        dist: dict[int, tuple[float, float]] = {}
        nz = self.noise
        for i in ids:
            st = self.boats[i].state
            meas[i] = Measurement(
                x=st.x + self.rng.gauss(0.0, nz.pos_sigma),
                y=st.y + self.rng.gauss(0.0, nz.pos_sigma),
                theta=wrap_angle(st.theta + self.rng.gauss(0.0, nz.theta_sigma)),
                omega=st.omega + self.rng.gauss(0.0, nz.omega_sigma))
            if nz.force_sigma > 0.0:
                dist[i] = (self.rng.gauss(0.0, nz.force_sigma),
                           self.rng.gauss(0.0, nz.force_sigma))
        self.measurements = meas
        self._disturbance = dist

        # 2. controllers -> motor torques (encoders are exact; only world
        # sensing is noisy)
        torques: dict[int, float] = {}
        steering: dict[int, float] = {}
        for i in ids:
            b = self.boats[i]
            st = b.state
            rel, rel_rate = st.rel_angle, st.rel_rate
            m = meas[i]
            mode = st.mode
            if mode == "oscillate":
                g = b.gait.step(dt, m.theta, b.course)
                if b._prev_wave_target is None or g.cycle_started:
                    t_rate = 0.0
                else:
                    t_rate = (g.target_angle - b._prev_wave_target) / dt
                b._prev_wave_target = g.target_angle
                torques[i] = motor_position_torque(
                    g.target_angle, t_rate, rel, rel_rate, b.params)
                steering[i] = g.steering
            elif mode == "orient":
                cmd = b.orienter.step(m.theta, m.omega, b.theta_des, dt)
                slew = b.params.motor_accel * dt
                delta = cmd - b.profiled_rate
                if abs(delta) > slew:
                    delta = math.copysign(slew, delta)
                b.profiled_rate += delta
                torques[i] = motor_velocity_torque(
                    b.profiled_rate, rel_rate, b.params)
            elif mode == "tail":
                # unwrapped slew: the caller picks the sweep direction by
                # where it puts the target relative to the current shaft angle
                delta = b.tail_target - b.tail_point
                step_max = b.tail_rate * dt
                if abs(delta) <= step_max:
                    b.tail_point = b.tail_target
                    t_rate = 0.0
                else:
                    b.tail_point += math.copysign(step_max, delta)
                    t_rate = math.copysign(b.tail_rate, delta)
                torques[i] = motor_position_torque(
                    b.tail_point, t_rate, rel, rel_rate, b.params)
            else:
                # a paused servo holds its shaft where it stopped, but it
                # engages at the stroke's own reversal: braking a paddle
                # in full swing would dump its momentum into the hull,
                # while a freewheeling paddle would windmill for seconds
                if b.park_point is None and abs(rel_rate) <= PARK_ENGAGE_RATE:
                    b.park_point = rel
                if b.park_point is None:
                    torques[i] = 0.0
                else:
                    torques[i] = motor_position_torque(
                        b.park_point, 0.0, rel, rel_rate, b.params)

        # 3. forces
        loads = {i: Loads() for i in ids}
        for i in ids:
            b = self.boats[i]
            st = b.state
            f = flipper_thrust(st.bottom_omega, b.params)
            if f:
                loads[i].fx += f * math.cos(st.bottom_angle)
                loads[i].fy += f * math.sin(st.bottom_angle)
            s = steering.get(i, 0.0)
            if s:
                loads[i].tau_top += s * b.params.steer_torque
            if i in dist:
                loads[i].fx += dist[i][0]
                loads[i].fy += dist[i][1]

        components = self.graph.components()
        comp_of = {i: comp for comp in components for i in comp}
        self._magnet_forces(ids, comp_of, loads)
        self._contact_forces(ids, comp_of, loads)

        # 4. integrate structure by structure
        pre_states = {i: self.boats[i].state for i in ids}
        params = {i: self.boats[i].params for i in ids}
        kinetics = {}
        for comp in components:
            anchored = any(self.boats[i].fixed for i in comp)
            new_states, kin = integrate_structure(
                comp, pre_states, params, loads, torques, dt, anchored)
            kinetics[comp] = kin
            for i, ns in new_states.items():
                self.boats[i].state = ns
        self.time += dt
        self.step_count += 1
        self._check_finite()

        # 5. separations (tension is evaluated on the states the forces
        # acted on, matching the kinetics computed during integration)
        for edge in self.graph.edges():
            tension = self._edge_tension(edge, comp_of, kinetics, pre_states,
                                         params, loads)
            if tension is not None and tension > self.magnets.hold_force:
                self.graph.remove_edge(*edge)
                self._sync_docked(edge[0].boat)
                self._sync_docked(edge[1].boat)
                self._event("separation", a=repr(edge[0]), b=repr(edge[1]),
                            tension=round(tension, 6))

        # 6. latches
        self._find_latches(ids)

        return self.events[n_events_before:]

    # -- force stages ----------------------------------------------------------

    def _magnet_forces(self, ids, comp_of, loads) -> None:
        """Nearest free-port pull for every cross-structure boat pair."""
        mm = self.magnets
        for ai in range(len(ids)):
            for bi in range(ai + 1, len(ids)):
                i, j = ids[ai], ids[bi]
                if comp_of[i] is comp_of[j]:
                    continue
                pi = self.pose(i)
                pj = self.pose(j)
                # cheap cull: even facing ports cannot interact beyond this
                span = (self.boats[i].params.top_radius
                        + self.boats[j].params.top_radius + mm.capture_distance)
                if math.hypot(pj.x - pi.x, pj.y - pi.y) > span:
                    continue
                best = None
                for psi_i in self.free_psis(i):
                    qi = dock_world_pose(pi, psi_i, self.boats[i].params.top_radius)
                    for psi_j in self.free_psis(j):
                        qj = dock_world_pose(pj, psi_j, self.boats[j].params.top_radius)
                        gap = math.hypot(qj.x - qi.x, qj.y - qi.y)
                        key = (gap, psi_i, psi_j)
                        if best is None or key < best:
                            best = key
                if best is None:
                    continue
                _, psi_i, psi_j = best
                same = self.boats[i].polarity == self.boats[j].polarity
                (fxa, fya, ta), (fxb, fyb, tb) = pair_force(
                    pi, psi_i, self.boats[i].params.top_radius,
                    pj, psi_j, self.boats[j].params.top_radius, mm,
                    same_polarity=same)
                loads[i].fx += fxa
                loads[i].fy += fya
                loads[i].tau_top += ta
                loads[j].fx += fxb
                loads[j].fy += fyb
                loads[j].tau_top += tb

    def _contact_forces(self, ids, comp_of, loads) -> None:
        k = self.contact_stiffness
        cd = self.contact_damping
        # hull on hull, across structures only (latched hulls touch by design)
        for ai in range(len(ids)):
            for bi in range(ai + 1, len(ids)):
                i, j = ids[ai], ids[bi]
                if comp_of[i] is comp_of[j]:
                    continue
                si, sj = self.boats[i].state, self.boats[j].state
                ri = self.boats[i].params.top_radius
                rj = self.boats[j].params.top_radius
                dx, dy = sj.x - si.x, sj.y - si.y
                d = math.hypot(dx, dy)
                pen = ri + rj - d
                if pen <= 0.0 or d < 1e-9:
                    continue
                nx, ny = dx / d, dy / d   # from i toward j
                closing = (si.vx - sj.vx) * nx + (si.vy - sj.vy) * ny
                f = k * pen + cd * closing
                if f <= 0.0:
                    continue
                # central push, no lever about either hull
                loads[i].fx -= f * nx
                loads[i].fy -= f * ny
                loads[j].fx += f * nx
                loads[j].fy += f * ny
                # rim friction: without it the hulls slide freely and a
                # close magnetic pull slingshots a misaligned pair apart
                # instead of grinding the ports into alignment
                cx_, cy_ = si.x + (ri - pen / 2.0) * nx, si.y + (ri - pen / 2.0) * ny
                vi_x = si.vx - si.omega * (cy_ - si.y)
                vi_y = si.vy + si.omega * (cx_ - si.x)
                vj_x = sj.vx - sj.omega * (cy_ - sj.y)
                vj_y = sj.vy + sj.omega * (cx_ - sj.x)
                tx_, ty_ = -ny, nx
                vt = (vj_x - vi_x) * tx_ + (vj_y - vi_y) * ty_
                ft = min(self.contact_mu * f, self.contact_tangent_visc * abs(vt))
                if ft > 0.0:
                    ft = math.copysign(ft, vt)   # resists j's slide past i
                    loads[j].add_force_at(-ft * tx_, -ft * ty_, cx_, cy_,
                                          sj.x, sj.y)
                    loads[i].add_force_at(ft * tx_, ft * ty_, cx_, cy_,
                                          si.x, si.y)
        # tail tip on hull: only while the tail's boat actively drives its
        # lower body; parked tails are assumed swung clear of the ports
        for i in ids:
            bi = self.boats[i]
            if bi.state.mode not in ("tail", "oscillate"):
                continue
            tx, ty = tail_tip_position(bi.state, bi.params)
            for j in ids:
                if j == i:
                    continue
                bj = self.boats[j]
                sj = bj.state
                rj = bj.params.top_radius
                dx, dy = tx - sj.x, ty - sj.y
                d = math.hypot(dx, dy)
                pen = rj - d
                if pen <= 0.0 or d < 1e-9:
                    continue
                nx, ny = dx / d, dy / d   # pushes the tip out of hull j
                si = bi.state
                rtx, rty = tx - si.x, ty - si.y
                tip_vx = si.vx - si.bottom_omega * rty
                tip_vy = si.vy + si.bottom_omega * rtx
                closing = (sj.vx - tip_vx) * nx + (sj.vy - tip_vy) * ny
                f = k * pen + cd * closing
                if f <= 0.0:
                    continue
                loads[i].add_force_at(f * nx, f * ny, tx, ty, si.x, si.y,
                                      on_bottom=True)
                loads[j].add_force_at(-f * nx, -f * ny, tx, ty, sj.x, sj.y)

    # -- bond maintenance -------------------------------------------------------

    def _edge_tension(self, edge, comp_of, kinetics, states, params, loads):
        side = self.graph.side_of(edge)
        if side is None:
            return None   # edge inside a loop: statically indeterminate, keep
        if any(self.boats[i].fixed for i in side):
            other = self.graph.side_of((edge[1], edge[0]))
            if other is None or any(self.boats[i].fixed for i in other):
                return None
            side, near = other, edge[1]
        else:
            near = edge[0]
        comp = comp_of[near.boat]
        kin = kinetics.get(comp, ZERO_KINETICS)
        heading = self.port_pose(near).theta
        return edge_tension(side, heading, states, params, loads, kin)

    def _find_latches(self, ids) -> None:
        mm = self.magnets
        candidates = []
        comp_of = {i: comp for comp in self.graph.components() for i in comp}
        for ai in range(len(ids)):
            for bi in range(ai + 1, len(ids)):
                i, j = ids[ai], ids[bi]
                if comp_of[i] is comp_of[j]:
                    continue
                if self.boats[i].polarity == self.boats[j].polarity:
                    continue
                pi, pj = self.pose(i), self.pose(j)
                if math.hypot(pj.x - pi.x, pj.y - pi.y) > (
                        self.boats[i].params.top_radius
                        + self.boats[j].params.top_radius + 4 * mm.latch_gap):
                    continue
                for psi_i in self.free_psis(i):
                    qi = dock_world_pose(pi, psi_i, self.boats[i].params.top_radius)
                    for psi_j in self.free_psis(j):
                        qj = dock_world_pose(pj, psi_j, self.boats[j].params.top_radius)
                        gap = math.hypot(qj.x - qi.x, qj.y - qi.y)
                        if gap > mm.latch_gap:
                            continue
                        vix, viy = self._port_velocity(i, psi_i)
                        vjx, vjy = self._port_velocity(j, psi_j)
                        if gap > 1e-9:
                            ux, uy = (qj.x - qi.x) / gap, (qj.y - qi.y) / gap
                        else:
                            ux, uy = math.cos(qi.theta), math.sin(qi.theta)
                        opening = (vjx - vix) * ux + (vjy - viy) * uy
                        if check_latch(qi, qj, opening, mm):
                            candidates.append((gap, i, psi_i, j, psi_j))
        for gap, i, psi_i, j, psi_j in sorted(candidates):
            self._latch(DockId(i, psi_i), DockId(j, psi_j))

    def _latch(self, da: DockId, db: DockId) -> None:
        comp_of = {i: comp for comp in self.graph.components() for i in comp}
        if comp_of[da.boat] is comp_of[db.boat]:
            return   # an earlier latch this step merged them already
        if da.psi not in self.free_psis(da.boat):
            return
        if db.psi not in self.free_psis(db.boat):
            return

        side_a = comp_of[da.boat]
        side_b = comp_of[db.boat]
        fixed_a = any(self.boats[i].fixed for i in side_a)
        fixed_b = any(self.boats[i].fixed for i in side_b)
        if fixed_a and fixed_b:
            return   # two anchored structures cannot snap together
        if fixed_a:
            mover, still = db, da
        elif fixed_b:
            mover, still = da, db
        else:
            mass_a = sum(self.boats[i].params.mass for i in side_a)
            mass_b = sum(self.boats[i].params.mass for i in side_b)
            if mass_a < mass_b:
                mover, still = da, db
            elif mass_b < mass_a:
                mover, still = db, da
            else:
                # tie: move the junior structure (larger smallest id)
                mover, still = (da, db) if min(side_a) > min(side_b) else (db, da)

        states = {i: self.boats[i].state for i in self.boats}
        move_ids = comp_of[mover.boat]
        pm = self.port_pose(mover)
        ps = self.port_pose(still)
        # align headings anti-parallel about the moving port, then join points
        rotate_about(states, move_ids, pm.x, pm.y,
                     wrap_angle(ps.theta + math.pi - pm.theta))
        translate(states, move_ids, ps.x - pm.x, ps.y - pm.y)

        self.graph.add_edge(da, db)
        merged = self.graph.component_of(da.boat)
        params = {i: self.boats[i].params for i in self.boats}
        if any(self.boats[i].fixed for i in merged):
            for i in merged:
                st = self.boats[i].state
                st.vx = st.vy = st.omega = 0.0
        else:
            vx, vy, w, cx, cy = merged_velocity(merged, states, params)
            for i in merged:
                st = self.boats[i].state
                st.vx = vx - w * (st.y - cy)
                st.vy = vy + w * (st.x - cx)
                st.omega = w
        self._sync_docked(da.boat)
        self._sync_docked(db.boat)
        self._event("latch", a=repr(da), b=repr(db),
                    a_boat=da.boat, a_psi=da.psi, b_boat=db.boat, b_psi=db.psi)

    # -- health ------------------------------------------------------------------

    def _check_finite(self) -> None:
        for i, b in self.boats.items():
            st = b.state
            vals = (st.x, st.y, st.theta, st.vx, st.vy, st.omega,
                    st.bottom_angle, st.bottom_omega)
            if all(map(math.isfinite, vals)):
                continue
            fields = ("x", "y", "theta", "vx", "vy", "omega",
                      "bottom_angle", "bottom_omega", "mode")
            dump = {
                "time": self.time,
                "step": self.step_count,
                "boat": i,
                "states": {j: {f: getattr(bb.state, f) for f in fields}
                           for j, bb in self.boats.items()},
            }
            raise SimulationNumericsError(
                f"non-finite state on boat {i} at t={self.time:.4f}", dump)


@dataclass
class DockingTrialResult:
    """Outcome of one closed-loop docking attempt."""
    outcome: str                          # 'docked' | 'wrong_dock' | 'timeout'
    duration: float                       # seconds from trial start
    phase_log: list[tuple[float, str]]    # (time, phase) at each change
    latch_time: float | None              # trial time of the winning latch
    resets: int                           # aborts back to distancing
    final_gap: float                      # commanded port pair gap at the end

    @property
    def phases(self) -> list[str]:
        return [p for _, p in self.phase_log]


def run_docking_trial(world: World, mobile_id: int, target_id: int,
                      dparams: DockingParams,
                      max_time: float | None = None) -> DockingTrialResult:
    """Drive one boat onto a target port and report how it went.

    Runs the world until the commanded ports latch, any other latch grabs
    the mobile boat first, or the timeout passes.  The strategy reads the
    measurements taken during each step and commands modes for the next
    one, so control trails sensing by one tick, as it would on hardware.
    """
    strategy = DockingStrategy(dparams)
    mobile = world.boats[mobile_id]
    target_radius = world.boats[target_id].params.top_radius
    limit = dparams.timeout if max_time is None else max_time
    want = {(mobile_id, dparams.psi_b), (target_id, dparams.psi_t)}
    goal_b = DockId(mobile_id, dparams.psi_b)
    goal_t = DockId(target_id, dparams.psi_t)
    phase_log: list[tuple[float, str]] = []
    resets = 0
    start = world.time

    while world.time - start < limit - 0.5 * world.dt:
        events = world.step()
        now = world.time - start
        for ev in events:
            if ev["kind"] != "latch":
                continue
            pair = {(ev["a_boat"], ev["a_psi"]), (ev["b_boat"], ev["b_psi"])}
            if pair == want:
                strategy.mark_done()
                phase_log.append((now, Phase.DONE.value))
                return DockingTrialResult(
                    "docked", now, phase_log, now, resets,
                    world.port_gap(goal_b, goal_t))
            if mobile_id in (ev["a_boat"], ev["b_boat"]):
                return DockingTrialResult(
                    "wrong_dock", now, phase_log, now, resets,
                    world.port_gap(goal_b, goal_t))

        tm = world.measurements[target_id]
        mb = world.measurements[mobile_id]
        port = dock_world_pose(tm.pose(), dparams.psi_t, target_radius)
        obs = DockObservation(
            time=now, mobile_x=mb.x, mobile_y=mb.y, theta=mb.theta,
            omega=mb.omega, target_x=tm.x, target_y=tm.y,
            port_x=port.x, port_y=port.y, axis=port.theta)
        directive = strategy.step(obs)
        phase = strategy.phase.value
        if not phase_log or phase_log[-1][1] != phase:
            phase_log.append((now, phase))
            if phase == Phase.ABORTED_RESET.value:
                resets += 1
        if directive.action == "swim":
            mobile.set_oscillate(directive.course, directive.pivot)
        elif directive.action == "orient":
            mobile.set_orient(directive.heading)
        else:
            mobile.set_idle()

    return DockingTrialResult("timeout", limit, phase_log, None, resets,
                              world.port_gap(goal_b, goal_t))
