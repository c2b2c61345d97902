"""Rigid-structure dynamics for latched boats.

A latch welds two hulls into one rigid body; chains of latches make larger
structures.  Each structure translates and rotates as a unit built from the
member hulls (mass, inertia by parallel axis, drag summed per member), while
every member's lower body keeps its own spin degree of freedom: motors keep
working inside a structure, which is exactly how tail maneuvers pry latched
boats apart.  A structure containing a boat flagged as fixed is anchored and
does not move at all.

The bond force across a latch edge is recovered from the rigid-body
accelerations: summing mass-times-acceleration minus the applied external
forces over the boats on one side of the edge leaves exactly the force the
bond must transmit; its component along the dock axis is the tension the
magnets must hold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .boat import (
    BoatParams,
    BoatState,
    bottom_drag_torque,
    hull_drag_force,
    step_boat,
    top_drag_torque,
)
from .geometry import wrap_angle


@dataclass
class Loads:
    """External-load accumulator for one boat, one step.

    Excludes drag and the motor torque: the integrators add drag themselves
    and the motor pair is passed separately so its reaction is never lost.
    """
    fx: float = 0.0
    fy: float = 0.0
    tau_top: float = 0.0
    tau_bottom: float = 0.0

    def add_force_at(self, fx: float, fy: float, px: float, py: float,
                     cx: float, cy: float, on_bottom: bool = False) -> None:
        """Accumulate a force applied at a world point.

        The force itself always reaches the hull (the bodies share an axle),
        the lever torque goes to whichever body carries the point.
        """
        self.fx += fx
        self.fy += fy
        tau = (px - cx) * fy - (py - cy) * fx
        if on_bottom:
            self.tau_bottom += tau
        else:
            self.tau_top += tau


@dataclass(frozen=True)
class StructureKinetics:
    """Aggregate state of one rigid structure for a single step."""
    mass: float
    inertia: float          # hull assembly about the center of mass
    com_x: float
    com_y: float
    vx: float               # center-of-mass velocity
    vy: float
    omega: float
    ax: float
    ay: float
    alpha: float


ZERO_KINETICS = StructureKinetics(1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


def structure_kinetics(ids, states, params, loads, motor_torques) -> StructureKinetics:
    """Mass properties and accelerations of a free rigid structure.

    Drag is evaluated per member from its stored velocity, so big structures
    brake harder.  Motor torques react on the hull assembly with a minus
    sign; the forward halves act on the individual lower bodies and are not
    handled here.
    """
    m_tot = 0.0
    sx = sy = 0.0
    for i in ids:
        m = params[i].mass
        m_tot += m
        sx += m * states[i].x
        sy += m * states[i].y
    cx, cy = sx / m_tot, sy / m_tot

    inertia = 0.0
    fx_tot = fy_tot = tau_tot = 0.0
    px_tot = py_tot = 0.0
    for i in ids:
        st = states[i]
        p = params[i]
        rx, ry = st.x - cx, st.y - cy
        inertia += p.top_inertia + p.mass * (rx * rx + ry * ry)
        dfx, dfy = hull_drag_force(p, st.vx, st.vy)
        fx = loads[i].fx + dfx
        fy = loads[i].fy + dfy
        fx_tot += fx
        fy_tot += fy
        tau_tot += (rx * fy - ry * fx) + loads[i].tau_top \
            - motor_torques.get(i, 0.0) + top_drag_torque(p, st.omega)
        px_tot += p.mass * st.vx
        py_tot += p.mass * st.vy

    omega = states[min(ids)].omega   # welded hulls share one rate
    return StructureKinetics(
        mass=m_tot, inertia=inertia, com_x=cx, com_y=cy,
        vx=px_tot / m_tot, vy=py_tot / m_tot, omega=omega,
        ax=fx_tot / m_tot, ay=fy_tot / m_tot, alpha=tau_tot / inertia)


def _step_bottom(st: BoatState, p: BoatParams, tau_motor: float,
                 tau_ext: float, dt: float) -> tuple[float, float]:
    alpha = (tau_motor + tau_ext + bottom_drag_torque(p, st.bottom_omega)) / p.bottom_inertia
    w = st.bottom_omega + alpha * dt
    return wrap_angle(st.bottom_angle + w * dt), w


def integrate_structure(ids, states, params, loads, motor_torques, dt: float,
                        anchored: bool) -> tuple[dict, StructureKinetics]:
    """Advance one structure a step; returns new member states and kinetics.

    Anchored structures keep their hulls frozen (zero kinetics) while lower
    bodies still respond to their motors.  Single free boats delegate to the
    plain one-boat integrator so the two code paths cannot diverge.
    """
    ids = sorted(ids)
    out: dict[int, BoatState] = {}

    if anchored:
        for i in ids:
            st = states[i]
            ba, bw = _step_bottom(st, params[i], motor_torques.get(i, 0.0),
                                  loads[i].tau_bottom, dt)
            ns = st.copy()
            ns.bottom_angle, ns.bottom_omega = ba, bw
            ns.vx = ns.vy = ns.omega = 0.0
            out[i] = ns
        return out, ZERO_KINETICS

    if len(ids) == 1:
        i = ids[0]
        st, p, ld = states[i], params[i], loads[i]
        kin = structure_kinetics(ids, states, params, loads, motor_torques)
        out[i] = step_boat(st, motor_torques.get(i, 0.0), dt, p,
                           external_force=(ld.fx, ld.fy),
                           external_torque_top=ld.tau_top,
                           external_torque_bottom=ld.tau_bottom)
        return out, kin

    kin = structure_kinetics(ids, states, params, loads, motor_torques)
    vx = kin.vx + kin.ax * dt
    vy = kin.vy + kin.ay * dt
    omega = kin.omega + kin.alpha * dt
    dth = omega * dt
    c, s = math.cos(dth), math.sin(dth)
    ncx = kin.com_x + vx * dt
    ncy = kin.com_y + vy * dt
    for i in ids:
        st = states[i]
        rx, ry = st.x - kin.com_x, st.y - kin.com_y
        nrx, nry = c * rx - s * ry, s * rx + c * ry
        ns = st.copy()
        ns.x, ns.y = ncx + nrx, ncy + nry
        ns.theta = wrap_angle(st.theta + dth)
        ns.vx = vx - omega * nry
        ns.vy = vy + omega * nrx
        ns.omega = omega
        ba, bw = _step_bottom(st, params[i], motor_torques.get(i, 0.0),
                              loads[i].tau_bottom, dt)
        ns.bottom_angle, ns.bottom_omega = ba, bw
        out[i] = ns
    return out, kin


def edge_tension(side_ids, port_heading: float, states, params, loads,
                 kin: StructureKinetics) -> float:
    """Tension across a latch edge, from the boats on one side of it.

    ``side_ids`` are the boats reachable from the edge's near endpoint with
    the edge removed, ``port_heading`` the world heading of that endpoint's
    port (pointing at the partner).  Positive means the bond is being pulled
    apart; it fails when this exceeds the magnet holding force.
    """
    ux, uy = math.cos(port_heading), math.sin(port_heading)
    fx_need = fy_need = 0.0
    for i in side_ids:
        st = states[i]
        p = params[i]
        rx, ry = st.x - kin.com_x, st.y - kin.com_y
        ax = kin.ax - kin.alpha * ry - kin.omega * kin.omega * rx
        ay = kin.ay + kin.alpha * rx - kin.omega * kin.omega * ry
        dfx, dfy = hull_drag_force(p, st.vx, st.vy)
        fx_need += p.mass * ax - (loads[i].fx + dfx)
        fy_need += p.mass * ay - (loads[i].fy + dfy)
    return fx_need * ux + fy_need * uy


def rotate_about(states, ids, px: float, py: float, dtheta: float) -> None:
    """Rigidly rotate member hulls (poses only) about a world point."""
    c, s = math.cos(dtheta), math.sin(dtheta)
    for i in ids:
        st = states[i]
        rx, ry = st.x - px, st.y - py
        st.x = px + c * rx - s * ry
        st.y = py + s * rx + c * ry
        st.theta = wrap_angle(st.theta + dtheta)
        st.bottom_angle = wrap_angle(st.bottom_angle + dtheta)


def translate(states, ids, dx: float, dy: float) -> None:
    for i in ids:
        states[i].x += dx
        states[i].y += dy


def merged_velocity(ids, states, params) -> tuple[float, float, float, float, float]:
    """Momentum-conserving common motion for freshly welded hulls.

    Returns (vx, vy, omega, com_x, com_y).  Linear momentum and hull angular
    momentum about the joint center of mass are preserved; lower bodies are
    left alone (the axle transmits no impulsive torque).
    """
    m_tot = sx = sy = 0.0
    for i in ids:
        m = params[i].mass
        m_tot += m
        sx += m * states[i].x
        sy += m * states[i].y
    cx, cy = sx / m_tot, sy / m_tot
    px = py = ang = inertia = 0.0
    for i in ids:
        st = states[i]
        p = params[i]
        px += p.mass * st.vx
        py += p.mass * st.vy
        rx, ry = st.x - cx, st.y - cy
        inertia += p.top_inertia + p.mass * (rx * rx + ry * ry)
        ang += p.top_inertia * st.omega + p.mass * (rx * st.vy - ry * st.vx)
    return px / m_tot, py / m_tot, ang / inertia, cx, cy
