import math

import pytest

from modboat.boat import BoatParams, BoatState, step_boat
from modboat.structures import (
    Loads,
    edge_tension,
    integrate_structure,
    merged_velocity,
    rotate_about,
    structure_kinetics,
    translate,
)

P = BoatParams()
R = P.top_radius


def dumbbell(gap=0.0, vx=0.0, omega=0.0):
    """Two boats welded front-to-front along x, centered on the origin."""
    d = R + gap / 2.0
    sts = {0: BoatState(x=-d, theta=0.0), 1: BoatState(x=d, theta=math.pi)}
    for st in sts.values():
        st.vx = vx
    if omega:
        for st in sts.values():
            st.omega = omega
            # rigid velocities about the origin
            st.vx += -omega * st.y
            st.vy = omega * st.x
    return sts


def no_loads(ids):
    return {i: Loads() for i in ids}


def test_kinetics_mass_and_inertia():
    sts = dumbbell()
    kin = structure_kinetics([0, 1], sts, {0: P, 1: P}, no_loads([0, 1]), {})
    assert kin.mass == pytest.approx(2 * P.mass)
    assert kin.com_x == pytest.approx(0.0)
    expected_i = 2 * (P.top_inertia + P.mass * R * R)
    assert kin.inertia == pytest.approx(expected_i)


def test_pull_one_end_tension_is_half_force():
    # pull boat 0 straight away from boat 1: bond carries F/2
    sts = dumbbell()
    loads = no_loads([0, 1])
    F = 2.0
    loads[0].fx = -F
    kin = structure_kinetics([0, 1], sts, {0: P, 1: P}, loads, {})
    assert kin.ax == pytest.approx(-F / (2 * P.mass))
    # side {0}, its port faces +x (toward boat 1)
    t = edge_tension([0], 0.0, sts, {0: P, 1: P}, loads, kin)
    assert t == pytest.approx(F / 2, rel=1e-12)
    # computed from the other side it matches
    t2 = edge_tension([1], math.pi, sts, {0: P, 1: P}, loads, kin)
    assert t2 == pytest.approx(F / 2, rel=1e-9)


def test_push_together_reads_compression():
    sts = dumbbell()
    loads = no_loads([0, 1])
    loads[0].fx = 3.0   # shove boat 0 toward boat 1
    kin = structure_kinetics([0, 1], sts, {0: P, 1: P}, loads, {})
    t = edge_tension([0], 0.0, sts, {0: P, 1: P}, loads, kin)
    assert t == pytest.approx(-1.5, rel=1e-12)


def test_spinning_dumbbell_centripetal_tension():
    w = 3.0
    sts = dumbbell(omega=w)
    loads = no_loads([0, 1])
    kin = structure_kinetics([0, 1], sts, {0: P, 1: P}, loads, {})
    t = edge_tension([0], 0.0, sts, {0: P, 1: P}, loads, kin)
    # classic m w^2 r pull; drag here is tangential so it cannot pollute it
    expected = P.mass * w * w * R
    assert t == pytest.approx(expected, rel=0.02)


def test_structure_conserves_momentum_without_external():
    # internal motor torques only; no drag
    p = P.with_overrides(angular_drag_top=0.0, angular_drag_bottom=0.0,
                         linear_drag=0.0, quadratic_drag=0.0)
    sts = dumbbell(vx=0.05, omega=0.7)
    prm = {0: p, 1: p}
    dt = 1.0 / 240.0
    L0 = None
    for k in range(1000):
        loads = no_loads([0, 1])
        torques = {0: 0.3 * math.sin(0.01 * k), 1: -0.2}
        sts, kin = integrate_structure([0, 1], sts, prm, loads, torques, dt,
                                       anchored=False)
        # angular momentum about origin: hulls + bottoms + orbital
        L = sum(p.top_inertia * sts[i].omega + p.bottom_inertia * sts[i].bottom_omega
                + p.mass * (sts[i].x * sts[i].vy - sts[i].y * sts[i].vx)
                for i in (0, 1))
        Px = sum(p.mass * sts[i].vx for i in (0, 1))
        if L0 is None:
            L0, Px0 = L, Px
    assert L == pytest.approx(L0, abs=1e-9)
    assert Px == pytest.approx(Px0, abs=1e-12)


def test_anchored_structure_never_moves_but_bottom_spins():
    sts = dumbbell()
    loads = no_loads([0, 1])
    loads[0].fx = 50.0
    sts2, kin = integrate_structure([0, 1], sts, {0: P, 1: P}, loads,
                                    {0: 0.4}, 0.01, anchored=True)
    assert sts2[0].x == sts[0].x and sts2[0].omega == 0.0
    assert sts2[0].bottom_omega > 0.0
    assert kin.ax == 0.0 and kin.alpha == 0.0


def test_singleton_path_matches_step_boat():
    st = BoatState(x=0.2, y=-0.1, theta=0.4, vx=0.03, omega=0.2,
                   bottom_omega=-1.0)
    ld = Loads(fx=0.02, fy=-0.01, tau_top=1e-3, tau_bottom=-2e-3)
    out, _ = integrate_structure([7], {7: st.copy()}, {7: P}, {7: ld},
                                 {7: 0.15}, 0.01, anchored=False)
    ref = step_boat(st, 0.15, 0.01, P, external_force=(0.02, -0.01),
                    external_torque_top=1e-3, external_torque_bottom=-2e-3)
    got = out[7]
    assert got.x == ref.x and got.vy == ref.vy and got.omega == ref.omega
    assert got.bottom_omega == ref.bottom_omega


def test_rotate_about_and_translate():
    sts = {0: BoatState(x=1.0, y=0.0, theta=0.0, bottom_angle=0.5)}
    rotate_about(sts, [0], 0.0, 0.0, math.pi / 2)
    assert sts[0].x == pytest.approx(0.0, abs=1e-12)
    assert sts[0].y == pytest.approx(1.0)
    assert sts[0].theta == pytest.approx(math.pi / 2)
    assert sts[0].bottom_angle == pytest.approx(0.5 + math.pi / 2)
    translate(sts, [0], -0.5, 0.25)
    assert sts[0].x == pytest.approx(-0.5, abs=1e-12)
    assert sts[0].y == pytest.approx(1.25)


def test_merged_velocity_conserves_momentum():
    sts = {0: BoatState(x=0.0, vx=0.1, omega=1.0),
           1: BoatState(x=2 * R, vx=-0.04, vy=0.06, omega=-2.0, theta=math.pi)}
    prm = {0: P, 1: P}
    vx, vy, w, cx, cy = merged_velocity([0, 1], sts, prm)
    assert vx == pytest.approx(0.03)
    assert vy == pytest.approx(0.03)
    # angular momentum about the com reproduced by the rigid motion
    L_before = sum(
        prm[i].top_inertia * sts[i].omega
        + prm[i].mass * ((sts[i].x - cx) * sts[i].vy - (sts[i].y - cy) * sts[i].vx)
        for i in (0, 1))
    inertia = sum(prm[i].top_inertia
                  + prm[i].mass * ((sts[i].x - cx) ** 2 + (sts[i].y - cy) ** 2)
                  for i in (0, 1))
    assert w * inertia == pytest.approx(L_before, rel=1e-12)
