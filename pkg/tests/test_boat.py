import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from modboat.boat import (
    BoatParams,
    BoatState,
    OscillationParams,
    flipper_thrust,
    motor_position_torque,
    motor_velocity_torque,
    motor_waveform,
    step_boat,
    tail_tip_position,
    tail_tip_radius,
)

P = BoatParams()


# -- params -------------------------------------------------------------------

def test_params_validate():
    with pytest.raises(ValueError):
        BoatParams(mass=0.0)
    with pytest.raises(ValueError):
        BoatParams(tail_protrusion=0.0)
    with pytest.raises(ValueError):
        BoatParams(linear_drag=-1.0)


def test_reaction_ratio_value():
    # bottom inertia over total: 2.0e-4 / 1.5e-3
    assert P.reaction_ratio == pytest.approx(2.0e-4 / 1.5e-3, rel=1e-12)


# -- waveform -----------------------------------------------------------------

def test_waveform_analytic_points():
    osc = OscillationParams(t1=1.5, t2=1.5, amplitude=2.0, centerline=0.0)
    assert motor_waveform(0.0, osc) == pytest.approx(0.0)
    assert motor_waveform(0.75, osc) == pytest.approx(2.0)          # stroke-1 peak
    assert motor_waveform(1.5, osc) == pytest.approx(0.0, abs=1e-12)
    assert motor_waveform(2.25, osc) == pytest.approx(-2.0)         # stroke-2 trough
    assert motor_waveform(0.375, osc) == pytest.approx(2.0 * math.sin(math.pi / 4))


def test_waveform_asymmetric_strokes():
    osc = OscillationParams(t1=1.0, t2=2.0, amplitude=1.5, centerline=0.4)
    assert motor_waveform(0.5, osc) == pytest.approx(0.4 + 1.5)
    assert motor_waveform(2.0, osc) == pytest.approx(0.4 - 1.5)
    assert motor_waveform(0.0, osc) == pytest.approx(0.4)


def test_waveform_pause_holds_centerline():
    osc = OscillationParams(t1=1.5, t2=1.5, amplitude=2.0, centerline=0.1)
    # 20% pause = 0.6 s at the head of the cycle
    for t in (0.0, 0.3, 0.5999):
        assert motor_waveform(t, osc, pause_fraction=0.2) == pytest.approx(0.1)
    # strokes shift right by the pause
    assert motor_waveform(0.6 + 0.75, osc, pause_fraction=0.2) == pytest.approx(2.1)


def test_waveform_rejects_out_of_cycle_time():
    osc = OscillationParams()
    with pytest.raises(ValueError):
        motor_waveform(osc.period, osc)
    with pytest.raises(ValueError):
        motor_waveform(-0.1, osc)
    with pytest.raises(ValueError):
        motor_waveform(0.0, osc, pause_fraction=1.5)


# -- thrust and tail ----------------------------------------------------------

def test_flipper_thrust_gated_below_threshold():
    assert flipper_thrust(0.49, P) == 0.0
    assert flipper_thrust(-0.49, P) == 0.0
    assert flipper_thrust(0.5, P) == pytest.approx(P.thrust_gain * 0.25)
    assert flipper_thrust(-2.0, P) == pytest.approx(P.thrust_gain * 4.0)


def test_tail_radius_profile():
    assert tail_tip_radius(0.0, P) == pytest.approx(P.tail_base_radius)
    assert tail_tip_radius(P.tail_arc, P) == pytest.approx(P.tail_base_radius + P.tail_protrusion)
    assert tail_tip_radius(P.tail_arc / 2, P) == pytest.approx(
        P.tail_base_radius + P.tail_protrusion / 2)
    with pytest.raises(ValueError):
        tail_tip_radius(-0.1, P)


def test_tail_tip_position_frozen_case():
    # bottom body at world angle 0 puts the tip (body angle pi) on the -x side
    s = BoatState(x=1.0, y=2.0, bottom_angle=0.0)
    tx, ty = tail_tip_position(s, P)
    assert tx == pytest.approx(1.0 - P.tail_tip_reach, abs=1e-12)
    assert ty == pytest.approx(2.0, abs=1e-12)


# -- dynamics -----------------------------------------------------------------

def test_step_conserves_angular_momentum_under_motor_torque():
    # internal torque only: I_t*w_t + I_b*w_b must not change (no drag)
    p = P.with_overrides(angular_drag_top=0.0, angular_drag_bottom=0.0)
    s = BoatState(omega=0.3, bottom_omega=-1.2)
    L0 = p.top_inertia * s.omega + p.bottom_inertia * s.bottom_omega
    for k in range(2000):
        tau = 0.4 * math.sin(0.01 * k)
        s = step_boat(s, tau, 1.0 / 120.0, p)
    L1 = p.top_inertia * s.omega + p.bottom_inertia * s.bottom_omega
    assert L1 == pytest.approx(L0, abs=1e-9)


def test_linear_drag_decay_matches_ode_oracle():
    # coasting boat: m v' = -(c1 + c2 |v|) v, closed by scipy as the oracle
    p = P
    v0 = 0.25

    def rhs(_t, v):
        return [-(p.linear_drag + p.quadratic_drag * abs(v[0])) * v[0] / p.mass]

    sol = solve_ivp(rhs, (0.0, 6.0), [v0], rtol=1e-10, atol=1e-12)
    expected = sol.y[0, -1]

    s = BoatState(vx=v0)
    dt = 1.0 / 960.0  # fine step so Euler error stays under the tolerance
    for _ in range(int(6.0 / dt)):
        s = step_boat(s, 0.0, dt, p)
    assert s.vx == pytest.approx(expected, rel=1e-2)
    assert s.vy == 0.0


def test_angular_drag_decay_matches_ode_oracle():
    p = P
    w0 = 4.0

    def rhs(_t, w):
        return [-p.angular_drag_bottom * abs(w[0]) * w[0] / p.bottom_inertia]

    sol = solve_ivp(rhs, (0.0, 3.0), [w0], rtol=1e-10, atol=1e-12)
    expected = sol.y[0, -1]

    s = BoatState(bottom_omega=w0)
    dt = 1.0 / 960.0
    for _ in range(int(3.0 / dt)):
        s = step_boat(s, 0.0, dt, p)
    assert s.bottom_omega == pytest.approx(expected, rel=1e-2)


def test_constant_force_trajectory_matches_oracle():
    # straight-line accel from rest with drag, against scipy
    p = P
    F = 0.05

    def rhs(_t, y):
        x, v = y
        return [v, (F - (p.linear_drag + p.quadratic_drag * abs(v)) * v) / p.mass]

    sol = solve_ivp(rhs, (0.0, 10.0), [0.0, 0.0], rtol=1e-10, atol=1e-12)
    s = BoatState()
    dt = 1.0 / 960.0
    for _ in range(int(10.0 / dt)):
        s = step_boat(s, 0.0, dt, p, external_force=(F, 0.0))
    assert s.x == pytest.approx(sol.y[0, -1], rel=1e-2)
    assert s.vx == pytest.approx(sol.y[1, -1], rel=1e-2)


def test_step_rejects_bad_inputs():
    with pytest.raises(ValueError):
        step_boat(BoatState(), 0.0, 0.0, P)
    with pytest.raises(ValueError):
        step_boat(BoatState(), math.nan, 0.01, P)


def test_heading_wraps_during_long_spin():
    s = BoatState(omega=3.0)
    p = P.with_overrides(angular_drag_top=0.0)
    for _ in range(1200):
        s = step_boat(s, 0.0, 1.0 / 120.0, p)
    assert -math.pi < s.theta <= math.pi


# -- servos -------------------------------------------------------------------

def test_position_servo_drives_toward_target_and_clamps():
    tau = motor_position_torque(1.0, 0.0, 0.0, 0.0, P)
    assert tau == pytest.approx(min(P.motor_kp * 1.0, P.motor_torque_max))
    tau_big = motor_position_torque(math.pi, 0.0, 0.0, 0.0, P)
    assert tau_big == P.motor_torque_max or tau_big == pytest.approx(P.motor_kp * math.pi)
    assert abs(tau_big) <= P.motor_torque_max


def test_position_servo_wraps_error():
    # target just past +pi from the shaft: shortest way is negative
    tau = motor_position_torque(math.pi + 0.2, 0.0, 0.0, 0.0, P)
    assert tau < 0.0


def test_velocity_servo_sign_and_clamp():
    assert motor_velocity_torque(4.0, 0.0, P) == pytest.approx(
        min(P.motor_kv * 4.0, P.motor_torque_max))
    assert motor_velocity_torque(-4.0, 0.0, P) < 0.0
    assert abs(motor_velocity_torque(100.0, -100.0, P)) == P.motor_torque_max




def test_position_servo_settles_in_sim():
    # closed loop: servo tracks a 1 rad shaft step without drag interference
    p = P.with_overrides(angular_drag_top=0.0, angular_drag_bottom=0.0)
    s = BoatState()
    dt = 1.0 / 120.0
    for _ in range(int(8.0 / dt)):
        tau = motor_position_torque(1.0, 0.0, s.rel_angle, s.rel_rate, p)
        s = step_boat(s, tau, dt, p)
    assert s.rel_angle == pytest.approx(1.0, abs=0.02)
    assert abs(s.rel_rate) < 0.05


def test_np_seed_free():  # guard against accidental global-rng use in the hot path
    before = np.random.get_state()[1][:5].copy()
    step_boat(BoatState(vx=0.1), 0.01, 0.01, P)
    after = np.random.get_state()[1][:5]
    assert (before == after).all()
