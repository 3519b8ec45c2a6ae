import math

import numpy as np
import pytest

from tor.onedim import (
    T_ZERO_SPEED,
    lambda_roots,
    nonoptimal_reverse_solution,
    one_dim_control,
    one_dim_state,
    solve_one_dim,
    switching_curve,
    v_star,
    velocities_for_time,
)
from tor.oracle import bang_oracle_1d
from tor.solver import CanonicalProblem
from tor.trajectory import forward_verify

V_STAR = -math.sqrt(2) - 2 + math.sqrt(10 + 8 * math.sqrt(2))
GRID = [v for v in np.linspace(-3.0, 3.0, 61) if abs(abs(v) - 1.0) > 1e-12]


class TestSolveOneDim:
    def test_zero_speed(self):
        sol = solve_one_dim(0.0)
        assert sol.t_f == pytest.approx(1 + math.sqrt(2), abs=1e-10)
        assert sol.lam == pytest.approx(2 + math.sqrt(2), abs=1e-10)
        assert sol.switch_fraction == pytest.approx(1 / sol.lam, abs=1e-15)

    def test_already_at_target(self):
        sol = solve_one_dim(-1.0)
        assert sol.t_f == 0.0 and sol.zero_control and sol.degenerate
        assert one_dim_control(sol, 0.5) == 0.0

    def test_constant_control(self):
        sol = solve_one_dim(1.0)
        assert sol.t_f == 2.0 and sol.degenerate
        assert {one_dim_control(sol, tau) for tau in np.linspace(0, 1, 11)} == {-1.0}

    def test_half_speed(self):
        sol = solve_one_dim(0.5)
        t1 = (-1 + math.sqrt(2.5)) / 2
        assert sol.lam == pytest.approx(7.1622777, abs=1e-7)
        assert sol.t_f == pytest.approx(2.0811388, abs=1e-7)
        assert sol.switch_time == pytest.approx(t1, abs=1e-12)

    @pytest.mark.parametrize("v0", GRID)
    def test_root_satisfies_quadratic(self, v0):
        lam = solve_one_dim(v0).lam
        assert abs(lam**2 * (1 - v0) - 4 * lam + 2 * v0 + 2) <= 1e-10 * max(1.0, lam**2)
        assert lam > 1.0

    @pytest.mark.parametrize("v0", GRID)
    def test_matches_bang_oracle(self, v0):
        t_oracle, t_switch = bang_oracle_1d(v0)
        sol = solve_one_dim(v0)
        assert sol.t_f == pytest.approx(t_oracle, abs=1e-10)
        assert sol.switch_time == pytest.approx(t_switch, abs=1e-9)

    @pytest.mark.parametrize("v0", GRID)
    def test_state_endpoints(self, v0):
        sol = solve_one_dim(v0)
        x0, vel0, _ = one_dim_state(sol, v0, 0.0)
        x1, vel1, _ = one_dim_state(sol, v0, 1.0)
        assert (x0, vel0) == (0.0, v0)
        assert x1 == pytest.approx(0.0, abs=1e-10)
        assert vel1 == pytest.approx(-1.0, abs=1e-10)

    def test_quadratic_roots_formula(self):
        lp, lm = lambda_roots(0.5)
        assert lp == pytest.approx((2 + math.sqrt(2.5)) / 0.5)
        assert lm == pytest.approx((2 - math.sqrt(2.5)) / 0.5)
        with pytest.raises(ValueError):
            lambda_roots(1.0)


class TestState:
    def test_zero_speed_start(self):
        sol = solve_one_dim(0.0)
        assert one_dim_state(sol, 0.0, 0.0) == (0.0, 0.0, 1.0)

    def test_zero_speed_end(self):
        x, v, u = one_dim_state(solve_one_dim(0.0), 0.0, 1.0)
        assert x == pytest.approx(0.0, abs=1e-10)
        assert v == pytest.approx(-1.0, abs=1e-10)
        assert u == -1.0

    def test_peak_at_switch(self):
        sol = solve_one_dim(0.5)
        tau = sol.switch_fraction
        assert tau == pytest.approx(0.1396, abs=1e-4)
        _, v, _ = one_dim_state(sol, 0.5, tau)
        assert v == pytest.approx(0.7905694, abs=1e-7)
        taus = np.linspace(0, 1, 2001)
        assert max(one_dim_state(sol, 0.5, t)[1] for t in taus) <= v + 1e-12

    def test_control_switches_at_fraction(self):
        sol = solve_one_dim(0.0)
        eps = 1e-9
        assert one_dim_control(sol, sol.switch_fraction - eps) == -one_dim_control(sol, sol.switch_fraction + eps)


class TestSwitchingCurve:
    def test_values(self):
        assert switching_curve(0.0, 1) == 0.0 and switching_curve(0.0, -1) == 0.0
        assert switching_curve(1.0, 1) == -0.5
        assert switching_curve(-2.0, -1) == 2.0

    def test_bad_branch(self):
        with pytest.raises(ValueError):
            switching_curve(1.0, 0)


class TestVelocitiesForTime:
    def test_minimum_time(self):
        vp, vm = velocities_for_time(2.0)
        assert vp == pytest.approx(1.0, abs=1e-12)
        assert vm == pytest.approx(1.0, abs=1e-12)

    def test_zero_speed_time(self):
        vp, vm = velocities_for_time(T_ZERO_SPEED)
        assert vp == pytest.approx(0.0, abs=1e-12)
        assert vm == pytest.approx(V_STAR, abs=1e-12)
        assert vm == pytest.approx(1.2024636517046616, abs=1e-12)

    def test_round_trip(self):
        for v in velocities_for_time(5.0):
            assert solve_one_dim(v).t_f == pytest.approx(5.0, abs=1e-9)

    def test_too_short(self):
        with pytest.raises(ValueError):
            velocities_for_time(1.9)

    @pytest.mark.parametrize("t_f", np.linspace(2.01, T_ZERO_SPEED - 0.01, 9))
    def test_two_nonnegative_below_zero_speed_time(self, t_f):
        vp, vm = velocities_for_time(t_f)
        assert vp >= 0.0 and vm >= 0.0 and vp != vm

    @pytest.mark.parametrize("t_f", [2.5, 3.0, 5.0, 10.0])
    def test_negative_branch_above(self, t_f):
        assert velocities_for_time(t_f)[0] < 0.0


class TestVStar:
    def test_value(self):
        assert v_star() == pytest.approx(V_STAR, abs=1e-15)

    def test_consistency(self):
        assert velocities_for_time(1 + math.sqrt(2))[1] == pytest.approx(v_star(), abs=1e-12)
        assert solve_one_dim(v_star()).t_f == pytest.approx(1 + math.sqrt(2), abs=1e-9)


def test_nonoptimal_reverse_extremal():
    sol = nonoptimal_reverse_solution()
    assert sol.t_f == 4.0 and sol.switch_fraction == 0.5
    assert one_dim_control(sol, 0.25) == 1.0 and one_dim_control(sol, 0.75) == -1.0
    pos, vel = forward_verify(CanonicalProblem(1.0, math.pi), sol)
    assert pos <= 1e-9 and vel <= 1e-9
    # rejected in favour of the zero-time answer
    assert solve_one_dim(-1.0).t_f < sol.t_f
