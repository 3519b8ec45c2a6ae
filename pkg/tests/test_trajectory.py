import math

import numpy as np
import pytest

from tor.onedim import solve_one_dim
from tor.panels import FIG1_ALPHAS, FIG1_SPEED, FIG2_ALPHA, FIG2_SPEEDS, interior_alphas
from tor.solver import AdjointSolution, CanonicalProblem, solve
from tor.trajectory import (
    ACCELERATING,
    DECELERATING,
    control_angles,
    control_at,
    control_samples,
    forward_verify,
    initial_regime,
    sample_trajectory,
    speed_regimes,
    state_at,
    terminal_regime,
)

PI = math.pi


@pytest.fixture(scope="module")
def fig1_case():
    p = CanonicalProblem(3.0, 0.25 * PI)
    return p, solve(p)


def _rk4_state(p, sol, t_end, steps):
    """Plain step-by-step RK4, independent of forward_verify."""
    h = t_end / steps
    x, v = np.zeros(2), p.v0.astype(float)
    for k in range(steps):
        t = k * h
        ua, um, ub = (control_at(sol, s) for s in (t, t + h / 2, t + h))
        x, v = x + h * v + h * h / 6 * (ua + 2 * um), v + h / 6 * (ua + 4 * um + ub)
    return x, v


class TestControl:
    def test_starts_along_eta(self, fig1_case):
        _, sol = fig1_case
        np.testing.assert_allclose(control_at(sol, 0.0), sol.eta / np.linalg.norm(sol.eta), atol=1e-15)

    def test_unit_norm(self, fig1_case):
        _, sol = fig1_case
        us = control_samples(sol, np.linspace(0.0, sol.t_f, 1000))
        assert np.max(np.abs(np.hypot(us[:, 0], us[:, 1]) - 1.0)) <= 1e-12

    def test_smooth_rotation(self, fig1_case):
        _, sol = fig1_case
        us = control_samples(sol, np.linspace(0.0, sol.t_f, 1000))
        assert np.max(np.hypot(*np.diff(us, axis=0).T)) < 0.05

    def test_constant_control_limit(self):
        sol = AdjointSolution(mu=0.0, sigma=0.0, t_f=2.0, zeta=np.zeros(2),
                              eta=np.array([-1.0, 0.0]), residual_norm=0.0, newton_iters=0)
        us = control_samples(sol, np.linspace(0.0, 2.0, 11))
        np.testing.assert_array_equal(us, np.tile([-1.0, 0.0], (11, 1)))

    def test_one_dim_zero_control(self):
        sol = solve(CanonicalProblem(1.0, PI))
        assert sol.t_f == 0.0
        np.testing.assert_array_equal(control_at(sol, 0.0), [0.0, 0.0])


class TestState:
    def test_initial(self, fig1_case):
        p, sol = fig1_case
        x, v = state_at(sol, p, 0.0)
        np.testing.assert_array_equal(x, [0.0, 0.0])
        np.testing.assert_allclose(v, p.v0, atol=1e-15)

    def test_terminal(self, fig1_case):
        p, sol = fig1_case
        x, v = state_at(sol, p, sol.t_f)
        assert np.linalg.norm(x) <= 1e-8
        assert np.linalg.norm(v - [-1.0, 0.0]) <= 1e-8

    def test_midpoint_against_rk4(self, fig1_case):
        p, sol = fig1_case
        t = sol.t_f / 2
        x, v = state_at(sol, p, t)
        xr, vr = _rk4_state(p, sol, t, 2000)
        assert np.linalg.norm(x - xr) <= 1e-6
        assert np.linalg.norm(v - vr) <= 1e-6


class TestForwardVerify:
    def test_zero_speed(self):
        p = CanonicalProblem(0.0, 0.0)
        pos, vel = forward_verify(p, solve(p), 10_000)
        assert pos <= 1e-6 and vel <= 1e-6

    def test_perpendicular(self):
        p = CanonicalProblem(3.0, 0.5 * PI)
        pos, vel = forward_verify(p, solve(p), 10_000)
        assert pos <= 1e-6 and vel <= 1e-6

    def test_fourth_order(self):
        p = CanonicalProblem(0.5, 0.5 * PI)
        sol = solve(p)
        coarse = max(forward_verify(p, sol, 100))
        fine = max(forward_verify(p, sol, 400))
        # coarse error well above roundoff so the ratio measures truncation
        assert coarse > 1e-11
        assert coarse / fine >= 8.0

    def test_needs_enough_steps(self, fig1_case):
        p, sol = fig1_case
        with pytest.raises(ValueError):
            forward_verify(p, sol, 10)


class TestSampleTrajectory:
    @pytest.mark.parametrize("alpha", FIG1_ALPHAS)
    def test_fig1_flags(self, alpha):
        p = CanonicalProblem(FIG1_SPEED, alpha)
        rep = sample_trajectory(solve(p), p, 256)
        assert rep.polar_angle_monotone and rep.in_angle_sector

    @pytest.mark.parametrize("speed", FIG2_SPEEDS)
    def test_fig2_flags(self, speed):
        p = CanonicalProblem(speed, FIG2_ALPHA)
        rep = sample_trajectory(solve(p), p, 256)
        assert rep.polar_angle_monotone and rep.in_angle_sector

    def test_collinear_flags(self):
        p = CanonicalProblem(0.5, 0.0)
        rep = sample_trajectory(solve(p), p, 64)
        assert rep.polar_angle_monotone and rep.in_angle_sector

    def test_report_fields(self, fig1_case):
        p, sol = fig1_case
        rep = sample_trajectory(sol, p, 50)
        ts = [s.t for s in rep.samples]
        assert len(ts) == 50 and all(a < b for a, b in zip(ts, ts[1:]))
        assert rep.terminal_position_error >= 0.0 and rep.terminal_velocity_error >= 0.0
        assert 0.0 <= rep.phi < 2 * PI and 0.0 <= rep.psi < 2 * PI
        assert rep.samples[3].speed == pytest.approx(np.linalg.norm(rep.samples[3].v))

    def test_rejects_single_sample(self, fig1_case):
        p, sol = fig1_case
        with pytest.raises(ValueError):
            sample_trajectory(sol, p, 1)


class TestAngles:
    def test_constant_control_case(self):
        phi, psi = control_angles(solve(CanonicalProblem(1.0, 0.0)))
        assert phi == pytest.approx(PI) and psi == pytest.approx(PI)

    @pytest.mark.parametrize("speed", [0.5, 0.9, 1.0, 3.0])
    def test_bounds(self, speed):
        prev = None
        for a in interior_alphas():
            sol = solve(CanonicalProblem(speed, a), previous=prev)
            prev = (sol.mu, sol.sigma)
            phi, psi = control_angles(sol)
            assert a + PI - 1e-9 <= phi <= 2 * PI
            assert a - 1e-9 <= psi <= PI + 1e-9


class TestRegimes:
    def test_unit_speed_minimum(self):
        p = CanonicalProblem(1.0, 0.0)
        reg = speed_regimes(solve(p), p, 64)
        assert [s[2] for s in reg.segments] == [DECELERATING, ACCELERATING]
        assert len(reg.extrema) == 1 and reg.extrema[0][2] == "min"
        assert reg.extrema[0][0] == pytest.approx(1.0, abs=1e-9)

    def test_one_dim_peak_at_switch(self):
        p = CanonicalProblem(0.5, 0.0)
        sol = solve(p)
        reg = speed_regimes(sol, p, 64)
        # speed then passes through zero and grows toward |v_f| = 1
        assert [s[2] for s in reg.segments] == [ACCELERATING, DECELERATING, ACCELERATING]
        t, speed, kind = reg.extrema[0]
        assert kind == "max"
        assert t == pytest.approx(sol.switch_time, abs=1e-9)
        assert speed == pytest.approx(0.5 + sol.switch_time, abs=1e-9)

    def test_boundaries_are_zeros_of_power(self, fig1_case):
        p, sol = fig1_case
        reg = speed_regimes(sol, p, 256)
        for t, _, _ in reg.extrema:
            lo, hi = max(t - 1e-9, 0.0), min(t + 1e-9, sol.t_f)
            vals = [state_at(sol, p, s)[1] @ control_at(sol, s) for s in (lo, hi)]
            assert vals[0] * vals[1] <= 0.0

    def test_initial_regime_matches_angle_rule(self):
        for speed in (0.5, 3.0):
            for a in interior_alphas()[::8]:
                p = CanonicalProblem(speed, a)
                sol = solve(p)
                phi, _ = control_angles(sol)
                reg = speed_regimes(sol, p, 128)
                assert reg.initial == initial_regime(p, phi)
                assert (reg.initial == ACCELERATING) == (phi >= a + 1.5 * PI)

    @pytest.mark.parametrize("speed", [0.1, 0.5, 0.9])
    def test_initial_regime_changes_at_most_once(self, speed):
        regimes, prev = [], None
        for a in interior_alphas():
            p = CanonicalProblem(speed, a)
            sol = solve(p, previous=prev)
            prev = (sol.mu, sol.sigma)
            regimes.append(initial_regime(p, control_angles(sol)[0]))
        changes = sum(a != b for a, b in zip(regimes, regimes[1:]))
        assert changes <= 1

    def test_no_accelerate_then_decelerate(self):
        for speed in (0.3, 0.7, 1.0, 1.3, 3.0):
            for a in interior_alphas()[::4]:
                p = CanonicalProblem(speed, a)
                phi, psi = control_angles(solve(p))
                assert not (initial_regime(p, phi) == ACCELERATING and terminal_regime(psi) == DECELERATING)


def test_one_dim_state_through_trajectory_api():
    sol = solve_one_dim(0.0)
    p = CanonicalProblem(0.0, 0.0)
    x, v = state_at(sol, p, sol.t_f)
    assert abs(x[0]) <= 1e-10 and v[0] == pytest.approx(-1.0, abs=1e-10)
