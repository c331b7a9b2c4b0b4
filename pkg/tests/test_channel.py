import math

import numpy as np
import pytest

from gaussesd import (
    ChannelParams,
    CovarianceMatrix,
    GaussianParams,
    InvalidGrid,
    Trajectory,
    cm_from_params,
    count_sign_changes,
    evolve,
    evolve_cm,
    evolve_symmetric,
    sample_trajectory,
    simon_criterion,
    symmetric_initial_moments,
)
from conftest import MOMENT_FIELDS, moment_diff


def random_setup(rng):
    p = GaussianParams(
        z1=rng.uniform(-1.5, 1.5),
        z2=rng.uniform(-1.5, 1.5),
        r=rng.uniform(0.0, 1.5),
        nu1=rng.uniform(0.0, 2.0),
        nu2=rng.uniform(0.0, 2.0),
    )
    ch = ChannelParams(
        gamma1=rng.uniform(0.05, 0.6),
        gamma2=rng.uniform(0.05, 0.6),
        nb1=rng.uniform(0.0, 1.0),
        nb2=rng.uniform(0.0, 1.0),
    )
    return p, ch


class TestEvolve:
    def test_t_zero_matches_initial_moments(self, rng):
        for _ in range(50):
            p, ch = random_setup(rng)
            assert evolve(p, ch, 0.0) == cm_from_params(p)

    def test_long_time_limit_is_bath(self, rng):
        for _ in range(20):
            p, ch = random_setup(rng)
            late = evolve(p, ch, 400.0)
            assert late.n1 == pytest.approx(ch.nb1, abs=1e-10)
            assert late.n2 == pytest.approx(ch.nb2, abs=1e-10)
            for f in ("m1", "m2", "ms", "mc"):
                assert abs(getattr(late, f)) < 1e-10

    def test_tmsv_zero_temperature_decays_to_vacuum(self):
        p = GaussianParams.tmsv(1.0)
        ch = ChannelParams.symmetric(0.1)
        ts = np.linspace(0.0, 200.0, 400)
        s = [simon_criterion(evolve(p, ch, t)) for t in ts]
        assert all(v <= 0.0 for v in s)
        assert s[-1] > -1e-3  # asymptotic approach to the separable boundary

    def test_matches_moment_recursion(self, rng):
        for _ in range(50):
            p, ch = random_setup(rng)
            t = rng.uniform(0.0, 20.0)
            direct = evolve(p, ch, t)
            recursed = evolve_cm(cm_from_params(p), ch, t)
            assert moment_diff(direct, recursed) < 1e-12 * (1 + abs(direct.n1) + abs(direct.n2))

    def test_semigroup_property(self, rng):
        for _ in range(50):
            p, ch = random_setup(rng)
            t1, t2 = rng.uniform(0.0, 8.0, 2)
            one_shot = evolve(p, ch, t1 + t2)
            two_step = evolve_cm(evolve(p, ch, t1), ch, t2)
            assert moment_diff(one_shot, two_step) < 1e-9

    def test_thermal_state_is_fixed_point(self):
        ch = ChannelParams(0.3, 0.2, 0.7, 0.4)
        fixed = CovarianceMatrix(0.7, 0.4, 0.0, 0.0, 0.0, 0.0)
        for t in (0.1, 1.0, 12.0):
            assert evolve_cm(fixed, ch, t) == fixed

    def test_correlations_strictly_decrease(self):
        p = GaussianParams(0.6, -0.2, 0.9, 0.1, 0.0)
        ch = ChannelParams(0.2, 0.35, 0.4, 0.1)
        ts = np.linspace(0.0, 10.0, 80)
        mc = [abs(evolve(p, ch, t).mc) for t in ts]
        ms = [abs(evolve(p, ch, t).ms) for t in ts]
        assert all(b < a for a, b in zip(mc, mc[1:]))
        assert all(b < a for a, b in zip(ms, ms[1:]))

    def test_states_remain_physical(self):
        p = GaussianParams.tmsv(1.0)
        for ch in (
            ChannelParams(0.1, 0.5, 0.2, 0.2),
            ChannelParams(0.1, 0.1, 1.0, 0.0),
            ChannelParams(0.5, 0.5, 0.0, 0.0),
        ):
            for cm in sample_trajectory(p, ch, 40.0, 200).states:
                assert cm.is_physical(tol=1e-10)

    def test_rejects_negative_time(self):
        p, ch = GaussianParams.tmsv(0.5), ChannelParams.symmetric(0.1)
        with pytest.raises(ValueError):
            evolve(p, ch, -0.1)


class TestSymmetricCase:
    def test_identity_at_t_zero(self):
        n0, m0 = symmetric_initial_moments(1.0)
        assert evolve_symmetric(n0, m0, 0.1, 0.0) == (n0, m0)

    def test_initial_moments_tmsv(self):
        n0, m0 = symmetric_initial_moments(1.0, 0.0)
        assert n0 == pytest.approx(math.sinh(1.0) ** 2, abs=1e-15)
        assert m0 == pytest.approx(0.5 * math.sinh(2.0), abs=1e-15)

    def test_half_life_scaling(self):
        n0, m0 = symmetric_initial_moments(1.0)
        gamma = 0.25
        t_half = 0.5 * math.log(2.0) / gamma
        n, m = evolve_symmetric(n0, m0, gamma, t_half)
        assert n == pytest.approx(n0 / 2, rel=1e-14)
        assert m == pytest.approx(m0 / 2, rel=1e-14)

    @pytest.mark.parametrize("nu0", [0.0, 0.3])
    def test_agrees_with_general_evolution(self, nu0):
        r0, gamma = 0.8, 0.15
        p = GaussianParams(0.0, 0.0, r0, nu0, nu0)
        ch = ChannelParams.symmetric(gamma)
        n0, m0 = symmetric_initial_moments(r0, nu0)
        for t in np.linspace(0.0, 25.0, 100):
            n, m = evolve_symmetric(n0, m0, gamma, t)
            cm = evolve(p, ch, t)
            assert abs(cm.n1 - n) < 1e-12
            assert abs(cm.n2 - n) < 1e-12
            assert abs(cm.mc - m) < 1e-12
            assert abs(cm.m1) == 0.0 and abs(cm.ms) == 0.0


class TestTrajectory:
    def test_grid_includes_endpoints(self):
        traj = sample_trajectory(GaussianParams.tmsv(1.0), ChannelParams.symmetric(0.1), 30.0, 301)
        assert traj.times[0] == 0.0
        assert traj.times[-1] == 30.0
        assert len(traj.times) == len(traj.states) == len(traj.simon) == 301

    def test_heated_equal_channels_cross_once(self):
        # r0 = 1, gamma = 0.1 both, nb = 0.2 both: one crossing, minus to plus
        traj = sample_trajectory(
            GaussianParams.tmsv(1.0), ChannelParams.symmetric(0.1, 0.2), 30.0, 300
        )
        assert count_sign_changes(traj.simon) == 1
        assert traj.simon[0] < 0 < traj.simon[-1]

    def test_one_mode_strongly_squeezed_crosses(self):
        # z1 = 2, z2 = 0, zero temperature: finite-time separation
        traj = sample_trajectory(
            GaussianParams(2.0, 0.0, 1.0), ChannelParams.symmetric(0.1), 30.0, 400
        )
        assert count_sign_changes(traj.simon) == 1

    def test_asymmetric_zero_temperature_never_crosses(self):
        # strictly negative while |S| stays above float cancellation noise ...
        traj = sample_trajectory(
            GaussianParams.tmsv(1.0), ChannelParams(0.1, 0.5), 25.0, 250
        )
        assert all(s < 0 for s in traj.simon)
        # ... and no sign change appears over a much longer window
        long = sample_trajectory(
            GaussianParams.tmsv(1.0), ChannelParams(0.1, 0.5), 50.0, 500
        )
        assert count_sign_changes(long.simon) == 0
        assert not any(s > 1e-12 for s in long.simon)

    def test_invalid_grids(self):
        p, ch = GaussianParams.tmsv(0.5), ChannelParams.symmetric(0.1)
        with pytest.raises(InvalidGrid):
            sample_trajectory(p, ch, 0.0, 10)
        with pytest.raises(InvalidGrid):
            sample_trajectory(p, ch, 10.0, 1)

    def test_trajectory_validates_lengths(self):
        cm = CovarianceMatrix(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        with pytest.raises(InvalidGrid):
            Trajectory(times=(0.0, 1.0), states=(cm,), simon=(0.0,))
        with pytest.raises(InvalidGrid):
            Trajectory(times=(0.0, 0.0), states=(cm, cm), simon=(0.0, 0.0))


class TestSignCounting:
    def test_plain_crossing(self):
        assert count_sign_changes([-1.0, -0.5, 0.2, 0.8]) == 1

    def test_flicker_around_zero_ignored(self):
        values = [-1.0, -1e-4, -1e-15, 0.0, 1e-16, -1e-15, 1e-13, -1e-4]
        assert count_sign_changes(values) == 0

    def test_down_and_up(self):
        assert count_sign_changes([1.0, -1.0, 1.0]) == 2


class TestChannelParams:
    def test_rejects_nonpositive_rates(self):
        with pytest.raises(ValueError):
            ChannelParams(0.0, 0.1)
        with pytest.raises(ValueError):
            ChannelParams(0.1, 0.1, -0.2, 0.0)

    def test_symmetric_constructor(self):
        ch = ChannelParams.symmetric(0.3, 0.5)
        assert (ch.gamma1, ch.gamma2, ch.nb1, ch.nb2) == (0.3, 0.3, 0.5, 0.5)
