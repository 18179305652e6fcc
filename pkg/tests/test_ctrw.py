import math

import numpy as np
import pytest

from fracwalk.asymptotics import ScalingPair, law_constants, scaling_tau
from fracwalk.ctrw import (
    LatticeEvolution,
    Trajectory,
    WalkConfig,
    ensemble_at_times,
    ensemble_positions,
    evolve_lattice,
    position_at,
    simulate_walk,
    trajectory_csv,
)
from fracwalk.laws import (
    continuous_power_jump,
    continuous_power_wait,
    discrete_power_wait,
    discrete_wait_pmf,
    exponential_wait,
    gaussian_jump,
    lattice_jump_pmf,
    lattice_power_jump,
    sample_jump,
    sample_wait,
)

UNIT = ScalingPair(h=1.0, tau=1.0)


def _config(jump, wait, h, t_max=1.0, n=100, seed=20240901):
    lc = law_constants(jump, wait)
    pair = scaling_tau(h, lc, jump.alpha, wait.beta)
    return WalkConfig(jump, wait, pair, t_max=t_max, n_walkers=n, seed=seed)


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            WalkConfig(gaussian_jump(), exponential_wait(), UNIT, 0.0, 1, 1)
        with pytest.raises(ValueError):
            WalkConfig(gaussian_jump(), exponential_wait(), UNIT, 1.0, 0, 1)
        with pytest.raises(ValueError):
            WalkConfig(gaussian_jump(), exponential_wait(), UNIT, 1.0, 1, -3)
        with pytest.raises(ValueError):
            ScalingPair(h=0.0, tau=1.0)


class TestFixedStreamComposition:
    def test_two_step_walk(self):
        # waits and jumps composed from the closed-form quantile maps with the
        # stream u = (0.5, 0.75, 0.5, 0.25), alpha=1, beta=0.5, h=tau=1
        jump = continuous_power_jump(1.0)
        wait = continuous_power_wait(0.5)
        t1 = sample_wait(wait, 0.5)
        s1 = sample_jump(jump, 0.75)
        t2 = t1 + sample_wait(wait, 0.5)
        s2 = s1 + sample_jump(jump, 0.25)
        assert t1 == pytest.approx(1.0 / math.pi, rel=1e-13)
        assert s1 == pytest.approx(1.0, abs=1e-13)
        assert t2 == pytest.approx(2.0 / math.pi, rel=1e-13)
        assert s2 == pytest.approx(0.0, abs=1e-13)
        traj = Trajectory(np.array([t1, t2]), np.array([s1, s2]), t_max=1.0)
        # 1/pi <= 0.5 < 2/pi so the walker still sits at S_1
        assert position_at(traj, 0.5) == pytest.approx(1.0)


class TestTrajectory:
    def test_empty_horizon(self):
        # a horizon below the first waiting time leaves the walker at home
        cfg = _config(gaussian_jump(), exponential_wait(), h=1.0, t_max=1e-9, n=4)
        traj = simulate_walk(cfg, 0)
        assert traj.jump_times.size == 0
        for t in [0.0, 5e-10, 1e-9]:
            assert position_at(traj, t) == 0.0

    def test_position_conventions(self):
        traj = Trajectory(np.array([0.25, 0.75]), np.array([1.5, -0.5]), t_max=1.0)
        assert position_at(traj, 0.0) == 0.0
        assert position_at(traj, 0.2499999) == 0.0
        assert position_at(traj, 0.25) == 1.5  # jump instants belong to the new level
        assert position_at(traj, 0.74) == 1.5
        assert position_at(traj, 1.0) == -0.5
        with pytest.raises(ValueError):
            position_at(traj, 1.5)
        with pytest.raises(ValueError):
            position_at(traj, -0.1)

    def test_monotone_jump_times(self):
        cfg = _config(continuous_power_jump(1.5), continuous_power_wait(0.5), h=0.3)
        for wid in range(5):
            traj = simulate_walk(cfg, wid)
            assert np.all(np.diff(traj.jump_times) > 0.0)
            if traj.jump_times.size:
                assert traj.jump_times[0] > 0.0
                assert traj.jump_times[-1] <= cfg.t_max

    def test_walker_id_range(self):
        cfg = _config(gaussian_jump(), exponential_wait(), h=0.5, n=3)
        with pytest.raises(ValueError):
            simulate_walk(cfg, 3)

    def test_csv_staircase(self):
        traj = Trajectory(np.array([0.25]), np.array([2.0]), t_max=1.0)
        rows = list(trajectory_csv(traj))
        assert rows[0] == "t,x"
        assert rows[1:] == ["0.0,0.0", "0.25,0.0", "0.25,2.0", "1.0,2.0"]
        empty = Trajectory(np.array([]), np.array([]), t_max=0.5)
        assert list(trajectory_csv(empty))[1:] == ["0.0,0.0", "0.5,0.0"]


class TestEnsemble:
    def test_all_zero_at_time_zero(self):
        cfg = _config(gaussian_jump(), exponential_wait(), h=0.5, n=50)
        assert np.all(ensemble_positions(cfg, 0.0) == 0.0)

    def test_single_walker_consistency(self):
        cfg = _config(continuous_power_jump(1.2), exponential_wait(), h=0.4, n=1)
        ens = ensemble_positions(cfg, 0.7)
        assert ens.shape == (1,)
        assert ens[0] == position_at(simulate_walk(cfg, 0), 0.7)

    def test_matches_isolated_walkers(self):
        cfg = _config(continuous_power_jump(1.5), continuous_power_wait(0.5), h=0.2, n=40)
        ens = ensemble_at_times(cfg, [0.3, 1.0])
        for wid in range(cfg.n_walkers):
            traj = simulate_walk(cfg, wid)
            assert position_at(traj, 0.3) == ens[wid, 0]
            assert position_at(traj, 1.0) == ens[wid, 1]

    def test_thread_and_rerun_determinism(self):
        cfg = _config(gaussian_jump(), exponential_wait(), h=0.2, n=333)
        base = ensemble_positions(cfg, 1.0)
        assert np.array_equal(base, ensemble_positions(cfg, 1.0))
        for threads in [2, 3, 7]:
            assert np.array_equal(base, ensemble_positions(cfg, 1.0, threads=threads))

    def test_observation_time_order_irrelevant(self):
        cfg = _config(gaussian_jump(), exponential_wait(), h=0.3, n=64)
        a = ensemble_at_times(cfg, [1.0, 0.2])
        b = ensemble_at_times(cfg, [0.2, 1.0])
        assert np.array_equal(a[:, 0], b[:, 1])
        assert np.array_equal(a[:, 1], b[:, 0])

    def test_times_outside_horizon(self):
        cfg = _config(gaussian_jump(), exponential_wait(), h=0.3, n=4)
        with pytest.raises(ValueError):
            ensemble_positions(cfg, 1.5)

    def test_poisson_jump_counts(self):
        # beta = 1: renewal counts at t are Poisson(t/tau)
        cfg = WalkConfig(
            gaussian_jump(), exponential_wait(), UNIT, t_max=10.0,
            n_walkers=2000, seed=424242,
        )
        counts = [simulate_walk(cfg, w).jump_times.size for w in range(cfg.n_walkers)]
        mean = float(np.mean(counts))
        sd_mean = math.sqrt(10.0 / cfg.n_walkers)
        assert abs(mean - 10.0) < 4.0 * sd_mean

    def test_variance_scaling_consistency(self):
        # halving h (tau refit) keeps the alpha=2 variance at fixed t
        jump, wait = gaussian_jump(), exponential_wait()
        va, vb = [], []
        for h, acc in [(0.2, va), (0.1, vb)]:
            cfg = _config(jump, wait, h=h, n=20000, seed=5150)
            acc.append(float(np.var(ensemble_positions(cfg, 1.0), ddof=1)))
        # both estimate 2 t; allow joint sampling noise
        assert va[0] == pytest.approx(vb[0], rel=0.1)
        assert va[0] == pytest.approx(2.0, rel=0.1)


class TestLattice:
    def test_initial_condition(self):
        ev = evolve_lattice(1.5, 0.5, K=8, T=1)
        assert ev.probabilities[0, ev.support] == 1.0
        assert np.sum(ev.probabilities[0]) == 1.0
        assert ev.leakage[0] == 0.0

    def test_one_step_unrolled(self):
        ev = evolve_lattice(1.5, 0.5, K=16, T=1)
        c1 = discrete_wait_pmf(0.5, 1)
        sites = ev.sites
        p1 = ev.pmf(1)
        assert p1[sites == 0][0] == pytest.approx(1.0 - c1, rel=1e-12)
        assert 1.0 - c1 == pytest.approx(0.6172066160005591, rel=1e-9)
        for k in [1, -1, 5, -14]:
            expect = c1 * lattice_jump_pmf(1.5, k)
            assert p1[sites == k][0] == pytest.approx(expect, rel=1e-12)

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    @pytest.mark.parametrize("alpha,beta", [(1.5, 0.5), (0.8, 0.75)])
    def test_mass_conservation(self, alpha, beta):
        ev = evolve_lattice(alpha, beta, K=32, T=6)
        for t in range(7):
            total = float(np.sum(ev.probabilities[t])) + ev.leakage[t]
            assert total == pytest.approx(1.0, abs=1e-12)
        assert np.all(ev.probabilities >= 0.0)
        assert np.all(np.diff(ev.leakage) >= 0.0)

    def test_leakage_warning(self):
        with pytest.warns(RuntimeWarning):
            ev = evolve_lattice(0.5, 0.5, K=4, T=5)
        assert ev.warning is not None

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_symmetry(self):
        ev = evolve_lattice(1.2, 0.6, K=24, T=5)
        for t in range(6):
            np.testing.assert_allclose(
                ev.probabilities[t], ev.probabilities[t][::-1], atol=1e-15
            )

    def test_argument_validation(self):
        with pytest.raises(ValueError):
            evolve_lattice(2.0, 0.5, K=4, T=2)
        with pytest.raises(ValueError):
            evolve_lattice(1.5, 1.0, K=4, T=2)
        with pytest.raises(ValueError):
            evolve_lattice(1.5, 0.5, K=0, T=2)

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_monte_carlo_agreement_small(self):
        # scaled-down version of the lattice-vs-walkers oracle
        alpha, beta = 1.5, 0.5
        ev = evolve_lattice(alpha, beta, K=64, T=3)
        cfg = WalkConfig(
            lattice_power_jump(alpha), discrete_power_wait(beta), UNIT,
            t_max=3.0, n_walkers=20000, seed=1234567,
        )
        xs = ensemble_positions(cfg, 3.0)
        sites = ev.sites
        pmf = ev.pmf(3)
        n = cfg.n_walkers
        checked = 0
        for k, p in zip(sites, pmf):
            if p < 5e-3:
                continue
            emp = float(np.mean(xs == k))
            band = 3.0 * math.sqrt(p * (1.0 - p) / n)
            assert abs(emp - p) < band + 1e-12, (k, emp, p)
            checked += 1
        assert checked >= 5
