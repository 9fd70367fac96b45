import numpy as np
import pytest

from z2ladder import ParameterError, PinningLandscape, run_rw_ensemble
from z2ladder.randomwalk import sample_landscape, walk_positions


def test_free_walk_is_diffusive():
    times = [1, 4, 9, 16, 25]
    res = run_rw_ensemble(25, 0.0, 1.0, 25, 4000, seed=40, times=times)
    for i, t in enumerate(times):
        # free symmetric walk: <x^2> = t, var(x^2) ~ 2 t^2
        band = 3.0 * res.msd_stderr[i] + 0.05
        assert abs(res.msd[i] - t) < band


def test_free_walk_equilibrates_to_uniform():
    res = run_rw_ensemble(25, 0.0, 1.0, 2000, 1200, seed=41, times=[2000])
    # uniform over 25 sites: <x^2> = 52, var = 2152.8
    assert abs(res.msd[0] - 52.0) < 3.0 * res.msd_stderr[0] + 0.5
    assert np.all(np.abs(res.profiles[0] - 0.04) < 0.025)


def test_two_site_boltzmann_ratio():
    landscape = PinningLandscape(np.array([0.0, 2.0]), temperature=1.0)
    rng = np.random.default_rng(42)
    # one long trajectory; occupation ratio approaches exp(-2)
    traj = walk_positions(landscape, 400_000, rng, start=0)
    tail = traj[1000:]
    ratio = np.mean(tail == 1) / np.mean(tail == 0)
    assert ratio == pytest.approx(np.exp(-2.0), rel=0.05)


def test_detailed_balance_stationary_distribution():
    rng = np.random.default_rng(43)
    landscape = sample_landscape(5, 2.0, rng)
    target = landscape.boltzmann_weights()
    traj = walk_positions(landscape, 1_000_000, rng)
    counts = np.bincount(traj[5000:], minlength=5)
    empirical = counts / counts.sum()
    assert np.all(np.abs(empirical - target) < 0.02)


def test_strong_pinning_suppresses_transport():
    free = run_rw_ensemble(25, 0.0, 1.0, 100, 3000, seed=44, times=[100])
    pinned = run_rw_ensemble(25, 10.0, 1.0, 100, 3000, seed=44, times=[100])
    assert pinned.msd[0] < 0.2 * free.msd[0]


def test_histogram_normalized_and_deterministic():
    res = run_rw_ensemble(15, 1.0, 1.0, 50, 500, seed=45, times=[0, 10, 50])
    np.testing.assert_allclose(res.profiles.sum(axis=1), 1.0, atol=1e-12)
    res2 = run_rw_ensemble(15, 1.0, 1.0, 50, 500, seed=45, times=[0, 10, 50])
    np.testing.assert_array_equal(res.profiles, res2.profiles)
    assert res.msd[0] == 0.0  # everyone starts at the origin


def test_reflecting_boundaries_keep_walker_inside():
    landscape = PinningLandscape(np.zeros(3))
    traj = walk_positions(landscape, 10_000, np.random.default_rng(46))
    assert traj.min() >= 0 and traj.max() <= 2


@pytest.mark.parametrize("kwargs", [
    {"L": 25, "sigma": -1.0, "temperature": 1.0, "t_max": 10,
     "n_histories": 10, "seed": 0},
    {"L": 25, "sigma": 0.0, "temperature": -1.0, "t_max": 10,
     "n_histories": 10, "seed": 0},
    {"L": 25, "sigma": 0.0, "temperature": 1.0, "t_max": 10,
     "n_histories": 0, "seed": 0},
])
def test_invalid_parameters(kwargs):
    with pytest.raises(ParameterError):
        run_rw_ensemble(**kwargs)
