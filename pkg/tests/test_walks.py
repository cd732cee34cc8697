import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from levylab.medium import Deterministic, MediumWindow, Pareto
from levylab.rng import substream
from levylab.walks import (DriftedZeta, LazySymmetric,
                           SimpleSymmetric, SymmetricZeta, WalkPath, flight,
                           increment_law_from_dict, initial_steps, interpolate, position_at,
                           sample_walk, simulate_gas)


def g(*key):
    return substream(777, *key)


@pytest.fixture
def hand_traj():
    return interpolate(np.array([0.0, 5.0, -3.5]))


def test_simple_steps_are_unit():
    w = sample_walk(SimpleSymmetric(), 10**4, g(1))
    assert w.steps[0] == 0
    assert np.all(np.abs(np.diff(w.steps)) == 1)


def test_simple_mean_zero():
    end = SimpleSymmetric().sample(g(2), (10**4, 10**4)).sum(axis=1) / 100.0
    assert abs(end.mean()) < 0.05


def test_drifted_zeta_lln():
    law = DriftedZeta(1.5, 0.4)
    ends = [sample_walk(law, 10**5, g(3, i)).steps[-1] / 10**5 for i in range(100)]
    assert abs(np.mean(ends) - 0.4) < 0.02


def test_sample_walk_needs_a_step():
    with pytest.raises(ValueError):
        sample_walk(SimpleSymmetric(), 0, g(4))


def test_walk_must_start_at_zero():
    with pytest.raises(ValueError):
        WalkPath(np.array([1, 2]))


def test_simple_cached_moments():
    law = SimpleSymmetric()
    assert (law.drift, law.second_moment, law.abs_moment) == (0.0, 1.0, 1.0)
    assert math.isinf(law.moment_ceiling)


def test_lazy_moments_match_samples():
    law = LazySymmetric(0.3)
    x = law.sample(g(5), 10**6)
    assert abs(np.mean(x == 0) - 0.3) < 0.002
    assert abs(np.mean(x**2) - law.second_moment) < 0.003


def test_symmetric_zeta_pmf_and_moments():
    law = SymmetricZeta(2.5)
    x = law.sample(g(6), 10**6)
    for j in (1, 2, 3):
        assert abs(np.mean(np.abs(x) == j) - law.pmf_abs(j)) < 0.002
    assert abs(np.mean(x > 0) - 0.5) < 0.002
    assert abs(np.mean(np.abs(x)) - law.abs_moment) < 0.01
    assert law.norm == pytest.approx(special.zeta(3.5), rel=1e-14)


def test_symmetric_zeta_tail_beyond_table():
    # the guide table covers |j| <= 2**16; the rejection sampler takes over above
    law = SymmetricZeta(0.8)
    x = np.abs(law.sample(g(7), 2 * 10**6))
    big = 1 << 16
    expected = sum(law.pmf_abs(np.arange(1, big + 1)))
    assert abs(np.mean(x > big) - (1 - expected)) < 4 * math.sqrt((1 - expected) / len(x))
    # tail beyond the table follows j**-beta
    tail = x[x > big]
    ratio = np.mean(tail > 4 * big) / np.mean(tail > big)
    assert abs(ratio - 4**-0.8) < 0.05


def test_symmetric_zeta_is_symmetric_and_unimodal():
    law = SymmetricZeta(1.5)
    assert law.symmetric and law.unimodal
    p = law.pmf_abs(np.arange(1, 100))
    assert np.all(np.diff(p) < 0)


def test_drifted_zeta_abs_moment():
    law = DriftedZeta(2.5, 1.3)
    x = law.sample(g(8), 2 * 10**6)
    assert abs(np.mean(np.abs(x)) - law.abs_moment) < 0.01
    assert abs(np.mean(x) - 1.3) < 0.01


def test_drifted_zeta_needs_finite_mean():
    with pytest.raises(ValueError):
        DriftedZeta(0.9, 0.5)


def test_increment_law_round_trip():
    for law in (SimpleSymmetric(), LazySymmetric(0.2), SymmetricZeta(1.5), DriftedZeta(3, 0.4)):
        assert increment_law_from_dict(law.params()) == law
    with pytest.raises(ValueError):
        increment_law_from_dict({"kind": "cauchy"})


def test_flight_hand_example():
    w = MediumWindow.from_gaps([2.0, 3.0], [1.5, 1.0, 1.0])
    fl = flight(w, WalkPath(np.array([0, 2, -3])))
    assert np.array_equal(fl.positions, [0.0, 5.0, -3.5])


def test_flight_constant_path():
    w = MediumWindow(Pareto(1.5), 1)
    fl = flight(w, WalkPath(np.zeros(5, dtype=np.int64)))
    assert np.all(fl.positions == 0)


def test_flight_deterministic_medium():
    w = MediumWindow(Deterministic(2.5), 2)
    path = sample_walk(SymmetricZeta(1.5), 1000, g(9))
    assert np.array_equal(flight(w, path).positions, 2.5 * path.steps)


def test_interpolate_hand_example(hand_traj):
    assert np.array_equal(hand_traj.collision_times, [0.0, 5.0, 13.5])


def test_interpolate_constant():
    assert np.all(interpolate(np.zeros(4)).collision_times == 0)


def test_interpolate_unit_gaps():
    w = MediumWindow(Deterministic(1.0), 3)
    traj = interpolate(flight(w, sample_walk(SimpleSymmetric(), 500, g(10))))
    assert np.array_equal(traj.collision_times, np.arange(501.0))


def test_position_at_hand_values(hand_traj):
    assert position_at(hand_traj, 3.0) == 3.0
    assert position_at(hand_traj, 7.0) == 3.0
    assert position_at(hand_traj, 13.5) == -3.5


def test_position_at_beyond_horizon(hand_traj):
    with pytest.raises(ValueError):
        position_at(hand_traj, 13.6)
    with pytest.raises(ValueError):
        position_at(hand_traj, -1.0)


def test_zero_length_segments():
    traj = interpolate(np.array([0.0, 2.0, 2.0, 0.0]))
    assert np.array_equal(traj.collision_times, [0.0, 2.0, 2.0, 4.0])
    assert position_at(traj, 2.0) == 2.0
    assert position_at(traj, 3.0) == 1.0


def _random_traj(seed, law=SimpleSymmetric(), n=2000):
    w = MediumWindow(Pareto(1.5), seed)
    return interpolate(flight(w, sample_walk(law, n, g(11, seed))))


def test_endpoints_exact():
    traj = _random_traj(4)
    for n in range(0, len(traj.positions), 37):
        assert position_at(traj, traj.collision_times[n]) == traj.positions[n]


def test_lipschitz_on_random_pairs():
    traj = _random_traj(5, LazySymmetric(0.3))
    rng = g(12)
    t = rng.uniform(0, traj.horizon, (10**4, 2))
    x = np.array([[position_at(traj, a), position_at(traj, b)] for a, b in t])
    assert np.all(np.abs(x[:, 0] - x[:, 1]) <= np.abs(t[:, 0] - t[:, 1]) + 1e-9)


def test_unit_speed_invariant():
    traj = _random_traj(6)
    assert np.allclose(np.diff(traj.collision_times), np.abs(np.diff(traj.positions)))


def test_trajectory_csv(tmp_path):
    w = MediumWindow.from_gaps([2.0, 3.0], [1.5, 1.0, 1.0])
    fl = flight(w, WalkPath(np.array([0, 2, -3])))
    interpolate(fl).to_csv(tmp_path / "t.csv")
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines == ["n,S,Y,T", "0,0,0.0,0.0", "1,2,5.0,5.0", "2,-3,-3.5,13.5"]


def test_initial_steps():
    assert initial_steps(3.0, 300.0) == 200
    assert initial_steps(math.inf, 300.0) == 600


def test_simulate_gas_matches_position_at():
    law = SimpleSymmetric()
    w = MediumWindow(Pareto(1.5), 7)
    times = np.array([0.0, 1.0, 50.0, 999.5, 4000.0])
    x, seg, xi = simulate_gas(w, law, times, g(13))
    traj = interpolate(flight(w, WalkPath(np.concatenate([[0], np.cumsum(xi)]))))
    assert traj.horizon >= times[-1]
    for t, v in zip(times, x):
        assert v == position_at(traj, t)
    # seg is the first n with T_n >= t (n >= 1)
    for t, m in zip(times[1:], seg[1:]):
        assert traj.collision_times[m] >= t > traj.collision_times[m - 1]


def test_simulate_gas_doubles_until_horizon():
    # infinite-mean gaps with a deliberately tiny starting guess still reach t
    w = MediumWindow(Pareto(0.5), 8)
    x, seg, xi = simulate_gas(w, SimpleSymmetric(), np.array([10**5]), g(14))
    assert abs(x[0]) <= 10**5 and seg[0] > 0


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32), t1=st.floats(0, 1), t2=st.floats(0, 1))
def test_lipschitz_property(seed, t1, t2):
    traj = _random_traj(seed, SymmetricZeta(1.5), 200)
    a, b = t1 * traj.horizon, t2 * traj.horizon
    assert abs(position_at(traj, a) - position_at(traj, b)) <= abs(a - b) * (1 + 1e-12) + 1e-9
