import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from levylab.medium import (Deterministic, MediumWindow, Pareto, ShiftedExponential,
                            gap_law_from_dict, gap_tail, rescaled_medium, target)
from levylab.rng import substream


def test_origin_is_zero():
    assert target(MediumWindow(Pareto(1.5), 1), 0) == 0.0


def test_deterministic_hand_sums():
    w = MediumWindow(Deterministic(2.0), 3)
    assert target(w, 3) == 6.0
    assert target(w, -2) == -4.0


def test_append_only():
    w = MediumWindow(Pareto(1.5), 4)
    five = [target(w, k) for k in range(6)]
    assert target(w, 3) == five[3]
    w.ensure(-5000, 5000)
    assert [target(w, k) for k in range(6)] == five


def test_values_independent_of_extension_order():
    a = MediumWindow(Pareto(1.5), (7, 1))
    b = MediumWindow(Pareto(1.5), (7, 1))
    a.ensure(-3000, 3000)
    for k in (10, 1500, 2047, 2048, 3000):
        b.target(k)
    ks = np.arange(-3000, 3001)
    assert np.array_equal(a.targets(ks), b.targets(ks))


def test_negative_side_convention():
    w = MediumWindow.from_gaps([2.0, 3.0], [1.5, 1.0, 1.0])
    # zeta_0 = 1.5 is the gap between omega_-1 and omega_0
    assert w.target(-1) == -1.5
    assert w.target(-3) == -3.5
    assert w.target(2) == 5.0
    with pytest.raises(IndexError):
        w.target(3)


def test_gap_tail_examples():
    assert gap_tail(Pareto(1.5, 1), 1) == 1.0
    assert gap_tail(Pareto(1.5, 1), 4) == pytest.approx(0.125, rel=1e-15)
    assert gap_tail(Deterministic(2), 3) == 0.0


def test_pareto_mean():
    assert Pareto(1.5, 1).mean == 3.0
    assert Pareto(1.5, 2).mean == 6.0
    assert math.isinf(Pareto(1.0).mean)
    assert math.isinf(Pareto(0.5).mean)


def test_law_from_dict_round_trip():
    for law in (Pareto(1.5, 2.0), ShiftedExponential(2.0, 0.5), Deterministic(3.0)):
        assert gap_law_from_dict(law.params()) == law
    with pytest.raises(ValueError):
        gap_law_from_dict({"kind": "cauchy"})


def test_rescaled_medium_zero():
    w = MediumWindow(Pareto(1.5), 5)
    for mode in ("fluid", "raw", "centered"):
        assert rescaled_medium(w, 100, 0.0, mode) == 0.0


def test_rescaled_medium_fluid_hand_value():
    w = MediumWindow(Deterministic(2.0), 6)
    assert rescaled_medium(w, 100, 0.5, "fluid") == 1.0


def test_rescaled_medium_fluid_lln():
    w = MediumWindow(Pareto(1.5), 8)
    assert abs(rescaled_medium(w, 10**5, 1.0, "fluid") - 3.0) < 0.15


def test_rescaled_medium_floor_and_ceiling():
    w = MediumWindow(Deterministic(1.0), 9)
    assert rescaled_medium(w, 10, 0.35, "fluid") == 0.3
    assert rescaled_medium(w, 10, -0.35, "fluid") == -0.3


def test_rescaled_medium_centered_deterministic_is_zero():
    w = MediumWindow(Deterministic(2.0), 10)
    assert rescaled_medium(w, 100, 0.7, "centered") == 0.0
    assert rescaled_medium(w, 100, -0.7, "centered") == 0.0


def test_centered_mode_needs_finite_mean():
    with pytest.raises(ValueError):
        rescaled_medium(MediumWindow(Pareto(0.5), 11), 100, 0.5, "centered")


def _slln_hits(eps=0.05):
    hits = 0
    for seed in range(100):
        w = MediumWindow(Pareto(1.5), (12, seed))
        hits += abs(w.target(10**6) / 10**6 - 3.0) < eps
    return hits


@pytest.mark.xfail(strict=True, reason="a single gap above 5e4 occurs in ~10% of media, so "
                   "about 88 of 100 media fall within 0.05, not 95")
def test_slln_in_95_of_100_media():
    assert _slln_hits() >= 95


def test_slln_rate_matches_direct_sums():
    # 3000 direct sums of 10**6 Pareto(1.5) gaps land within 0.05 of 3 with
    # frequency 0.877; 99% binomial band for 100 media
    assert 79 <= _slln_hits() <= 96
    assert _slln_hits(0.5) >= 99


@pytest.mark.parametrize("key,law", [(1, Pareto(1.5)), (2, ShiftedExponential(1.0, 1.0))])
def test_empirical_tail_within_dkw_band(key, law):
    x = np.sort(law.sample(substream(13, key), 10**6))
    n = len(x)
    tail = law.tail(x)
    # the empirical tail jumps from 1 - (i-1)/n to 1 - i/n at the i-th order statistic
    below = np.abs(1.0 - np.arange(1, n + 1) / n - tail)
    above = np.abs(1.0 - np.arange(0, n) / n - tail)
    eps = math.sqrt(math.log(2 / 0.01) / (2 * n))
    assert max(below.max(), above.max()) < eps


def test_csv_export(tmp_path):
    w = MediumWindow(Deterministic(2.0), 14)
    w.to_csv(tmp_path / "m.csv", -2, 2)
    lines = (tmp_path / "m.csv").read_text().splitlines()
    assert lines[0] == "k,omega"
    assert lines[1] == "-2,-4.0" and lines[-1] == "2,4.0"


def test_token_identifies_realization():
    a = MediumWindow(Pareto(1.5), (1, 2))
    assert a.token == MediumWindow(Pareto(1.5), (1, 2)).token
    assert a.token != MediumWindow(Pareto(1.5), (1, 3)).token


@settings(max_examples=30, deadline=None)
@given(alpha=st.floats(0.3, 2.5), seed=st.integers(0, 2**40),
       lo=st.integers(-3000, 0), hi=st.integers(0, 3000))
def test_strictly_increasing(alpha, seed, lo, hi):
    w = MediumWindow(Pareto(alpha), seed)
    omega = w.targets(np.arange(lo, hi + 1))
    assert np.all(np.diff(omega) > 0)
    assert omega[-lo] == 0.0
