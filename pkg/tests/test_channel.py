import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from uavdeploy.channel import (
    LOS,
    NLOS,
    ChannelParams,
    avg_received_power,
    elevation_angle_deg,
    los_probability,
    nlos_probability,
    path_gain,
)

CH = ChannelParams()


@pytest.mark.parametrize("r, h, deg", [(100, 100, 90.0), (200, 100, 30.0), (141.4214, 100, 45.0)])
def test_elevation_angle(r, h, deg):
    assert elevation_angle_deg(r, h) == pytest.approx(deg, abs=1e-3)


def test_elevation_angle_rejects_short_links():
    with pytest.raises(ValueError):
        elevation_angle_deg(99.0, 100.0)


def _los_oracle(theta, b=0.136, c=11.95):
    return 1.0 / (1.0 + c * math.exp(-b * (theta - c)))


def test_los_probability_at_c():
    assert los_probability(11.95, CH) == pytest.approx(1 / 12.95, abs=1e-6)
    assert 1 / 12.95 == pytest.approx(0.077220, abs=1e-6)


def test_los_probability_overhead():
    assert _los_oracle(90.0) == pytest.approx(0.99971, abs=1e-4)
    assert los_probability(90.0, CH) == pytest.approx(_los_oracle(90.0), rel=1e-12)


def test_los_probability_45deg():
    expected = _los_oracle(45.0)
    assert expected == pytest.approx(0.89, abs=0.01)
    assert los_probability(45.0, CH) == pytest.approx(expected, rel=1e-12)


def test_path_gain_free_space_constant():
    p = ChannelParams(mu_los_db=0.0)
    const = (3e8 / (4 * math.pi * 2e9)) ** 2
    assert const == pytest.approx(1.4249e-4, rel=1e-4)
    assert path_gain(1.0, LOS, p) == pytest.approx(const, rel=1e-12)
    assert path_gain(100.0, LOS, p) == pytest.approx(const * 1e-4, rel=1e-12)
    assert path_gain(100.0, LOS, p) == pytest.approx(1.4249e-8, abs=1e-12)


def test_path_gain_vanishes_with_infinite_attenuation():
    p = ChannelParams(mu_nlos_db=math.inf)
    assert path_gain(50.0, NLOS, p) == 0.0


def test_path_gain_attenuation_in_db():
    p = ChannelParams(mu_los_db=10.0)
    assert path_gain(10.0, LOS, p) == pytest.approx(ChannelParams(mu_los_db=0.0).free_space_const / 10 / 100)


@given(st.floats(1.0, 1e4), st.sampled_from([LOS, NLOS]))
def test_path_gain_power_law(r, cond):
    alpha = CH.alpha_los if cond == LOS else CH.alpha_nlos
    ratio = path_gain(2 * r, cond, CH) / path_gain(r, cond, CH)
    assert ratio == pytest.approx(2.0 ** -alpha, rel=1e-12)


def test_avg_power_overhead_composes_oracles():
    h = 100.0
    p_los = _los_oracle(90.0)
    const = (3e8 / (4 * math.pi * 2e9)) ** 2
    g_los = const / 10 ** 0.1 * h ** -2
    g_nlos = const * h ** -3
    expected = 1.0 * (p_los * g_los + (1 - p_los) * g_nlos)
    assert avg_received_power(h, h, CH) == pytest.approx(expected, rel=1e-12)


def test_avg_power_identical_conditions_ignores_los_probability():
    p = ChannelParams(mu_los_db=2.0, mu_nlos_db=2.0, alpha_los=2.5, alpha_nlos=2.5)
    for r in (100.0, 180.0, 400.0):
        assert avg_received_power(r, 100.0, p) == p.tx_power_w * path_gain(r, LOS, p)


@given(st.floats(100.0, 2000.0), st.floats(10.0, 300.0))
def test_avg_power_linear_in_tx_power(r, h):
    r = max(r, h)
    doubled = replace(CH, tx_power_w=2 * CH.tx_power_w)
    assert avg_received_power(r, h, doubled) == 2 * avg_received_power(r, h, CH)


def test_noise_power_over_band():
    assert 10 * math.log10(CH.noise_power_w * 1000) == pytest.approx(-100.99, abs=0.01)
    assert CH.noise_power_w == pytest.approx(7.96e-14, rel=1e-3)


def test_channel_param_invariants():
    with pytest.raises(ValueError):
        ChannelParams(alpha_los=1.5)
    with pytest.raises(ValueError):
        ChannelParams(alpha_los=3.0, alpha_nlos=2.5)
    with pytest.raises(ValueError):
        ChannelParams(tx_power_w=0.0)


def test_monotonicity_on_random_samples():
    rng = np.random.default_rng(0)
    h = 100.0
    theta = rng.uniform(0.01, 90.0, 10_000)
    order = np.argsort(theta)
    p = los_probability(theta[order], CH)
    assert np.all(np.diff(p) > 0)
    assert np.all((p > 0) & (p < 1))
    np.testing.assert_array_equal(los_probability(theta, CH) + nlos_probability(theta, CH), 1.0)
    sep = np.sort(rng.uniform(0.0, 2000.0, 10_000))
    power = avg_received_power(np.sqrt(sep ** 2 + h ** 2), h, CH)
    assert np.all(np.diff(power) <= 0)
