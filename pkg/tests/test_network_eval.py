import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uavdeploy.channel import ChannelParams, avg_received_power
from uavdeploy.network_eval import (
    UNSERVED,
    LinkReport,
    QoSParams,
    associate,
    link_report,
    throughput,
    throughput_bps,
    throughput_no_interference,
)
from uavdeploy.scenario import Snapshot, link_distance

CH = ChannelParams()
QOS = QoSParams()
H = 100.0


def rx_oracle(user, uav, ch=CH):
    r = link_distance(user, uav, H)
    return float(avg_received_power(r, H, ch))


def test_single_uav_has_no_interference():
    snap = Snapshot(0, [(0, 0), (50, 20), (300, 300)], [(10, 10)])
    rep = link_report(snap, CH)
    np.testing.assert_allclose(rep.sinr[:, 0], rep.rx_power_w[:, 0] / CH.noise_power_w, rtol=0)


def test_symmetric_powers_give_half():
    noise = CH.noise_power_w
    rx = np.full((1, 2), noise)
    # sinr is rx / (other + noise) with other == noise
    assert rx[0, 0] / (rx[0, 1] + noise) == 0.5
    # find a link length whose received power equals the noise floor, then place both UAVs there
    lo, hi = H, 1e7
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if avg_received_power(mid, H, CH) > noise:
            lo = mid
        else:
            hi = mid
    d = math.sqrt(lo * lo - H * H)
    snap = Snapshot(0, [(0, 0)], [(d, 0), (0, d)])
    rep = link_report(snap, CH)
    assert rep.rx_power_w[0, 0] == rep.rx_power_w[0, 1]
    assert rep.sinr[0, 0] == pytest.approx(0.5, rel=1e-9)


def test_sinr_matches_hand_summed_interference():
    rng = np.random.default_rng(3)
    users = rng.uniform(0, 800, (3, 2))
    uavs = rng.uniform(0, 800, (2, 2))
    rep = link_report(Snapshot(0, users, uavs), CH)
    for k in range(3):
        for p in range(2):
            own = rx_oracle(users[k], uavs[p])
            other = sum(rx_oracle(users[k], uavs[j]) for j in range(2) if j != p)
            sinr = own / (other + CH.noise_power_w)
            assert rep.sinr[k, p] == pytest.approx(sinr, rel=1e-12)
            assert rep.spectral_eff[k, p] == pytest.approx(math.log2(1 + sinr), rel=1e-12)


def test_all_users_out_of_range():
    snap = Snapshot(0, [(0, 0), (10, 0)], [(700, 700), (790, 790)])
    assoc = associate(link_report(snap, CH), snap, QOS)
    assert np.all(assoc.serving == UNSERVED)
    assert throughput(snap, CH, QOS) == 0.0


def test_single_feasible_candidate():
    # user under UAV 0; UAV 1 in range but its SINR is below the threshold
    snap = Snapshot(0, [(0, 0)], [(0, 0), (200, 0)])
    rep = link_report(snap, CH)
    assert rep.distance_m[0, 1] <= QOS.comm_radius_m
    assert rep.spectral_eff[0, 0] >= QOS.rate_threshold_bpshz > rep.spectral_eff[0, 1]
    assert associate(rep, snap, QOS).serving[0] == 0


def test_tie_goes_to_lowest_index():
    snap = Snapshot(0, [(400, 400)], [(300, 400), (500, 400)])
    rep = link_report(snap, CH)
    assert rep.rx_power_w[0, 0] == rep.rx_power_w[0, 1]
    # identical powers give SINR < 1, so drop the rate test to make both feasible
    assoc = associate(rep, snap, QoSParams(rate_threshold_bpshz=0.0))
    assert assoc.serving[0] == 0


def test_empty_users_give_zero():
    snap = Snapshot(0, np.zeros((0, 2)), [(1, 1)])
    assert throughput(snap, CH, QOS) == 0.0
    assert throughput_no_interference(snap, CH, QOS) == 0.0


def test_single_uav_sum_matches_hand_evaluation():
    users = [(100, 100), (150, 120), (400, 400), (120, 300)]
    uav = (110, 110)
    snap = Snapshot(0, users, [uav])
    expected = 0.0
    for u in users:
        r = link_distance(u, uav, H)
        se = math.log2(1 + rx_oracle(u, uav) / CH.noise_power_w)
        if r <= QOS.comm_radius_m and se >= QOS.rate_threshold_bpshz:
            expected += se
    assert expected > 0
    assert throughput(snap, CH, QOS) == pytest.approx(expected, rel=1e-12)


def test_no_interference_equals_throughput_for_one_uav():
    rng = np.random.default_rng(1)
    snap = Snapshot(0, rng.uniform(0, 800, (10, 2)), [(400, 400)])
    assert throughput_no_interference(snap, CH, QOS) == throughput(snap, CH, QOS)


def test_no_interference_strictly_better_when_colocated():
    snap = Snapshot(0, [(400, 400), (420, 390), (300, 380)], [(400, 400), (400, 400)])
    free = throughput_no_interference(snap, CH, QOS)
    assert free > 0
    assert free > throughput(snap, CH, QOS)


def test_closed_indicator_at_exact_thresholds():
    user, uav = (0.0, 0.0), (200.0, 0.0)
    rep = link_report(Snapshot(0, [user], [uav]), CH)
    qos = QoSParams(rate_threshold_bpshz=float(rep.spectral_eff[0, 0]), comm_radius_m=float(rep.distance_m[0, 0]))
    snap = Snapshot(0, [user], [uav])
    assert associate(rep, snap, qos).serving[0] == 0
    assert throughput(snap, CH, qos) == rep.spectral_eff[0, 0]


def test_associate_rejects_mismatched_report():
    snap = Snapshot(0, [(0, 0)], [(0, 0)])
    bad = LinkReport(np.ones((2, 1)), np.ones((2, 1)), np.ones((2, 1)), np.ones((2, 1)))
    with pytest.raises(ValueError):
        associate(bad, snap, QOS)


def test_throughput_bps_splits_band():
    snap = Snapshot(0, [(100, 100), (110, 100)], [(105, 100)])
    rep = link_report(snap, CH)
    expected = CH.bandwidth_hz / 2 * rep.spectral_eff[:, 0].sum()
    assert throughput_bps(snap, CH, QOS) == pytest.approx(expected, rel=1e-12)


positions = st.lists(st.tuples(st.floats(0, 800), st.floats(0, 800)), min_size=1, max_size=8)


@settings(max_examples=200, deadline=None)
@given(positions, st.lists(st.tuples(st.floats(0, 800), st.floats(0, 800)), min_size=1, max_size=3))
def test_interference_only_hurts(users, uavs):
    snap = Snapshot(0, users, uavs)
    assert throughput_no_interference(snap, CH, QOS) >= throughput(snap, CH, QOS) >= 0.0


@settings(max_examples=100, deadline=None)
@given(st.tuples(st.floats(0, 800), st.floats(0, 800)), st.floats(0, 800), st.floats(0, 1))
def test_moving_closer_never_hurts_single_link(user, start, frac):
    # slide the UAV along the segment from (start, 0) toward the user
    far = np.array([start, 0.0])
    near = far + frac * (np.array(user) - far)
    t_far = throughput(Snapshot(0, [user], [far]), CH, QOS)
    t_near = throughput(Snapshot(0, [user], [near]), CH, QOS)
    assert t_near >= t_far


def test_common_scaling_leaves_throughput_unchanged():
    rng = np.random.default_rng(11)
    scaled = replace(CH, tx_power_w=CH.tx_power_w * 1e3, noise_psd_dbm_hz=CH.noise_psd_dbm_hz + 30.0)
    for _ in range(20):
        snap = Snapshot(0, rng.uniform(0, 800, (12, 2)), rng.uniform(0, 800, (2, 2)))
        a, b = throughput(snap, CH, QOS), throughput(snap, scaled, QOS)
        assert b == pytest.approx(a, rel=1e-12, abs=0)
