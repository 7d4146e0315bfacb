import copy

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uavdeploy.channel import ChannelParams
from uavdeploy.mdp_env import (
    EnvConfig,
    EpisodeTrace,
    PlacementEnv,
    TraceRecord,
    best_state,
    decode_state,
    encode_state,
    state_dim,
)
from uavdeploy.network_eval import QoSParams, throughput, throughput_no_interference
from uavdeploy.scenario import AreaConfig, Snapshot, UserDistribution, sample_users

AREA = AreaConfig(800.0, 800.0, 100.0)
CH = ChannelParams()
QOS = QoSParams()


def make_env(**kw):
    return PlacementEnv(AREA, CH, QOS, EnvConfig(**kw))


def snapshot(k, p, seed=0):
    rng = np.random.default_rng(seed)
    return Snapshot(0, rng.uniform(0, 800, (k, 2)), rng.uniform(0, 800, (p, 2)))


def test_state_lengths():
    assert len(make_env().reset(snapshot(2, 1))) == 8
    assert len(make_env().reset(snapshot(24, 2))) == 76
    assert state_dim(24, 2) == 76


def test_reset_is_deterministic():
    snap = snapshot(5, 2)
    np.testing.assert_array_equal(make_env().reset(snap), make_env().reset(snap))


def test_state_round_trip():
    snap = snapshot(6, 3, seed=4)
    env = make_env()
    state = env.reset(snap)
    users, uavs, serving = decode_state(state, 6, 3, AREA)
    np.testing.assert_allclose(users, snap.user_xy, atol=1e-9)
    np.testing.assert_allclose(uavs, snap.uav_xy, atol=1e-9)
    np.testing.assert_array_equal(serving, env._serving)


def test_encoding_is_normalized():
    state = make_env().reset(snapshot(10, 2, seed=1))
    assert np.all((state >= 0) & (state <= 1))


def test_zero_action():
    env = make_env(reward_baseline="initial")
    snap = snapshot(8, 2)
    env.reset(snap)
    res = env.step(np.zeros(4))
    assert res.reward == 0.0
    np.testing.assert_array_equal(env.uav_xy, snap.uav_xy)
    assert env.step_pretrain(np.zeros(4)).reward == 0.0


def test_zero_baseline_first_reward_is_full_throughput():
    env = make_env(reward_baseline="zero")
    snap = snapshot(8, 2, seed=2)
    env.reset(snap)
    res = env.step(np.zeros(4))
    assert res.reward == throughput(snap, CH, QOS)


def test_boundary_clamp():
    env = make_env(a_max=50)
    env.reset(Snapshot(0, [(10, 10)], [(790.0, 5.0)]))
    env.step(np.array([50.0, -50.0]))
    np.testing.assert_array_equal(env.uav_xy, [[800.0, 0.0]])


def test_action_and_negation_cancel():
    env = make_env(reward_baseline="initial")
    env.reset(Snapshot(0, sample_users(UserDistribution(), 8, AREA, 1), [(300, 300), (500, 450)]))
    a = np.array([3.0, -4.0, 5.0, 2.5])
    r1 = env.step(a).reward
    r2 = env.step(-a).reward
    assert r1 + r2 == pytest.approx(0.0, abs=1e-9)


def test_wrong_action_length():
    env = make_env()
    env.reset(snapshot(3, 2))
    with pytest.raises(ValueError):
        env.step(np.zeros(3))


def test_step_before_reset():
    with pytest.raises(RuntimeError):
        make_env().step(np.zeros(2))


def test_pretrain_reward_equals_true_reward_for_one_uav():
    snap = snapshot(8, 1, seed=9)
    a, b = make_env(reward_baseline="initial"), make_env(reward_baseline="initial")
    a.reset(snap)
    b.reset(snap)
    for act in ([4.0, 1.0], [-2.0, 5.0], [0.5, -3.0]):
        assert a.step(np.array(act)).reward == b.step_pretrain(np.array(act)).reward


def test_colocated_separation_telescopes_in_both_modes():
    users = [(380, 400), (420, 400), (400, 380), (400, 420)]
    snap = Snapshot(0, users, [(400, 400), (400, 400)])
    for pretrain in (False, True):
        env = make_env(reward_baseline="initial", a_max=5)
        env.reset(snap)
        total = 0.0
        for _ in range(30):
            step = env.step_pretrain if pretrain else env.step
            total += step(np.array([-5.0, 0.0, 5.0, 0.0])).reward
        final = snap.with_uavs(env.uav_xy)
        fn = throughput_no_interference if pretrain else throughput
        assert total == pytest.approx(fn(final, CH, QOS) - fn(snap, CH, QOS), abs=1e-9)


def test_step_is_replayable():
    env = make_env()
    env.reset(snapshot(8, 2, seed=3))
    env.step(np.array([1.0, 2.0, -3.0, 4.0]))
    saved = copy.deepcopy(env)
    a = np.array([5.0, -5.0, 2.0, 0.1])
    r1 = env.step(a)
    r2 = saved.step(a)
    assert r1.reward == r2.reward and r1.throughput_now == r2.throughput_now and r1.epoch == r2.epoch
    np.testing.assert_array_equal(r1.next_state, r2.next_state)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 8), st.integers(1, 3), st.integers(0, 2 ** 31 - 1),
       st.sampled_from(["zero", "initial"]), st.booleans())
def test_telescoping_and_box_invariance(k, p, seed, baseline, pretrain):
    rng = np.random.default_rng(seed)
    env = make_env(reward_baseline=baseline, a_max=40.0)
    snap = Snapshot(0, rng.uniform(0, 800, (k, 2)), rng.uniform(0, 800, (p, 2)))
    env.reset(snap)
    total = 0.0
    for _ in range(15):
        step = env.step_pretrain if pretrain else env.step
        total += step(rng.uniform(-40, 40, 2 * p)).reward
        assert AREA.contains(env.uav_xy)
    fn = throughput_no_interference if pretrain else throughput
    final = fn(snap.with_uavs(env.uav_xy), CH, QOS)
    assert total == pytest.approx(final - env.baseline(pretrain), rel=1e-9, abs=1e-9)


def _trace(throughputs):
    tr = EpisodeTrace()
    for i, t in enumerate(throughputs):
        tr.append(TraceRecord(i, np.array([float(i)]), np.zeros(2), 0.0, t, np.zeros((1, 2))))
    return tr


def test_best_state_monotone_trace():
    state, thr = best_state(_trace([1.0, 2.0, 3.0]))
    assert state[0] == 2.0 and thr == 3.0


def test_best_state_single_step():
    state, thr = best_state(_trace([5.0]))
    assert state[0] == 0.0 and thr == 5.0


def test_best_state_mid_episode_peak_and_ties():
    values = [1.0, 4.0, 7.0, 7.0, 2.0]
    state, thr = best_state(_trace(values))
    peak = max(range(len(values)), key=lambda i: (values[i], -i))
    assert state[0] == peak == 2 and thr == 7.0


def test_best_state_empty():
    with pytest.raises(ValueError):
        best_state(EpisodeTrace())


def test_encode_unserved_code_is_zero():
    s = encode_state([(0, 0), (1, 1)], [(5, 5), (6, 6)], np.array([-1, 1]), AREA)
    np.testing.assert_array_equal(s[-2:], [0.0, 1.0])
