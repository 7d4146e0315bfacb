"""Per-slot placement as an episodic MDP with telescoping throughput rewards."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelParams
from .network_eval import (
    UNSERVED,
    QoSParams,
    served_rates,
    sum_rates,
)
from .scenario import AreaConfig, Snapshot


@dataclass(frozen=True)
class EnvConfig:
    a_max: float = 5.0
    epochs: int = 800
    # "zero": previous throughput starts at 0, so the first reward is the whole
    # initial throughput; "initial": it starts at throughput(s_0)
    reward_baseline: str = "zero"
    pretrain: bool = False

    def __post_init__(self):
        if not self.a_max > 0:
            raise ValueError("a_max must be > 0")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.reward_baseline not in ("zero", "initial"):
            raise ValueError("reward_baseline must be 'zero' or 'initial'")


@dataclass
class StepResult:
    next_state: np.ndarray
    reward: float
    throughput_now: float
    epoch: int


@dataclass
class TraceRecord:
    epoch: int
    state: np.ndarray
    action: np.ndarray
    reward: float
    throughput: float
    uav_xy: np.ndarray


@dataclass
class EpisodeTrace:
    records: list[TraceRecord] = field(default_factory=list)

    def append(self, rec: TraceRecord) -> None:
        self.records.append(rec)

    def __len__(self):
        return len(self.records)

    def total_reward(self) -> float:
        return float(sum(r.reward for r in self.records if r.epoch >= 1))


def state_dim(k: int, p: int) -> int:
    return 3 * k + 2 * p


def encode_state(user_xy, uav_xy, serving, area: AreaConfig) -> np.ndarray:
    """Positions scaled into [0, 1] per axis; association code (idx + 1) / P, 0 if unserved."""
    user_xy = np.asarray(user_xy, dtype=float)
    uav_xy = np.asarray(uav_xy, dtype=float)
    n_uav = len(uav_xy)
    serving = np.asarray(serving)
    codes = np.where(serving == UNSERVED, 0.0, (serving + 1.0) / n_uav)
    return np.concatenate([
        (user_xy / area.upper).ravel(),
        (uav_xy / area.upper).ravel(),
        codes,
    ])


def decode_state(state, k: int, p: int, area: AreaConfig):
    state = np.asarray(state, dtype=float)
    if len(state) != state_dim(k, p):
        raise ValueError("state length does not match (K, P)")
    users = state[: 2 * k].reshape(k, 2) * area.upper
    uavs = state[2 * k: 2 * k + 2 * p].reshape(p, 2) * area.upper
    codes = state[2 * k + 2 * p:]
    serving = np.where(codes == 0.0, UNSERVED, np.rint(codes * p).astype(int) - 1)
    return users, uavs, serving


class PlacementEnv:
    """Moves the UAVs of one snapshot by bounded deltas.

    Single-owner mutable object: it carries the previous-epoch throughput for
    both reward modes (with and without interference). Copy it with
    ``copy.deepcopy`` to replay a step.
    """

    def __init__(self, area: AreaConfig, channel: ChannelParams, qos: QoSParams,
                 cfg: EnvConfig | None = None):
        self.area = area
        self.channel = channel
        self.qos = qos
        self.cfg = cfg or EnvConfig()
        self.snapshot: Snapshot | None = None
        self.epoch = 0
        self._serving = None
        self._prev = {True: 0.0, False: 0.0}
        self.initial_throughput = {True: 0.0, False: 0.0}

    @property
    def num_users(self) -> int:
        return self.snapshot.num_users

    @property
    def num_uavs(self) -> int:
        return self.snapshot.num_uavs

    @property
    def uav_xy(self) -> np.ndarray:
        return self.snapshot.uav_xy.copy()

    def _evaluate(self, interference: bool):
        if self.snapshot.num_users == 0:
            return 0.0, np.zeros(0, dtype=int)
        per_user, serving = served_rates(self.snapshot.user_xy, self.snapshot.uav_xy,
                                         self.channel, self.qos, self.area.uav_altitude_m,
                                         interference=interference)
        return float(sum_rates(per_user)), serving

    def _state(self) -> np.ndarray:
        return encode_state(self.snapshot.user_xy, self.snapshot.uav_xy, self._serving, self.area)

    def reset(self, snap: Snapshot) -> np.ndarray:
        snap.validate(self.area)
        self.snapshot = Snapshot(snap.time_slot, snap.user_xy.copy(), snap.uav_xy.copy())
        self.epoch = 0
        thr, self._serving = self._evaluate(True)
        thr_free, _ = self._evaluate(False)
        self.initial_throughput = {True: thr, False: thr_free}
        if self.cfg.reward_baseline == "zero":
            self._prev = {True: 0.0, False: 0.0}
        else:
            self._prev = dict(self.initial_throughput)
        return self._state()

    def baseline(self, pretrain: bool = False) -> float:
        """Throughput the first reward is measured against."""
        if self.cfg.reward_baseline == "zero":
            return 0.0
        return self.initial_throughput[not pretrain]

    def throughput(self) -> float:
        return self._evaluate(True)[0]

    def _move(self, action) -> None:
        if self.snapshot is None:
            raise RuntimeError("reset() must be called before step()")
        action = np.asarray(action, dtype=float)
        if action.shape != (2 * self.num_uavs,):
            raise ValueError(f"action must have length {2 * self.num_uavs}, got {action.shape}")
        self.snapshot.uav_xy = self.area.clip(self.snapshot.uav_xy + action.reshape(-1, 2))
        self.epoch += 1

    def _finish(self, pretrain: bool) -> StepResult:
        thr, self._serving = self._evaluate(True)
        thr_free, _ = self._evaluate(False)
        now = {True: thr, False: thr_free}
        key = not pretrain
        reward = now[key] - self._prev[key]
        self._prev = now
        return StepResult(self._state(), reward, thr, self.epoch)

    def step(self, action) -> StepResult:
        self._move(action)
        return self._finish(pretrain=False)

    def step_pretrain(self, action) -> StepResult:
        """Like :meth:`step` but rewarded with the interference-free throughput change."""
        self._move(action)
        return self._finish(pretrain=True)


def best_record(trace: EpisodeTrace) -> TraceRecord:
    if len(trace) == 0:
        raise ValueError("empty trace")
    best = trace.records[0]
    for rec in trace.records[1:]:
        if rec.throughput > best.throughput:
            best = rec
    return best


def best_state(trace: EpisodeTrace):
    """Highest-throughput record of the trace (earliest on ties) -> (state, throughput)."""
    rec = best_record(trace)
    return rec.state, rec.throughput
