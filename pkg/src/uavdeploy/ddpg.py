"""Actor-critic (DDPG-style) agent that learns UAV position adjustments."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .mdp_env import EpisodeTrace, PlacementEnv, TraceRecord, best_record, state_dim
from .neuralnet import (
    AdamState,
    MlpSpec,
    MlpWeights,
    NonFiniteError,
    Normalizer,
    adam_step,
    backward,
    forward,
    hard_sync,
    init_weights,
)
from .scenario import Snapshot

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AgentConfig:
    gamma: float = 0.9
    batch_size: int = 64
    sync_period: int = 200
    episodes: int = 5000
    actor_lr: float = 1e-4
    critic_lr: float = 1e-4
    buffer_capacity: int = 10_000_000
    hidden_sizes: tuple[int, ...] = (256, 128, 64, 16)
    # exploration std as a fraction of a_max, decayed geometrically over episodes
    noise_start: float = 0.3
    noise_end: float = 0.02
    pretrain_episodes: int = 0
    reward_scale: float = 1.0
    warmup: int | None = None
    normalize_states: bool = True
    # minibatch updates per environment step
    updates_per_step: int = 1

    def __post_init__(self):
        object.__setattr__(self, "hidden_sizes", tuple(int(h) for h in self.hidden_sizes))
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.sync_period < 1:
            raise ValueError("sync_period must be >= 1")
        if self.episodes < 0 or self.pretrain_episodes < 0:
            raise ValueError("episode counts must be >= 0")
        if self.updates_per_step < 1:
            raise ValueError("updates_per_step must be >= 1")
        if self.buffer_capacity < 1:
            raise ValueError("buffer_capacity must be >= 1")
        if not (self.noise_start >= 0 and self.noise_end >= 0):
            raise ValueError("noise levels must be >= 0")

    def noise_sigma(self, episode: int, a_max: float) -> float:
        if self.episodes <= 1 or self.noise_start == 0:
            return self.noise_start * a_max
        frac = min(episode / (self.episodes - 1), 1.0)
        end = max(self.noise_end, 1e-12)
        return a_max * self.noise_start * (end / self.noise_start) ** frac


@dataclass
class Transition:
    state: np.ndarray
    action: np.ndarray
    reward: float
    next_state: np.ndarray


@dataclass
class Batch:
    states: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    next_states: np.ndarray

    def __len__(self):
        return len(self.rewards)

    @classmethod
    def of(cls, transitions: list[Transition]) -> Batch:
        return cls(np.array([t.state for t in transitions], dtype=float),
                   np.array([t.action for t in transitions], dtype=float),
                   np.array([t.reward for t in transitions], dtype=float),
                   np.array([t.next_state for t in transitions], dtype=float))


class ReplayBuffer:
    """Bounded FIFO of transitions backed by ring arrays that grow on demand."""

    def __init__(self, capacity: int, state_dim: int, action_dim: int):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self._dims = (state_dim, action_dim)
        self._alloc = 0
        self._s = self._a = self._r = self._s2 = None
        self._next = 0
        self._size = 0
        self._grow(min(capacity, 1024))

    def _grow(self, n: int) -> None:
        sd, ad = self._dims
        new = [np.zeros((n, sd)), np.zeros((n, ad)), np.zeros(n), np.zeros((n, sd))]
        if self._alloc:
            for arr, old in zip(new, (self._s, self._a, self._r, self._s2)):
                arr[: self._alloc] = old
        self._s, self._a, self._r, self._s2 = new
        self._alloc = n

    def __len__(self):
        return self._size

    def add(self, state, action, reward, next_state) -> None:
        if self._next == self._alloc and self._alloc < self.capacity:
            self._grow(min(self.capacity, 2 * self._alloc))
        i = self._next
        self._s[i], self._a[i], self._r[i], self._s2[i] = state, action, reward, next_state
        self._next = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def _oldest_first(self) -> np.ndarray:
        if self._size < self.capacity:
            return np.arange(self._size)
        return (np.arange(self._size) + self._next) % self.capacity

    def transitions(self) -> list[Transition]:
        return [Transition(self._s[i].copy(), self._a[i].copy(), float(self._r[i]), self._s2[i].copy())
                for i in self._oldest_first()]

    def sample(self, n: int, rng: np.random.Generator) -> Batch:
        if self._size == 0:
            raise ValueError("cannot sample from an empty buffer")
        idx = rng.integers(0, self._size, size=n)
        return Batch(self._s[idx], self._a[idx], self._r[idx], self._s2[idx])


class DdpgAgent:
    """Joint actor over all UAVs (action dim 2P) plus a Q critic, each with a target copy."""

    def __init__(self, num_users: int, num_uavs: int, a_max: float,
                 cfg: AgentConfig | None = None, seed=0):
        self.cfg = cfg or AgentConfig()
        self.num_users = num_users
        self.num_uavs = num_uavs
        self.a_max = float(a_max)
        self.state_dim = state_dim(num_users, num_uavs)
        self.action_dim = 2 * num_uavs
        hidden = self.cfg.hidden_sizes
        self.actor_spec = MlpSpec((self.state_dim, *hidden, self.action_dim), output_activation="tanh")
        self.critic_spec = MlpSpec((self.state_dim + self.action_dim, *hidden, 1), output_activation="linear")
        self.rng = np.random.default_rng(seed)
        self.actor = init_weights(self.actor_spec, self.rng, final_scale=0.01)
        self.critic = init_weights(self.critic_spec, self.rng)
        self.target_actor = self.actor.copy()
        self.target_critic = self.critic.copy()
        self.actor_opt = AdamState.for_weights(self.actor, lr=self.cfg.actor_lr)
        self.critic_opt = AdamState.for_weights(self.critic, lr=self.cfg.critic_lr)
        self.normalizer = Normalizer.create(self.state_dim)
        self.skipped_actor_updates = 0

    # --- network plumbing -------------------------------------------------

    def norm(self, states):
        return self.normalizer(states) if self.cfg.normalize_states else np.asarray(states, dtype=float)

    def _critic_in(self, states, unit_actions):
        return np.concatenate([self.norm(states), unit_actions], axis=-1)

    def policy_unit(self, states, target: bool = False):
        w = self.target_actor if target else self.actor
        return forward(w, self.actor_spec, self.norm(states))[0]

    def q_value(self, states, actions, target: bool = False):
        """Q for actions given in meters."""
        w = self.target_critic if target else self.critic
        x = self._critic_in(np.atleast_2d(states), np.atleast_2d(actions) / self.a_max)
        return forward(w, self.critic_spec, x)[0][:, 0]

    def sync_targets(self) -> None:
        hard_sync(self.target_actor, self.actor)
        hard_sync(self.target_critic, self.critic)

    # --- acting -----------------------------------------------------------

    def act(self, state, explore: bool = False, sigma: float | None = None,
            rng: np.random.Generator | None = None) -> np.ndarray:
        action = self.a_max * self.policy_unit(state)
        if explore:
            if sigma is None:
                sigma = self.cfg.noise_start * self.a_max
            rng = rng or self.rng
            action = action + rng.normal(0.0, 1.0, size=action.shape) * sigma
            action = np.clip(action, -self.a_max, self.a_max)
        return action

    # --- learning ---------------------------------------------------------

    def td_target(self, batch: Batch) -> np.ndarray:
        """r + gamma * Q'(s', pi'(s')) with both target networks; no terminal masking."""
        rewards = batch.rewards * self.cfg.reward_scale
        if self.cfg.gamma == 0.0:
            return rewards.copy()
        u_next = self.policy_unit(batch.next_states, target=True)
        x = self._critic_in(batch.next_states, u_next)
        q_next = forward(self.target_critic, self.critic_spec, x)[0][:, 0]
        return rewards + self.cfg.gamma * q_next

    def critic_gradient(self, batch: Batch, targets):
        """(loss, grads) of mean squared TD error w.r.t. critic weights."""
        x = self._critic_in(batch.states, batch.actions / self.a_max)
        q, cache = forward(self.critic, self.critic_spec, x)
        diff = q[:, 0] - np.asarray(targets, dtype=float)
        loss = float(np.mean(diff * diff))
        grads, _ = backward(self.critic, self.critic_spec, cache, (2.0 / len(diff)) * diff[:, None])
        return loss, grads

    def train_critic(self, batch: Batch, targets) -> float:
        if len(batch) == 0:
            raise ValueError("empty batch")
        loss, grads = self.critic_gradient(batch, targets)
        if not np.isfinite(loss):
            raise NonFiniteError(f"critic loss is {loss} at Adam step {self.critic_opt.step}")
        adam_step(self.critic, grads, self.critic_opt)
        return loss

    def actor_gradient(self, states):
        """(objective, grads) with objective = mean_j Q(s_j, pi(s_j)); grads point uphill."""
        states = np.atleast_2d(states)
        u, a_cache = forward(self.actor, self.actor_spec, self.norm(states))
        x = self._critic_in(states, u)
        q, c_cache = forward(self.critic, self.critic_spec, x)
        n = len(states)
        _, dq_dx = backward(self.critic, self.critic_spec, c_cache, np.full((n, 1), 1.0 / n))
        dq_du = dq_dx[:, self.state_dim:]
        grads, _ = backward(self.actor, self.actor_spec, a_cache, dq_du)
        return float(np.mean(q)), grads

    def train_actor(self, batch: Batch) -> float:
        objective, grads = self.actor_gradient(batch.states)
        descent = MlpWeights([-g for g in grads.weights], [-g for g in grads.biases])
        try:
            adam_step(self.actor, descent, self.actor_opt)
        except NonFiniteError as exc:
            self.skipped_actor_updates += 1
            log.warning("skipping actor update: %s", exc)
        return objective

    def update(self, batch: Batch):
        targets = self.td_target(batch)
        loss = self.train_critic(batch, targets)
        objective = self.train_actor(batch)
        return loss, objective


@dataclass
class EpisodeLog:
    episode: int
    cumulative_reward: float
    final_throughput: float
    best_throughput: float
    wall_clock_ms: float

    FIELDS = ("episode", "cumulative_reward", "final_throughput", "best_throughput", "wall_clock_ms")


@dataclass
class TrainResult:
    agent: DdpgAgent
    log: list[EpisodeLog] = field(default_factory=list)


def train(make_env: Callable[[], PlacementEnv], draw_snapshot: Callable[[int, np.random.Generator], Snapshot],
          num_users: int, num_uavs: int, cfg: AgentConfig, seed=0,
          on_finish: Callable[[DdpgAgent], None] | None = None, timing: bool = True) -> TrainResult:
    """Run ``cfg.episodes`` episodes of ``env.cfg.epochs`` epochs each.

    ``draw_snapshot(episode, rng)`` supplies the users and the starting UAV
    placement of every episode. The first ``cfg.pretrain_episodes`` episodes
    use the interference-free reward. ``on_finish`` runs even when training
    fails part-way (used to write the final checkpoint).
    """
    seeds = np.random.SeedSequence(seed).spawn(3)
    env = make_env()
    agent = DdpgAgent(num_users, num_uavs, env.cfg.a_max, cfg, seed=seeds[0])
    episode_rng = np.random.default_rng(seeds[1])
    noise_rng = np.random.default_rng(seeds[2])
    buffer = ReplayBuffer(cfg.buffer_capacity, agent.state_dim, agent.action_dim)
    warmup = cfg.warmup if cfg.warmup is not None else cfg.batch_size
    result = TrainResult(agent)
    global_epoch = 0
    try:
        for ep in range(cfg.episodes):
            t0 = time.perf_counter()
            state = env.reset(draw_snapshot(ep, episode_rng))
            pretrain = ep < cfg.pretrain_episodes
            sigma = cfg.noise_sigma(ep, agent.a_max)
            total = 0.0
            best = env.throughput()
            thr = best
            for _ in range(env.cfg.epochs):
                if cfg.normalize_states:
                    agent.normalizer.update(state)
                action = agent.act(state, explore=True, sigma=sigma, rng=noise_rng)
                res = env.step_pretrain(action) if pretrain else env.step(action)
                buffer.add(state, action, res.reward, res.next_state)
                total += res.reward
                thr = res.throughput_now
                best = max(best, thr)
                state = res.next_state
                if len(buffer) >= warmup:
                    for _ in range(cfg.updates_per_step):
                        agent.update(buffer.sample(cfg.batch_size, agent.rng))
                global_epoch += 1
                if global_epoch % cfg.sync_period == 0:
                    agent.sync_targets()
            wall = (time.perf_counter() - t0) * 1000.0 if timing else 0.0
            result.log.append(EpisodeLog(ep, total, thr, best, wall))
            log.debug("episode %d reward %.3f final %.3f best %.3f", ep, total, thr, best)
    finally:
        if on_finish is not None:
            on_finish(agent)
    return result


def decide(snap: Snapshot, agent: DdpgAgent, env: PlacementEnv, epochs: int | None = None):
    """Noise-free rollout from ``snap``; returns (best placement, its throughput, trace).

    The trace starts with the initial placement as epoch 0, so the result is
    never worse than where the UAVs started.
    """
    epochs = env.cfg.epochs if epochs is None else epochs
    state = env.reset(snap)
    trace = EpisodeTrace()
    trace.append(TraceRecord(0, state, np.zeros(agent.action_dim), 0.0, env.throughput(), env.uav_xy))
    for _ in range(epochs):
        action = agent.act(state, explore=False)
        res = env.step(action)
        trace.append(TraceRecord(res.epoch, res.next_state, action, res.reward, res.throughput_now, env.uav_xy))
        state = res.next_state
    best = best_record(trace)
    return best.uav_xy, best.throughput, trace
