"""Reference solvers for one slot's placement problem."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .channel import ChannelParams, avg_received_power
from .network_eval import QoSParams, served_rates, sum_rates, throughput
from .scenario import AreaConfig, Snapshot, make_rng, pairwise_distances


@dataclass(frozen=True)
class Problem:
    """Everything needed to score a placement for one snapshot's users."""

    area: AreaConfig
    channel: ChannelParams
    qos: QoSParams

    def score(self, snap: Snapshot, uav_xy) -> float:
        return throughput(snap.with_uavs(uav_xy), self.channel, self.qos, self.area.uav_altitude_m)

    def objective(self, snap: Snapshot) -> Callable[[np.ndarray], float]:
        return lambda uav_xy: self.score(snap, uav_xy)


# --- fixed placement -------------------------------------------------------

def fixed_placement(snap: Snapshot, area: AreaConfig, layout: str = "center",
                    custom=None) -> np.ndarray:
    """Preset UAV coordinates that ignore the users.

    center  -- P UAVs evenly spaced along the horizontal midline
    corners -- quarter points of the area's diagonals, cycled
    custom  -- the coordinates passed in ``custom``
    """
    n = snap.num_uavs
    if layout == "center":
        xs = area.width_m * np.arange(1, n + 1) / (n + 1)
        return np.column_stack([xs, np.full(n, area.height_m / 2)])
    if layout == "corners":
        quarter = np.array([[0.25, 0.25], [0.75, 0.75], [0.25, 0.75], [0.75, 0.25]])
        return quarter[np.arange(n) % 4] * area.upper
    if layout == "custom":
        if custom is None:
            raise ValueError("custom layout needs coordinates")
        return area.clip(np.array(custom, dtype=float).reshape(-1, 2))
    raise ValueError(f"unknown layout {layout!r}")


# --- simulated annealing ---------------------------------------------------

@dataclass(frozen=True)
class AnnealConfig:
    # None -> 10% of the starting throughput, floored at 1.0
    initial_temperature: float | None = None
    cooling: float = 0.995
    iterations: int = 5000
    step_sigma_m: float = 20.0
    seed: int = 0

    def __post_init__(self):
        if self.initial_temperature is not None and not self.initial_temperature >= 0:
            raise ValueError("initial_temperature must be >= 0")
        if not 0.0 < self.cooling < 1.0:
            raise ValueError("cooling must lie in (0, 1)")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not self.step_sigma_m > 0:
            raise ValueError("step_sigma_m must be > 0")


def simulated_annealing(snap: Snapshot, problem: Problem, cfg: AnnealConfig = AnnealConfig(),
                        objective: Callable[[np.ndarray], float] | None = None,
                        accepted: list | None = None, seed=None):
    """Metropolis search over Gaussian moves of every UAV coordinate.

    Returns the best placement ever visited and its throughput. A zero
    initial temperature gives pure hill climbing. Accepted objective values
    are appended to ``accepted`` when given.
    """
    objective = objective or problem.objective(snap)
    rng = make_rng(cfg.seed if seed is None else seed)
    cur = problem.area.clip(snap.uav_xy)
    cur_val = objective(cur)
    best, best_val = cur.copy(), cur_val
    temp = cfg.initial_temperature
    if temp is None:
        temp = max(0.1 * cur_val, 1.0)
    if accepted is not None:
        accepted.append(cur_val)
    for _ in range(cfg.iterations):
        cand = problem.area.clip(cur + rng.normal(0.0, cfg.step_sigma_m, size=cur.shape))
        val = objective(cand)
        delta = val - cur_val
        u = rng.random()
        if delta >= 0 or (temp > 0 and u < math.exp(delta / temp)):
            cur, cur_val = cand, val
            if accepted is not None:
                accepted.append(val)
            if val > best_val:
                best, best_val = cand.copy(), val
        temp *= cfg.cooling
    return best, best_val


# --- smooth relaxation, projected gradient ascent --------------------------

@dataclass(frozen=True)
class SmoothOptConfig:
    # final sigmoid sharpness: per bps/Hz for the rate test, per meter for the range test
    rate_sharpness: float = 10.0
    dist_sharpness: float = 10.0
    # sharpness starts at this fraction of the final value and grows geometrically
    sharpness_start: float = 1e-3
    # association softmax sharpness over received power in dB
    assoc_sharpness: float = 1.0
    step_m: float = 20.0
    step_decay: float = 0.99
    max_iter: int = 300
    restarts: int = 8
    fd_step_m: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        if not (self.rate_sharpness > 0 and self.dist_sharpness > 0 and self.assoc_sharpness > 0):
            raise ValueError("sharpness must be > 0")
        if not 0 < self.sharpness_start <= 1:
            raise ValueError("sharpness_start must lie in (0, 1]")
        if not self.step_m > 0:
            raise ValueError("step size must be > 0")
        if self.max_iter < 0 or self.restarts < 1:
            raise ValueError("need max_iter >= 0 and restarts >= 1")


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def relaxed_throughput(user_xy, uav_xy, problem: Problem, rate_sharpness: float,
                       dist_sharpness: float, assoc_sharpness: float = 1.0):
    """Smooth stand-in for the objective; ``uav_xy`` may be batched (..., P, 2).

    Indicators become sigmoids, and the hard max-power association becomes
    a softmax over received power in dB.
    """
    h = problem.area.uav_altitude_m
    dist = pairwise_distances(user_xy, uav_xy, h)
    rx = avg_received_power(dist, h, problem.channel)
    total = rx.sum(axis=-1, keepdims=True)
    sinr = rx / (total - rx + problem.channel.noise_power_w)
    se = np.log2(1.0 + sinr)
    feas = (_sigmoid(rate_sharpness * (se - problem.qos.rate_threshold_bpshz))
            * _sigmoid(dist_sharpness * (problem.qos.comm_radius_m - dist)))
    logits = assoc_sharpness * 10.0 * np.log10(rx)
    logits = logits - logits.max(axis=-1, keepdims=True)
    weights = np.exp(logits)
    weights /= weights.sum(axis=-1, keepdims=True)
    return (weights * feas * se).sum(axis=(-1, -2))


def _relaxed_grad(user_xy, x, problem, sharp, cfg: SmoothOptConfig):
    # central differences on all 2P coordinates in one batched evaluation
    n = x.size
    eye = np.eye(n).reshape(n, *x.shape) * cfg.fd_step_m
    pts = np.concatenate([x + eye, x - eye])
    vals = relaxed_throughput(user_xy, pts, problem, *sharp)
    return ((vals[:n] - vals[n:]) / (2 * cfg.fd_step_m)).reshape(x.shape)


def smooth_opt(snap: Snapshot, problem: Problem, cfg: SmoothOptConfig = SmoothOptConfig(), seed=None):
    """Multi-start projected ascent on :func:`relaxed_throughput`.

    Restart 0 begins at the snapshot's current placement, the rest at random
    points of the box. Every iterate is scored on the true objective and the
    best one over all restarts is returned.
    """
    rng = make_rng(cfg.seed if seed is None else seed)
    area = problem.area
    users = snap.user_xy
    starts = [area.clip(snap.uav_xy)]
    for _ in range(cfg.restarts - 1):
        starts.append(rng.uniform(0.0, 1.0, size=snap.uav_xy.shape) * area.upper)
    best, best_val = starts[0].copy(), problem.score(snap, starts[0])
    if snap.num_users == 0:
        return best, best_val
    for x in starts:
        x = x.copy()
        step = cfg.step_m
        for it in range(cfg.max_iter):
            frac = cfg.sharpness_start ** (1.0 - it / max(cfg.max_iter - 1, 1))
            sharp = (cfg.rate_sharpness * frac, cfg.dist_sharpness * frac, cfg.assoc_sharpness)
            g = _relaxed_grad(users, x, problem, sharp, cfg)
            norm = np.linalg.norm(g)
            if norm == 0.0 or not np.isfinite(norm):
                break
            x = area.clip(x + step * g / norm)
            step *= cfg.step_decay
            val = problem.score(snap, x)
            if val > best_val:
                best, best_val = x.copy(), val
        val = problem.score(snap, x)
        if val > best_val:
            best, best_val = x.copy(), val
    return best, best_val


# --- exhaustive grid oracle ------------------------------------------------

MAX_GRID_PLACEMENTS = 10 ** 7


class IntractableError(ValueError):
    pass


def grid_points(area: AreaConfig, resolution: int) -> np.ndarray:
    """Grid nodes i * A / resolution per axis (doubling the resolution refines the grid)."""
    xs = area.width_m * np.arange(resolution) / resolution
    ys = area.height_m * np.arange(resolution) / resolution
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    return np.column_stack([gx.ravel(), gy.ravel()])


def grid_oracle(snap: Snapshot, problem: Problem, resolution: int, chunk: int = 1 << 14):
    """Best placement over the joint grid of all UAVs.

    Ties go to the lexicographically smallest grid index (UAV 0's cell
    first). Refuses when P > 2 or resolution^(2P) > 10^7.
    """
    p = snap.num_uavs
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    if p > 2 or resolution ** (2 * p) > MAX_GRID_PLACEMENTS:
        raise IntractableError(
            f"grid oracle refused: P={p}, resolution={resolution} gives "
            f"{resolution ** (2 * p)} placements (limit P<=2 and {MAX_GRID_PLACEMENTS})")
    pts = grid_points(problem.area, resolution)
    n_cells = len(pts)
    total = n_cells ** p
    best_idx, best_val = 0, -np.inf
    h = problem.area.uav_altitude_m
    for lo in range(0, total, chunk):
        idx = np.arange(lo, min(lo + chunk, total))
        cells = np.stack([(idx // n_cells ** (p - 1 - j)) % n_cells for j in range(p)], axis=-1)
        placements = pts[cells]
        if snap.num_users == 0:
            vals = np.zeros(len(idx))
        else:
            per_user, _ = served_rates(snap.user_xy, placements, problem.channel, problem.qos, h)
            vals = sum_rates(per_user)
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_idx, best_val = int(idx[i]), float(vals[i])
    cells = [(best_idx // n_cells ** (p - 1 - j)) % n_cells for j in range(p)]
    placement = pts[cells]
    return placement, problem.score(snap, placement)
