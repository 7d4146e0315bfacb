"""Experiment orchestration: timelines over slots, summaries, sweeps and CSV output."""

from __future__ import annotations

import csv
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import checkpoint as ckpt
from .baselines import Problem, fixed_placement, grid_oracle, simulated_annealing, smooth_opt
from .config import RunConfig, with_overrides
from .ddpg import DdpgAgent, EpisodeLog, decide, train
from .mdp_env import PlacementEnv
from .network_eval import served_rates
from .scenario import Snapshot, sample_users

log = logging.getLogger(__name__)

SLOT_FIELDS = ("time_slot", "solver", "throughput", "wall_clock_ms", "served_users")


@dataclass
class SlotResult:
    time_slot: int
    throughput: dict[str, float] = field(default_factory=dict)
    wall_clock_ms: dict[str, float] = field(default_factory=dict)
    served_users: dict[str, int] = field(default_factory=dict)
    errors: dict[str, str] = field(default_factory=dict)


@dataclass
class Summary:
    solvers: list[str]
    mean_throughput: dict[str, float]
    # fraction_better[a][b]: share of slots where a is strictly better than b
    fraction_better: dict[str, dict[str, float]]
    total_wall_ms: dict[str, float]


def problem_of(cfg: RunConfig) -> Problem:
    return Problem(cfg.scenario.area, cfg.channel, cfg.qos)


def make_env(cfg: RunConfig) -> PlacementEnv:
    return PlacementEnv(cfg.scenario.area, cfg.channel, cfg.qos, cfg.environment)


def slot_seed(master: int, slot: int, stream: int = 0) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(master), int(slot), int(stream)])


def slot_users(cfg: RunConfig, slot: int, k: int | None = None, seed: int | None = None) -> np.ndarray:
    """Users of ``slot``; identical for every solver and nested across k for uniform draws."""
    k = cfg.scenario.num_users if k is None else k
    seed = cfg.seed if seed is None else seed
    return sample_users(cfg.scenario.distribution, k, cfg.scenario.area, slot_seed(seed, slot))


def initial_placement(cfg: RunConfig) -> np.ndarray:
    dummy = Snapshot(0, np.zeros((0, 2)), np.zeros((cfg.scenario.num_uavs, 2)))
    return fixed_placement(dummy, cfg.scenario.area, cfg.scenario.initial_layout)


def served_count(cfg: RunConfig, snap: Snapshot) -> int:
    if snap.num_users == 0:
        return 0
    _, serving = served_rates(snap.user_xy, snap.uav_xy, cfg.channel, cfg.qos, cfg.scenario.area.uav_altitude_m)
    return int(np.count_nonzero(serving >= 0))


def solve(name: str, snap: Snapshot, cfg: RunConfig, agent: DdpgAgent | None = None, seed=0):
    """Run one solver on one snapshot -> (placement, throughput)."""
    problem = problem_of(cfg)
    if name == "fixed":
        placement = fixed_placement(snap, cfg.scenario.area, cfg.baselines.fixed_layout)
        return placement, problem.score(snap, placement)
    if name == "anneal":
        return simulated_annealing(snap, problem, cfg.baselines.anneal, seed=seed)
    if name == "smooth":
        return smooth_opt(snap, problem, cfg.baselines.smooth, seed=seed)
    if name == "oracle":
        return grid_oracle(snap, problem, cfg.baselines.grid_resolution)
    if name == "drl":
        if agent is None:
            raise ValueError("the drl solver needs a trained checkpoint")
        placement, thr, _ = decide(snap, agent, make_env(cfg))
        return placement, thr
    raise ValueError(f"unknown solver {name!r}")


def run_timeline(cfg: RunConfig, solvers=None, agent: DdpgAgent | None = None,
                 users_by_slot=None) -> list[SlotResult]:
    """Evaluate every solver over ``num_slots`` slots of re-drawn users.

    Each solver starts each slot from its own previous placement (or from the
    initial layout when warm start is off). ``users_by_slot`` overrides the
    user draw, e.g. for nested sweeps.
    """
    solvers = list(solvers or cfg.baselines.solvers)
    start = initial_placement(cfg)
    current = {s: start.copy() for s in solvers}
    results = []
    for t in range(cfg.scenario.num_slots):
        users = slot_users(cfg, t) if users_by_slot is None else users_by_slot[t]
        row = SlotResult(t)
        for i, name in enumerate(solvers):
            origin = current[name] if cfg.scenario.warm_start else start
            snap = Snapshot(t, users, origin)
            seed = slot_seed(cfg.seed, t, stream=i + 1)
            t0 = time.perf_counter()
            try:
                placement, thr = solve(name, snap, cfg, agent, seed=seed)
            except Exception as exc:  # noqa: BLE001 - a failed cell must not stop the timeline
                log.error("solver %s failed at slot %d: %s", name, t, exc)
                row.throughput[name] = math.nan
                row.wall_clock_ms[name] = 0.0
                row.served_users[name] = 0
                row.errors[name] = str(exc)
                continue
            wall = (time.perf_counter() - t0) * 1000.0
            current[name] = np.asarray(placement, dtype=float)
            row.throughput[name] = float(thr)
            row.wall_clock_ms[name] = 0.0 if cfg.reproducible else wall
            row.served_users[name] = served_count(cfg, snap.with_uavs(placement))
        results.append(row)
    return results


def summarize(results: list[SlotResult]) -> Summary:
    if not results:
        raise ValueError("no slot results to summarize")
    solvers = list(results[0].throughput)
    cols = {s: np.array([r.throughput.get(s, math.nan) for r in results]) for s in solvers}
    mean = {s: float(np.nanmean(c)) if np.any(np.isfinite(c)) else math.nan for s, c in cols.items()}
    better = {a: {b: float(np.mean(cols[a] > cols[b])) for b in solvers} for a in solvers}
    wall = {s: float(sum(r.wall_clock_ms.get(s, 0.0) for r in results)) for s in solvers}
    return Summary(solvers, mean, better, wall)


def sweep_density(cfg: RunConfig, k_values, solvers=None, agent: DdpgAgent | None = None):
    """One summary per user count; users for smaller K are prefixes of the largest draw."""
    k_values = list(k_values)
    if not k_values:
        raise ValueError("k_values must not be empty")
    k_max = max(k_values)
    users = [slot_users(cfg, t, k=k_max) for t in range(cfg.scenario.num_slots)]
    table = []
    for k in k_values:
        sub = with_overrides(cfg, **{"scenario.num_users": k})
        rows = run_timeline(sub, solvers, agent, users_by_slot=[u[:k] for u in users])
        table.append((k, summarize(rows)))
    return table


def compare_distributions(cfg: RunConfig, solvers=None, agent: DdpgAgent | None = None):
    """Summaries under uniform and (default) Gaussian user placement."""
    out = {}
    for kind in ("uniform", "gaussian"):
        dist_cfg = with_overrides(cfg, **{"scenario.distribution.kind": kind,
                                          "scenario.distribution.gaussian_centers": None,
                                          "scenario.distribution.gaussian_sigma_m": None})
        if kind == cfg.scenario.distribution.kind:
            dist_cfg = cfg
        out[kind] = summarize(run_timeline(dist_cfg, solvers, agent))
    return out


def oracle_check(cfg: RunConfig, instances: int = 20, num_users: int = 8, resolution: int = 81,
                 seed: int | None = None) -> list[dict]:
    """Annealing and smooth ascent vs the grid oracle on random 1-UAV instances."""
    seed = cfg.seed if seed is None else seed
    sub = with_overrides(cfg, **{"scenario.num_users": num_users, "scenario.num_uavs": 1})
    problem = problem_of(sub)
    area = sub.scenario.area
    rows = []
    for i in range(instances):
        rng = np.random.default_rng(slot_seed(seed, i, stream=99))
        users = sample_users(sub.scenario.distribution, num_users, area, rng)
        start = rng.uniform(0.0, 1.0, size=(1, 2)) * area.upper
        snap = Snapshot(i, users, start)
        _, best = grid_oracle(snap, problem, resolution)
        _, sa = simulated_annealing(snap, problem, sub.baselines.anneal, seed=slot_seed(seed, i, 1))
        _, sm = smooth_opt(snap, problem, sub.baselines.smooth, seed=slot_seed(seed, i, 2))
        rows.append({
            "instance": i, "oracle": best, "anneal": sa, "smooth": sm,
            "anneal_ratio": sa / best if best > 0 else 1.0,
            "smooth_ratio": sm / best if best > 0 else 1.0,
        })
    return rows


def training_snapshots(cfg: RunConfig):
    """Episode snapshot source: fresh users and a random UAV start per episode."""
    area = cfg.scenario.area
    dist = cfg.scenario.distribution

    def draw(episode: int, rng: np.random.Generator) -> Snapshot:
        users = sample_users(dist, cfg.scenario.num_users, area, rng)
        uavs = rng.uniform(0.0, 1.0, size=(cfg.scenario.num_uavs, 2)) * area.upper
        return Snapshot(episode, users, uavs)

    return draw


def train_agent(cfg: RunConfig, out_dir=None):
    """Train, always leaving ``checkpoint.bin`` behind; returns (agent, episode log)."""
    out = Path(out_dir or cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "checkpoint.bin"
    result = train(lambda: make_env(cfg), training_snapshots(cfg), cfg.scenario.num_users,
                   cfg.scenario.num_uavs, cfg.agent, seed=cfg.seed,
                   on_finish=lambda agent: ckpt.save_checkpoint(agent, path),
                   timing=not cfg.reproducible)
    write_training_log(result.log, out / "training_log.csv")
    return result.agent, result.log


# --- CSV ---------------------------------------------------------------------

def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, (float, np.floating)) else str(x)


def write_slots(results: list[SlotResult], path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(SLOT_FIELDS)
        for r in results:
            for s in r.throughput:
                w.writerow([r.time_slot, s, _fmt(r.throughput[s]), _fmt(r.wall_clock_ms[s]), r.served_users[s]])


def read_slots(path) -> list[SlotResult]:
    rows: dict[int, SlotResult] = {}
    with open(path, newline="") as f:
        for rec in csv.DictReader(f):
            t = int(rec["time_slot"])
            r = rows.setdefault(t, SlotResult(t))
            s = rec["solver"]
            r.throughput[s] = float(rec["throughput"])
            r.wall_clock_ms[s] = float(rec["wall_clock_ms"])
            r.served_users[s] = int(rec["served_users"])
    return [rows[t] for t in sorted(rows)]


def summary_rows(summary: Summary, extra: dict | None = None) -> list[dict]:
    rows = []
    for s in summary.solvers:
        row = dict(extra or {})
        row.update(solver=s, mean_throughput=summary.mean_throughput[s], total_wall_ms=summary.total_wall_ms[s])
        for b in summary.solvers:
            row[f"better_than_{b}"] = summary.fraction_better[s][b]
        rows.append(row)
    return rows


def write_rows(rows: list[dict], path) -> None:
    if not rows:
        Path(path).write_text("")
        return
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(list(rows[0]))
        for row in rows:
            w.writerow([_fmt(v) for v in row.values()])


def write_summary(summary: Summary, path) -> None:
    write_rows(summary_rows(summary), path)


def write_training_log(entries: list[EpisodeLog], path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(EpisodeLog.FIELDS)
        for e in entries:
            w.writerow([e.episode, _fmt(e.cumulative_reward), _fmt(e.final_throughput),
                        _fmt(e.best_throughput), _fmt(e.wall_clock_ms)])


def read_training_log(path) -> list[EpisodeLog]:
    with open(path, newline="") as f:
        return [EpisodeLog(int(r["episode"]), float(r["cumulative_reward"]), float(r["final_throughput"]),
                           float(r["best_throughput"]), float(r["wall_clock_ms"]))
                for r in csv.DictReader(f)]
