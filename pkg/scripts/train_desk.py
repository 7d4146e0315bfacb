"""Train on the desk config, then score the agent against the baselines on held-out slots.

    python3 scripts/train_desk.py --config configs/desk.ini --out runs/desk
"""

import argparse
import logging
import time

import numpy as np

from uavdeploy import harness
from uavdeploy.config import load_config, with_overrides


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default="configs/desk.ini")
    ap.add_argument("--out", default=None)
    ap.add_argument("--eval-seed", type=int, default=20261018, help="master seed of the held-out slots")
    args = ap.parse_args()
    logging.basicConfig(level=logging.WARNING)

    cfg = load_config(args.config)
    out = args.out or cfg.out_dir
    t0 = time.perf_counter()
    agent, log = harness.train_agent(cfg, out)
    print(f"trained {len(log)} episodes in {time.perf_counter() - t0:.0f}s -> {out}/checkpoint.bin")

    final = np.array([e.final_throughput for e in log])
    q = max(len(final) // 4, 1)
    print(f"episode-final throughput: first quarter {final[:q].mean():.2f}, last quarter {final[-q:].mean():.2f}")

    rows = harness.run_timeline(with_overrides(cfg, seed=args.eval_seed), agent=agent)
    summary = harness.summarize(rows)
    harness.write_slots(rows, f"{out}/heldout_slots.csv")
    harness.write_summary(summary, f"{out}/heldout_summary.csv")
    for s in summary.solvers:
        print(f"{s:>7}: mean {summary.mean_throughput[s]:.2f} bps/Hz")
    m = summary.mean_throughput
    if {"drl", "fixed", "anneal"} <= set(m):
        print(f"drl/fixed {m['drl'] / m['fixed']:.2f}  drl/anneal {m['drl'] / m['anneal']:.2f}")


if __name__ == "__main__":
    main()
