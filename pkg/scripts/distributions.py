"""Solver means under uniform and clustered (Gaussian) users.

    python3 scripts/distributions.py --config configs/desk.ini --solvers anneal smooth fixed
"""

import argparse
from pathlib import Path

from uavdeploy import checkpoint as ckpt
from uavdeploy import harness
from uavdeploy.config import load_config


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", required=True)
    ap.add_argument("--solvers", nargs="+", default=None)
    ap.add_argument("--checkpoint", default=None)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    cfg = load_config(args.config)
    solvers = args.solvers or list(cfg.baselines.solvers)
    agent = ckpt.load_checkpoint(args.checkpoint) if "drl" in solvers else None
    rows = []
    for kind, summary in harness.compare_distributions(cfg, solvers, agent).items():
        rows += harness.summary_rows(summary, {"distribution": kind})
        print(f"{kind:>8}: " + ", ".join(f"{s} {summary.mean_throughput[s]:.2f}" for s in solvers))
    out = Path(args.out or cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    harness.write_rows(rows, out / "distributions.csv")


if __name__ == "__main__":
    main()
