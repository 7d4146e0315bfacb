"""Mean throughput per solver as the number of users grows (nested user sets per slot).

    python3 scripts/density_sweep.py --config configs/desk.ini --k 2 4 8 16 --solvers oracle anneal fixed
"""

import argparse
from pathlib import Path

from uavdeploy import checkpoint as ckpt
from uavdeploy import harness
from uavdeploy.config import load_config


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", required=True)
    ap.add_argument("--k", type=int, nargs="+", default=None)
    ap.add_argument("--solvers", nargs="+", default=None)
    ap.add_argument("--checkpoint", default=None)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    cfg = load_config(args.config)
    solvers = args.solvers or list(cfg.baselines.solvers)
    agent = ckpt.load_checkpoint(args.checkpoint) if "drl" in solvers else None
    table = harness.sweep_density(cfg, args.k or cfg.k_values, solvers, agent)
    rows = []
    print("   K  " + "  ".join(f"{s:>8}" for s in solvers))
    for k, summary in table:
        rows += harness.summary_rows(summary, {"num_users": k})
        print(f"{k:>4}  " + "  ".join(f"{summary.mean_throughput[s]:8.2f}" for s in solvers))
    out = Path(args.out or cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    harness.write_rows(rows, out / "density.csv")


if __name__ == "__main__":
    main()
