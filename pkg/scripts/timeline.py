"""Per-slot throughput of every solver over a timeline, plus the summary table.

    python3 scripts/timeline.py --config configs/desk.ini --checkpoint runs/desk/checkpoint.bin
"""

import argparse
from pathlib import Path

from uavdeploy import checkpoint as ckpt
from uavdeploy import harness
from uavdeploy.config import load_config, with_overrides


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", required=True)
    ap.add_argument("--checkpoint", default=None, help="needed when drl is among the solvers")
    ap.add_argument("--solvers", nargs="+", default=None)
    ap.add_argument("--slots", type=int, default=None)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    cfg = load_config(args.config)
    if args.slots:
        cfg = with_overrides(cfg, **{"scenario.num_slots": args.slots})
    solvers = args.solvers or list(cfg.baselines.solvers)
    agent = ckpt.load_checkpoint(args.checkpoint) if "drl" in solvers else None
    rows = harness.run_timeline(cfg, solvers, agent)
    summary = harness.summarize(rows)

    out = Path(args.out or cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    harness.write_slots(rows, out / "slots.csv")
    harness.write_summary(summary, out / "summary.csv")
    print("slot  " + "  ".join(f"{s:>8}" for s in solvers))
    for r in rows:
        print(f"{r.time_slot:>4}  " + "  ".join(f"{r.throughput[s]:8.2f}" for s in solvers))
    print("mean  " + "  ".join(f"{summary.mean_throughput[s]:8.2f}" for s in solvers))
    for a in solvers:
        for b in solvers:
            if a != b:
                print(f"{a} better than {b} in {summary.fraction_better[a][b]:.0%} of slots")


if __name__ == "__main__":
    main()
