"""Command-line entry point: ``uavdeploy {train,evaluate,sweep,oracle-check}``.

On failure a single JSON line ``{"error": ..., "field": ..., "message": ...}``
goes to stderr and the exit code is nonzero (2 for config errors, 1 otherwise).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import checkpoint as ckpt
from . import harness
from .config import ConfigError, RunConfig, load_config, with_overrides

log = logging.getLogger("uavdeploy")


def _prepare(args) -> tuple[RunConfig, Path]:
    cfg = load_config(args.config)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.out is not None:
        changes["out_dir"] = args.out
    if changes:
        cfg = with_overrides(cfg, **changes)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return cfg, out


def _agent_for(cfg: RunConfig, args, out: Path, solvers):
    if "drl" not in solvers:
        return None
    path = args.checkpoint or cfg.checkpoint or out / "checkpoint.bin"
    return ckpt.load_checkpoint(path)


def cmd_train(args) -> None:
    cfg, out = _prepare(args)
    agent, entries = harness.train_agent(cfg, out)
    log.info("trained %d episodes; checkpoint at %s", len(entries), out / "checkpoint.bin")


def cmd_evaluate(args) -> None:
    cfg, out = _prepare(args)
    solvers = list(cfg.baselines.solvers)
    agent = _agent_for(cfg, args, out, solvers)
    if cfg.experiment == "compare-distributions":
        rows = []
        for kind, summary in harness.compare_distributions(cfg, solvers, agent).items():
            rows += harness.summary_rows(summary, {"distribution": kind})
        harness.write_rows(rows, out / "summary.csv")
        return
    results = harness.run_timeline(cfg, solvers, agent)
    harness.write_slots(results, out / "slots.csv")
    harness.write_summary(harness.summarize(results), out / "summary.csv")


def cmd_sweep(args) -> None:
    cfg, out = _prepare(args)
    solvers = list(cfg.baselines.solvers)
    agent = _agent_for(cfg, args, out, solvers)
    rows = []
    for k, summary in harness.sweep_density(cfg, cfg.k_values, solvers, agent):
        rows += harness.summary_rows(summary, {"num_users": k})
    harness.write_rows(rows, out / "summary.csv")


def cmd_oracle_check(args) -> None:
    cfg, out = _prepare(args)
    rows = harness.oracle_check(cfg, instances=args.instances, resolution=args.resolution)
    harness.write_rows(rows, out / "oracle_check.csv")
    for name in ("anneal", "smooth"):
        hits = sum(r[f"{name}_ratio"] >= 0.95 for r in rows)
        log.info("%s within 95%% of the grid optimum on %d/%d instances", name, hits, len(rows))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uavdeploy", description="UAV base-station placement experiments")
    parser.add_argument("-v", "--verbose", action="store_true", help="log defaulted config fields and progress")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="path to an INI run config")
        p.add_argument("--seed", type=int, default=None, help="master seed (overrides the config)")
        p.add_argument("--out", default=None, help="output directory (overrides the config)")

    p = sub.add_parser("train", help="train the actor-critic agent")
    common(p)
    p.set_defaults(func=cmd_train)

    for name, func, helptext in (("evaluate", cmd_evaluate, "run solvers over a timeline of slots"),
                                 ("sweep", cmd_sweep, "sweep the number of users")):
        p = sub.add_parser(name, help=helptext)
        common(p)
        p.add_argument("--checkpoint", default=None, help="agent checkpoint (default: <out>/checkpoint.bin)")
        p.set_defaults(func=func)

    p = sub.add_parser("oracle-check", help="compare baselines with the grid oracle on 1-UAV instances")
    common(p)
    p.add_argument("--instances", type=int, default=20)
    p.add_argument("--resolution", type=int, default=81)
    p.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except ConfigError as exc:
        print(json.dumps({"error": "ConfigError", "field": exc.field, "message": exc.message}), file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(json.dumps({"error": type(exc).__name__, "field": None, "message": str(exc)}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
