"""Command-line entry point: ``pilqaoa <subcommand> [options]``."""

import argparse
import json
import logging
import sys
from pathlib import Path

from . import bench
from .dataset import SANDBOX_GRID, gen_dataset
from .errors import ConfigurationError, ParseError
from .graphs import read_graph
from .trainer import TRAINERS, TrainConfig

log = logging.getLogger("pilqaoa")


def _common(parser, method_default=None):
    parser.add_argument("--config", type=Path, help="experiment config (JSON)")
    parser.add_argument("--seed", type=int, help="master seed (u64)")
    parser.add_argument("--method", choices=bench.METHODS, default=method_default)
    parser.add_argument("--p", type=int, help="QAOA layers")
    parser.add_argument("--repeats", type=int)
    parser.add_argument("--k", type=int, help="random partitions for early break")
    parser.add_argument("--shots", type=int, help="measurement shots per sampled cut")
    parser.add_argument("--workers", type=int, help="parallel worker processes")
    parser.add_argument("--out", type=Path, help="output directory")


def build_parser():
    parser = argparse.ArgumentParser(prog="pilqaoa", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-dataset", help="write MaxCut-Sandbox graphs and a manifest")
    p.add_argument("--config", type=Path, help="grid spec (JSON); defaults to the full sandbox grid")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", type=Path, default=Path("dataset"))

    for name, help_ in (
        ("bench", "PIL vs standard benchmark"),
        ("forgetting", "anti-forgetting evaluation"),
        ("p-sweep", "benchmark over a list of p values"),
    ):
        sp = sub.add_parser(name, help=help_)
        _common(sp)
        if name == "p-sweep":
            sp.add_argument("--p-list", help="comma-separated p values, e.g. 1,2,3")

    sp = sub.add_parser("solve", help="train one graph file and print the report")
    sp.add_argument("graph", type=Path)
    _common(sp, method_default="pil")
    return parser


def _experiment(args):
    overrides = dict(
        seed=args.seed, p=args.p, repeats=args.repeats, k=args.k, shots=args.shots,
        workers=args.workers, out=args.out, method=args.method,
    )
    if getattr(args, "p_list", None):
        overrides["p_list"] = tuple(int(x) for x in args.p_list.split(","))
    return bench.load_config(args.config, **overrides)


def _solve(args):
    data = json.loads(args.config.read_text()) if args.config else {}
    train = dict(data.get("train", {}))
    for key in ("p", "k", "shots"):
        if getattr(args, key) is not None:
            train[key] = getattr(args, key)
    cfg = TrainConfig.from_dict(train)
    g = read_graph(args.graph)
    seed = args.seed if args.seed is not None else data.get("seed", 0)
    report = TRAINERS[args.method](g, cfg, seed=seed)
    text = json.dumps(report.to_dict(), indent=1, sort_keys=True)
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "report.json").write_text(text + "\n")
    print(text)
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "gen-dataset":
            grid = json.loads(args.config.read_text()) if args.config else SANDBOX_GRID
            seed = args.seed if args.seed is not None else grid.get("seed", 0)
            manifest = gen_dataset(grid, args.out, seed=seed)
            log.info("wrote %d graphs (%d skipped) to %s",
                     len(manifest["instances"]), len(manifest["skipped"]), args.out)
            return 0
        if args.command == "solve":
            return _solve(args)
        cfg = _experiment(args)
        runner = {"bench": bench.run_benchmark, "forgetting": bench.run_forgetting,
                  "p-sweep": bench.run_p_sweep}[args.command]
        rows, ok = runner(cfg)
        log.info("%d rows written to %s", len(rows), cfg.out)
        return 0 if ok else 1
    except (ConfigurationError, ParseError) as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
