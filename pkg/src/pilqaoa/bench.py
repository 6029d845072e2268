"""Experiment harness: repeated PIL/standard runs, forgetting and p sweeps.

Every run gets its own seed derived from the master seed, the instance id and
the repeat index, so results do not depend on worker scheduling. Outputs are
a CSV summary and a JSON detail file with every train report; apart from the
timing fields, both are byte-identical for a given config and master seed.
"""

import csv
import io
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from .dataset import DatasetSpec, expand_grid, instance_id, load_manifest
from .errors import ConfigurationError, ParseError
from .graphs import generate_complete, generate_random, induced_subgraph
from .metrics import mean, ratio_with_flag
from .oracle import max_cut_bruteforce
from .qaoa import Problem
from .seeding import derive_seed
from .trainer import TRAINERS, TrainConfig

logger = logging.getLogger(__name__)

CSV_COLUMNS = [
    "instance", "family", "n", "ep_or_d", "weighted", "method", "p",
    "ar_max", "ar_avg", "time_avg_s", "flags",
]
FORGETTING_COLUMNS = [
    "instance", "family", "old_n", "new_n", "method", "p",
    "trained_ar_max", "trained_ar_avg", "forgetting_ar_max", "forgetting_ar_avg",
    "time_avg_s", "flags",
]
TIMING_KEYS = {"total_time", "wall_time", "time_avg_s"}
METHODS = ("pil", "standard")


@dataclass
class ExperimentConfig:
    instances: list = field(default_factory=list)
    methods: tuple = METHODS
    p: int = 3
    p_list: tuple = (1, 2, 3, 4, 5)
    repeats: int = 10
    train: TrainConfig = field(default_factory=TrainConfig)
    seed: int = 0
    workers: int = None
    out: str = "results"
    forgetting: dict = None

    def __post_init__(self):
        if self.repeats < 1:
            raise ConfigurationError(f"repeats must be >= 1, got {self.repeats}")
        if self.p < 1:
            raise ConfigurationError(f"p must be >= 1, got {self.p}")
        unknown = set(self.methods) - set(METHODS)
        if unknown or not self.methods:
            raise ConfigurationError(f"methods must be a non-empty subset of {METHODS}")

    def train_config(self, p=None):
        return replace(self.train, p=p or self.p)

    def to_dict(self):
        return {
            "instances": [s.to_dict() for s, _, _ in self.instances],
            "methods": list(self.methods),
            "p": self.p,
            "p_list": list(self.p_list),
            "repeats": self.repeats,
            "train": self.train.to_dict(),
            "seed": self.seed,
            "forgetting": self.forgetting,
        }


def _resolve_instances(raw, base_dir, seed):
    """Dataset section of a config -> ``[(spec, graph, c_star_or_None)]``."""
    if raw is None:
        return []
    if isinstance(raw, list):
        specs = [DatasetSpec.from_dict(d) for d in raw]
        return [(s, s.generate(), None) for s in specs]
    if "manifest" in raw:
        return load_manifest(Path(base_dir) / raw["manifest"])
    if "grid" in raw:
        specs, _ = expand_grid(raw["grid"], raw.get("seed", seed))
        return [(s, s.generate(), None) for s in specs]
    raise ConfigurationError("dataset must be a list of specs, {'manifest': path} or {'grid': {...}}")


def load_config(path=None, data=None, **overrides):
    """Build an :class:`ExperimentConfig` from a JSON file and CLI overrides.

    Overrides with value ``None`` are ignored. Recognized override keys are
    the config fields plus ``k``, ``shots`` and ``method``.
    """
    base_dir = "."
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc.msg}", exc.lineno) from None
        base_dir = Path(path).parent
    data = dict(data or {})
    overrides = {k: v for k, v in overrides.items() if v is not None}
    train = dict(data.get("train", {}))
    for key in ("k", "shots"):
        if key in overrides:
            train[key] = overrides.pop(key)
    if "method" in overrides:
        overrides["methods"] = (overrides.pop("method"),)
    seed = int(overrides.pop("seed", data.get("seed", 0)))
    try:
        train_cfg = TrainConfig.from_dict(train)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"bad train settings: {exc}") from None
    cfg = ExperimentConfig(
        instances=_resolve_instances(data.get("dataset"), base_dir, seed),
        methods=tuple(overrides.pop("methods", data.get("methods", METHODS))),
        p=int(overrides.pop("p", data.get("p", 3))),
        p_list=tuple(overrides.pop("p_list", data.get("p_list", (1, 2, 3, 4, 5)))),
        repeats=int(overrides.pop("repeats", data.get("repeats", 10))),
        train=train_cfg,
        seed=seed,
        workers=overrides.pop("workers", data.get("workers")),
        out=str(overrides.pop("out", data.get("out", "results"))),
        forgetting=data.get("forgetting"),
    )
    if overrides:
        raise ConfigurationError(f"unknown overrides {sorted(overrides)}")
    return cfg


def run_seed(master, inst_id, repeat):
    return derive_seed(master, "run", inst_id, repeat)


def _run_job(job):
    method, graph, train_cfg, seed, c_star = job
    try:
        report = TRAINERS[method](graph, train_cfg, seed=seed, c_star=c_star)
        return report.to_dict(), None
    except Exception as exc:  # recorded as a flagged row
        logger.exception("run failed (%s, seed=%d)", method, seed)
        return None, f"{type(exc).__name__}: {exc}"


def _map(fn, jobs, workers):
    workers = workers or os.cpu_count() or 1
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def _oracle_cache(instances):
    cache = {}
    for _, g, c_star in instances:
        if g.digest not in cache:
            cache[g.digest] = c_star if c_star is not None else max_cut_bruteforce(g).c_star
    return cache


def _fmt(x):
    return repr(float(x)) if isinstance(x, float) else str(x)


def _write_csv(path, columns, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])
    Path(path).write_text(buf.getvalue())


def _write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n")


def _aggregate(reports, errors):
    flags = set()
    if errors:
        flags.add("failed")
    good = [r for r in reports if r is not None]
    if not good:
        return float("nan"), float("nan"), float("nan"), flags
    ars = [r["ar_sampled"] for r in good]
    for r in good:
        flags.update(r["flags"])
    return max(ars), mean(ars), mean(r["total_time"] for r in good), flags


def _bench_rows(cfg, p, oracle):
    train_cfg = cfg.train_config(p)
    keys, jobs = [], []
    for spec, g, _ in cfg.instances:
        for method in cfg.methods:
            for r in range(cfg.repeats):
                seed = run_seed(cfg.seed, spec.instance_id, r)
                keys.append((spec, method, r, seed))
                jobs.append((method, g, train_cfg, seed, oracle[g.digest]))
    outcomes = _map(_run_job, jobs, cfg.workers)

    rows, runs = [], []
    grouped = {}
    for (spec, method, r, seed), (report, err) in zip(keys, outcomes):
        runs.append({"instance": spec.instance_id, "method": method, "p": p, "repeat": r,
                     "seed": seed, "report": report, "error": err})
        grouped.setdefault((spec, method), []).append((report, err))
    for (spec, method), items in grouped.items():
        reports = [rep for rep, _ in items]
        errors = [e for _, e in items if e]
        ar_max, ar_avg, t_avg, flags = _aggregate(reports, errors)
        rows.append({
            "instance": spec.instance_id, "family": spec.family, "n": spec.n,
            "ep_or_d": spec.ep_or_d, "weighted": int(spec.weighted), "method": method,
            "p": p, "ar_max": ar_max, "ar_avg": ar_avg, "time_avg_s": t_avg,
            "flags": ";".join(sorted(flags)),
        })
    return rows, runs


def _detail(cfg, oracle, runs):
    return {"config": cfg.to_dict(), "oracle": oracle, "runs": runs}


def run_benchmark(cfg, out=None, prefix="bench"):
    """Repeated runs per (instance, method); writes ``<prefix>.csv`` and ``<prefix>_detail.json``.

    Returns:
        ``(rows, ok)`` where ``ok`` is False if any run failed.
    """
    out = Path(out or cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    oracle = _oracle_cache(cfg.instances)
    rows, runs = _bench_rows(cfg, cfg.p, oracle)
    _write_csv(out / f"{prefix}.csv", CSV_COLUMNS, rows)
    _write_json(out / f"{prefix}_detail.json", _detail(cfg, oracle, runs))
    return rows, not any(run["error"] for run in runs)


def run_p_sweep(cfg, out=None, prefix="p_sweep"):
    """Benchmark rows for each p in ``cfg.p_list`` (same run seeds for every p)."""
    if not cfg.p_list:
        raise ConfigurationError("p_list must be non-empty")
    out = Path(out or cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    oracle = _oracle_cache(cfg.instances)
    rows, runs = [], []
    for p in cfg.p_list:
        r, x = _bench_rows(cfg, int(p), oracle)
        rows += r
        runs += x
    _write_csv(out / f"{prefix}.csv", CSV_COLUMNS, rows)
    _write_json(out / f"{prefix}_detail.json", _detail(cfg, oracle, runs))
    return rows, not any(run["error"] for run in runs)


def grow_family(family, old_n, max_n, weighted, seed, ep=None):
    """Nested graphs for the forgetting study.

    Returns the largest graph; the graph on ``k`` nodes is its induced
    subgraph on nodes ``0..k-1``, so the old graph keeps its labels inside
    every new graph. Random families are redrawn until the old graph has an
    edge.
    """
    if family == "complete":
        return generate_complete(max_n, weighted, seed)
    if family != "random":
        raise ConfigurationError(f"forgetting study cannot grow a {family!r} graph")
    for attempt in range(1000):
        g = generate_random(max_n, ep, weighted, derive_seed(seed, "grow", attempt))
        if induced_subgraph(g, range(old_n))[0].num_edges:
            return g
    raise ConfigurationError(f"could not draw an old graph with edges (ep={ep})")


def _forgetting_cases(cfg):
    fc = cfg.forgetting or {}
    old_n = int(fc.get("old_n", 4))
    new_sizes = [int(x) for x in fc.get("new_sizes", (6, 8, 10))]
    weighted = bool(fc.get("weighted", False))
    families = fc.get("families") or [{"family": "complete"},
                                      {"family": "random", "ep": 0.2},
                                      {"family": "random", "ep": 0.8}]
    if not new_sizes or min(new_sizes) < old_n:
        raise ConfigurationError(f"new sizes must be >= old_n={old_n}")
    cases = []
    for fam in families:
        family, ep = fam["family"], fam.get("ep")
        iid = "forget-" + instance_id(family, old_n, weighted, ep=ep, d=fam.get("d"))
        big = grow_family(family, old_n, max(new_sizes), weighted, derive_seed(cfg.seed, iid), ep=ep)
        old = induced_subgraph(big, range(old_n))[0]
        news = {}
        for size in new_sizes:
            new, mapping = induced_subgraph(big, range(size))
            if induced_subgraph(new, mapping[:old_n])[0] != old:
                raise ConfigurationError(f"{iid}: old graph is not embedded in the {size}-node graph")
            news[size] = new
        cases.append((iid, family, ep, old, news))
    return old_n, new_sizes, cases


def _forget_job(job):
    method, new, old, train_cfg, seed, c_new, c_old = job
    try:
        rep = TRAINERS[method](new, train_cfg, seed=seed, c_star=c_new)
        params = rep.final_params
        # same sampling seed as the report's own solution so old == new reproduces it
        c_a, _ = Problem(old).best_sampled_cut(params, train_cfg.shots, derive_seed(seed, "solution"))
        ar, zero = ratio_with_flag(c_a, c_old)
        return {"report": rep.to_dict(), "old_cut": c_a, "old_ar": ar, "zero_optimum": zero}, None
    except Exception as exc:
        logger.exception("forgetting run failed (%s, seed=%d)", method, seed)
        return None, f"{type(exc).__name__}: {exc}"


def run_forgetting(cfg, out=None, prefix="forgetting"):
    """Apply parameters trained on grown graphs back to the original small graph."""
    out = Path(out or cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    old_n, new_sizes, cases = _forgetting_cases(cfg)
    train_cfg = cfg.train_config()
    keys, jobs = [], []
    for iid, family, ep, old, news in cases:
        c_old = max_cut_bruteforce(old).c_star
        for method in cfg.methods:
            for size in [old_n] + new_sizes:
                g = old if size == old_n else news[size]
                c_new = max_cut_bruteforce(g).c_star
                for r in range(cfg.repeats):
                    seed = run_seed(cfg.seed, iid, r)
                    keys.append((iid, family, ep, method, size, r, seed))
                    jobs.append((method, g, old, train_cfg, seed, c_new, c_old))
    outcomes = _map(_forget_job, jobs, cfg.workers)

    grouped, runs = {}, []
    for (iid, family, ep, method, size, r, seed), (res, err) in zip(keys, outcomes):
        runs.append({"instance": iid, "method": method, "new_n": size, "repeat": r,
                     "seed": seed, "result": res, "error": err})
        grouped.setdefault((iid, family, ep, method), {}).setdefault(size, []).append((res, err))

    rows = []
    for (iid, family, ep, method), by_size in grouped.items():
        trained = [res for res, _ in by_size[old_n] if res]
        tr = [x["old_ar"] for x in trained]
        for size in new_sizes:
            items = by_size[size]
            good = [res for res, _ in items if res]
            flags = set()
            if any(e for _, e in items) or len(trained) < cfg.repeats:
                flags.add("failed")
            if any(x["zero_optimum"] for x in good):
                flags.add("zero_optimum")
            fa = [x["old_ar"] for x in good]
            nan = float("nan")
            rows.append({
                "instance": iid, "family": family if ep is None else f"{family}-ep{ep}",
                "old_n": old_n, "new_n": size, "method": method, "p": train_cfg.p,
                "trained_ar_max": max(tr) if tr else nan,
                "trained_ar_avg": mean(tr) if tr else nan,
                "forgetting_ar_max": max(fa) if fa else nan,
                "forgetting_ar_avg": mean(fa) if fa else nan,
                "time_avg_s": mean(x["report"]["total_time"] for x in good) if good else nan,
                "flags": ";".join(sorted(flags)),
            })
    _write_csv(out / f"{prefix}.csv", FORGETTING_COLUMNS, rows)
    detail = {"config": cfg.to_dict(), "old_graphs": {c[0]: c[3].to_text() for c in cases}, "runs": runs}
    _write_json(out / f"{prefix}_detail.json", detail)
    return rows, not any(run["error"] for run in runs)


def strip_timing(obj):
    """Copy of a detail-JSON object with timing fields removed."""
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k not in TIMING_KEYS}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


def strip_timing_csv(text):
    """CSV text with the timing column dropped."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        return ""
    keep = [i for i, c in enumerate(rows[0]) if c not in TIMING_KEYS]
    return "\n".join(",".join(r[i] for i in keep) for r in rows)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))

