"""Incremental (phase-by-phase) QAOA training with parameter reuse.

A random base subgraph is trained first. Each later phase grows the subgraph
by ``stride`` nodes (one by default), starts the optimizer from the previous
phase's optimized angles, and may stop early once the best sampled cut is at
least as good as the best of ``k`` random partitions. The last phase is the
full target graph and always runs to convergence.

Phase graphs are induced subgraphs on prefixes of one node order, so node
``j`` of every phase graph is target node ``node_order[j]``.
"""

import time
from dataclasses import dataclass, field

from .errors import ConfigurationError, TrainingError
from .graphs import induced_subgraph
from .metrics import ratio_with_flag
from .oracle import max_cut_bruteforce, random_partition_max
from .qaoa import OptimizerConfig, ParamVector, Problem, optimize, random_params
from .seeding import derive_seed, make_rng

BASE_RESAMPLE_CAP = 50


@dataclass(frozen=True)
class TrainConfig:
    """Settings shared by the incremental and standard trainers.

    ``break_metric`` selects what is compared against the random-partition
    bar: ``"sampled"`` (best of ``shots`` measurements) or ``"expectation"``.
    """

    p: int = 3
    base_size: int = 4
    k: int = 20
    shots: int = 1024
    stride: int = 1
    break_metric: str = "sampled"
    early_break: bool = True
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)

    def __post_init__(self):
        if self.p < 1:
            raise ConfigurationError(f"p must be >= 1, got {self.p}")
        if self.k < 1 or self.shots < 1:
            raise ConfigurationError("k and shots must be >= 1")
        if self.base_size < 2:
            raise ConfigurationError(f"base_size must be >= 2, got {self.base_size}")
        if self.stride < 1:
            raise ConfigurationError(f"stride must be >= 1, got {self.stride}")
        if self.break_metric not in ("sampled", "expectation"):
            raise ConfigurationError(f"unknown break_metric {self.break_metric!r}")

    def to_dict(self):
        return {
            "p": self.p,
            "base_size": self.base_size,
            "k": self.k,
            "shots": self.shots,
            "stride": self.stride,
            "break_metric": self.break_metric,
            "early_break": self.early_break,
            "optimizer": self.optimizer.to_dict(),
        }

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        opt = d.pop("optimizer", None)
        known = {k: d[k] for k in ("p", "base_size", "k", "shots", "stride", "break_metric", "early_break") if k in d}
        return cls(optimizer=OptimizerConfig(**(opt or {})), **known)


@dataclass(frozen=True)
class PhaseSchedule:
    target: object
    node_order: tuple
    base_size: int
    sizes: tuple

    @property
    def phases(self):
        return [self.node_order[:s] for s in self.sizes]

    def phase_graph(self, t):
        return induced_subgraph(self.target, self.node_order[: self.sizes[t]])[0]


def _phase_sizes(n, base_size, stride):
    sizes = list(range(base_size, n, stride))
    sizes.append(n)
    return tuple(sizes)


def build_schedule(g, base_size=4, seed=0, stride=1):
    """Random node order whose first ``base_size`` nodes form the base graph.

    The base subset is redrawn up to ``BASE_RESAMPLE_CAP`` times until it
    induces at least one edge; failing that, it is seeded with the endpoints
    of a random edge. Edgeless targets skip the requirement.
    """
    if not 2 <= base_size <= g.n:
        raise ValueError(f"base_size must lie in [2, {g.n}], got {base_size}")
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    rng = make_rng(seed)
    order = [int(x) for x in rng.permutation(g.n)]
    if g.num_edges and base_size < g.n:
        for _ in range(BASE_RESAMPLE_CAP):
            if induced_subgraph(g, order[:base_size])[0].num_edges:
                break
            order = [int(x) for x in rng.permutation(g.n)]
        else:
            u, v, _ = g.edges[int(rng.integers(g.num_edges))]
            rest = [x for x in rng.permutation(g.n) if x not in (u, v)]
            order = [u, v] + [int(x) for x in rest]
    return PhaseSchedule(g, tuple(order), base_size, _phase_sizes(g.n, base_size, stride))


@dataclass(frozen=True)
class EarlyBreakDecision:
    stop: bool
    best_cut: float
    random_bar: float


def early_break_check(phase_graph, params, k, m, seed, metric="sampled", problem=None):
    """Compare the current solution with the best of ``k`` random partitions.

    Stops when the current value is ``>=`` the random bar (no tolerance).
    """
    if k < 1 or m < 1:
        raise ValueError("k and m must be >= 1")
    bar = random_partition_max(phase_graph, k, derive_seed(seed, "bar"))
    return _decide(problem or Problem(phase_graph), params, bar, m, derive_seed(seed, "shots"), metric)


def _decide(problem, params, bar, m, seed, metric):
    if metric == "expectation":
        current = problem.objective(params)
    else:
        current = problem.best_sampled_cut(params, m, seed)[0]
    return EarlyBreakDecision(current >= bar, current, bar)


@dataclass
class PhaseResult:
    phase_index: int
    n_nodes: int
    graph_hash: str
    init_params: ParamVector
    final_params: ParamVector
    init_objective: float
    objective: float
    best_cut: float
    random_bar: float
    early_broken: bool
    iterations: int
    evals: int
    wall_time: float

    def to_dict(self):
        d = dict(self.__dict__)
        d["init_params"] = self.init_params.to_dict()
        d["final_params"] = self.final_params.to_dict()
        return d


@dataclass
class TrainReport:
    method: str
    seed: int
    config: TrainConfig
    node_order: tuple
    phase_sizes: tuple
    phase_results: list
    final_params: ParamVector = None
    objective: float = None
    c_a: float = None
    witness: str = None
    c_star: float = None
    ar_sampled: float = None
    ar_expectation: float = None
    total_time: float = None
    flags: tuple = ()

    def to_dict(self):
        return {
            "method": self.method,
            "seed": self.seed,
            "config": self.config.to_dict(),
            "node_order": list(self.node_order),
            "phase_sizes": list(self.phase_sizes),
            "phases": [r.to_dict() for r in self.phase_results],
            "final_params": self.final_params.to_dict() if self.final_params else None,
            "objective": self.objective,
            "c_a": self.c_a,
            "witness": self.witness,
            "c_star": self.c_star,
            "ar_sampled": self.ar_sampled,
            "ar_expectation": self.ar_expectation,
            "total_time": self.total_time,
            "flags": list(self.flags),
        }


def _run_phase(index, graph, init, cfg, phase_seed, breakable):
    problem = Problem(graph)
    bar = random_partition_max(graph, cfg.k, derive_seed(phase_seed, "bar"))
    last = {}
    hook = None
    if breakable and cfg.early_break:
        calls = iter(range(1 << 62))

        def hook(params):
            seed = derive_seed(phase_seed, "shots", next(calls))
            last["decision"] = _decide(problem, params, bar, cfg.shots, seed, cfg.break_metric)
            return last["decision"].stop

    init_objective = problem.objective(init)
    res = optimize(graph, init, cfg.optimizer, stop_hook=hook, problem=problem)
    if res.early_broken:
        best_cut = last["decision"].best_cut
    else:
        best_cut = problem.best_sampled_cut(res.params, cfg.shots, derive_seed(phase_seed, "final"))[0]
    return PhaseResult(
        phase_index=index,
        n_nodes=graph.n,
        graph_hash=graph.digest,
        init_params=init,
        final_params=res.params,
        init_objective=init_objective,
        objective=res.objective,
        best_cut=best_cut,
        random_bar=bar,
        early_broken=res.early_broken,
        iterations=res.iterations,
        evals=res.evals,
        wall_time=res.wall_time,
    )


def _finish(report, g, params, cfg, seed, c_star):
    target = Problem(g)
    report.final_params = params
    report.objective = target.objective(params)
    report.c_a, report.witness = target.best_sampled_cut(params, cfg.shots, derive_seed(seed, "solution"))
    if c_star is None:
        c_star = max_cut_bruteforce(g).c_star
    report.c_star = c_star
    report.ar_sampled, zero = ratio_with_flag(report.c_a, c_star)
    report.ar_expectation = ratio_with_flag(report.objective, c_star)[0]
    if zero:
        report.flags = report.flags + ("zero_optimum",)
    return report


def train_pil(g, cfg=None, seed=0, c_star=None):
    """Incremental training with parameter reuse and early break.

    ``total_time`` covers schedule construction through the end of the last
    phase's optimization. ``c_star`` may be passed in to skip the oracle.
    """
    cfg = cfg or TrainConfig()
    start = time.perf_counter()
    schedule = build_schedule(g, min(cfg.base_size, g.n), derive_seed(seed, "schedule"), cfg.stride)
    report = TrainReport("pil", seed, cfg, schedule.node_order, schedule.sizes, [])
    params = random_params(cfg.p, derive_seed(seed, "init"))
    last = len(schedule.sizes) - 1
    for t in range(len(schedule.sizes)):
        graph = schedule.phase_graph(t)
        breakable = 0 < t < last
        try:
            result = _run_phase(t, graph, params, cfg, derive_seed(seed, "phase", t), breakable)
        except Exception as exc:
            raise TrainingError(f"phase {t} failed: {exc}", partial=report) from exc
        report.phase_results.append(result)
        params = result.final_params
    report.total_time = time.perf_counter() - start
    return _finish(report, g, params, cfg, seed, c_star)


def train_standard(g, cfg=None, seed=0, c_star=None):
    """Baseline: one optimization of the whole graph from a random start."""
    cfg = cfg or TrainConfig()
    start = time.perf_counter()
    order = tuple(range(g.n))
    report = TrainReport("standard", seed, cfg, order, (g.n,), [])
    init = random_params(cfg.p, derive_seed(seed, "init"))
    try:
        result = _run_phase(0, g, init, cfg, derive_seed(seed, "phase", 0), False)
    except Exception as exc:
        raise TrainingError(f"training failed: {exc}", partial=report) from exc
    report.phase_results.append(result)
    report.total_time = time.perf_counter() - start
    return _finish(report, g, result.final_params, cfg, seed, c_star)


TRAINERS = {"pil": train_pil, "standard": train_standard}
