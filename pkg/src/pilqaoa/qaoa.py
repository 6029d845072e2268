"""Standard QAOA ansatz for MaxCut: objective, sampled solutions and training."""

import math
import time
from dataclasses import dataclass, asdict

import numpy as np

from . import cobyla
from .seeding import make_rng
from .oracle import bits_to_str, index_to_bits
from .statevector import build_cut_table, qaoa_amplitudes, qaoa_state, sample_indices


@dataclass(frozen=True)
class ParamVector:
    """The 2p angles of a p-layer ansatz. Independent of graph size."""

    gammas: tuple
    betas: tuple

    def __post_init__(self):
        gammas = tuple(float(x) for x in self.gammas)
        betas = tuple(float(x) for x in self.betas)
        if len(gammas) != len(betas) or not gammas:
            raise ValueError(f"need p >= 1 gammas and betas, got {len(gammas)} and {len(betas)}")
        if not all(math.isfinite(x) for x in gammas + betas):
            raise ValueError("parameters must be finite")
        object.__setattr__(self, "gammas", gammas)
        object.__setattr__(self, "betas", betas)

    @property
    def p(self):
        return len(self.gammas)

    def to_array(self):
        return np.array(self.gammas + self.betas)

    @classmethod
    def from_array(cls, arr):
        arr = np.asarray(arr, dtype=float)
        p = arr.size // 2
        return cls(tuple(arr[:p]), tuple(arr[p:]))

    @classmethod
    def zeros(cls, p):
        return cls((0.0,) * p, (0.0,) * p)

    def to_dict(self):
        return {"gammas": list(self.gammas), "betas": list(self.betas)}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["gammas"]), tuple(d["betas"]))


def random_params(p, seed):
    """gamma ~ U[0, 2pi), beta ~ U[0, pi), i.i.d."""
    rng = make_rng(seed)
    gammas = rng.uniform(0.0, 2 * np.pi, p)
    betas = rng.uniform(0.0, np.pi, p)
    return ParamVector(tuple(gammas), tuple(betas))


@dataclass(frozen=True)
class OptimizerConfig:
    max_iters: int = 500
    rho_begin: float = 0.5
    rho_end: float = 1e-4

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if not 0 < self.rho_end <= self.rho_begin:
            raise ValueError("need 0 < rho_end <= rho_begin")

    def to_dict(self):
        return asdict(self)


@dataclass
class OptimResult:
    params: ParamVector
    objective: float
    iterations: int
    evals: int
    early_broken: bool
    wall_time: float
    status: str


class Problem:
    """A graph with its cut table, reused across many circuit evaluations."""

    def __init__(self, graph):
        self.graph = graph
        self.table = build_cut_table(graph)

    def state(self, params):
        return qaoa_state(self.table, params.gammas, params.betas)

    def objective(self, params):
        return self.objective_array(params.to_array())

    def objective_array(self, x):
        """<C> for a flat ``[gammas..., betas...]`` array, skipping validation."""
        p = len(x) // 2
        amps = qaoa_amplitudes(self.table, x[:p], x[p:])
        return float(np.dot(amps.real**2 + amps.imag**2, self.table.values))

    def best_sampled_cut(self, params, m, seed):
        idx = sample_indices(self.state(params), m, seed)
        vals = self.table.values[idx]
        best = vals.max()
        pick = int(idx[vals == best].min())
        return float(best), bits_to_str(index_to_bits(pick, self.graph.n))


def evaluate_objective(g, params):
    """Exact <C> of the p-layer circuit on ``g``."""
    return Problem(g).objective(params)


def best_sampled_cut(g, params, m, seed):
    """Best cut among ``m`` measurement shots; returns ``(value, witness)``."""
    return Problem(g).best_sampled_cut(params, m, seed)


def optimize(g, init, cfg=None, stop_hook=None, problem=None):
    """Maximize <C> over the 2p angles, starting from ``init``.

    ``stop_hook(params)`` runs on the starting point and after each iterate
    that improves the best point; a truthy return ends the run early with
    ``early_broken=True``.
    """
    cfg = cfg or OptimizerConfig()
    problem = problem or Problem(g)

    def negated(x):
        return -problem.objective_array(x)

    callback = None
    if stop_hook is not None:
        def callback(x):
            return bool(stop_hook(ParamVector.from_array(x)))

    start = time.perf_counter()
    res = cobyla.minimize(
        negated,
        init.to_array(),
        rho_begin=cfg.rho_begin,
        rho_end=cfg.rho_end,
        max_iters=cfg.max_iters,
        callback=callback,
    )
    elapsed = time.perf_counter() - start
    params = ParamVector.from_array(res.x)
    return OptimResult(
        params=params,
        objective=-res.fun,
        iterations=res.iterations,
        evals=res.evals,
        early_broken=res.status == "stopped",
        wall_time=elapsed,
        status=res.status,
    )
