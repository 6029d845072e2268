"""Incremental-learning QAOA for MaxCut.

Graph generation, exact grading, dense statevector simulation, phase-wise
training with parameter reuse and early break, and a benchmark harness.
"""

from .graphs import (
    Graph,
    generate_complete,
    generate_random,
    generate_regular,
    induced_subgraph,
    read_graph,
    write_graph,
)
from .metrics import approximation_ratio
from .oracle import cut_value, max_cut_bruteforce, random_partition_max
from .qaoa import OptimizerConfig, ParamVector, best_sampled_cut, evaluate_objective, optimize
from .trainer import TrainConfig, build_schedule, early_break_check, train_pil, train_standard

__version__ = "0.1.0"
