"""Approximation ratio and aggregation helpers."""

import math


def approximation_ratio(c_a, c_star):
    """``c_a / c_star``; a zero optimum yields 1.0 (see :func:`ratio_with_flag`)."""
    return ratio_with_flag(c_a, c_star)[0]


def ratio_with_flag(c_a, c_star):
    """Return ``(ratio, zero_optimum)``.

    Graphs without edges have ``c_star == 0``; every assignment is optimal, so
    the ratio is reported as 1.0 and the flag is set.
    """
    if c_star < 0:
        raise ValueError(f"optimal cut must be non-negative, got {c_star!r}")
    if c_star == 0:
        return 1.0, True
    return c_a / c_star, False


def mean(values):
    values = list(values)
    return math.fsum(values) / len(values)
