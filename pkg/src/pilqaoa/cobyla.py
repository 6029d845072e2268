"""Derivative-free minimization by linear approximation in a trust region.

This is the unconstrained case of Powell's COBYLA. A simplex of ``N + 1``
points (``N`` = number of variables) defines a linear interpolation model.
Each iteration makes exactly one function evaluation, either

* a trust-region step of length ``rho`` down the model gradient, or
* a geometry step that replaces a badly placed vertex when the simplex has
  degenerated,

and ``rho`` is halved whenever the model stops producing progress on an
acceptable simplex. The run ends when ``rho`` reaches ``rho_end``, after
``max_iters`` evaluations past the starting point, or when the callback asks
to stop.

The vertex with the lowest value is always kept as the simplex base, so the
returned point is the best one evaluated.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError

logger = logging.getLogger(__name__)

# Powell's simplex acceptability constants
_ALPHA = 0.25  # min vertex distance from the opposite face, in units of rho
_BETA = 2.1  # max vertex distance from the base, in units of rho
_GAMMA = 0.5  # geometry step length, in units of rho
_POOR_RATIO = 0.1


@dataclass
class MinimizeResult:
    x: np.ndarray
    fun: float
    iterations: int
    evals: int
    status: str  # "converged" | "max_iters" | "stopped"
    rho: float


def _evaluate(fun, x):
    f = float(fun(x))
    if not math.isfinite(f):
        raise NumericalError(f"objective returned {f!r}", iterate=x)
    return f


def minimize(fun, x0, rho_begin=0.5, rho_end=1e-4, max_iters=500, callback=None):
    """Minimize ``fun`` starting from ``x0``.

    Args:
        fun: Objective, called with a float64 array.
        x0: Starting point.
        rho_begin: Initial trust radius.
        rho_end: Final trust radius; the convergence tolerance.
        max_iters: Cap on function evaluations after the one at ``x0``.
        callback: Called with a copy of the current best point at the start
            and after every iteration that improves it. A truthy return value
            stops the run with status ``"stopped"``.
    """
    if not (rho_begin > 0 and rho_end > 0 and rho_end <= rho_begin):
        raise ValueError(f"need 0 < rho_end <= rho_begin, got {rho_end}, {rho_begin}")
    if max_iters < 1:
        raise ValueError(f"max_iters must be >= 1, got {max_iters}")
    x0 = np.array(x0, dtype=float)
    if not np.all(np.isfinite(x0)):
        raise NumericalError("non-finite starting point", iterate=x0)
    n = x0.size
    rho = float(rho_begin)

    base = x0.copy()
    fbase = _evaluate(fun, base)
    iters = 0

    def finish(status):
        return MinimizeResult(base.copy(), fbase, iters, iters + 1, status, rho)

    if callback is not None and callback(base.copy()):
        return finish("stopped")

    # rows of `pts` are the non-base vertices
    pts = np.empty((n, n))
    fvals = np.empty(n)
    for j in range(n):
        if iters >= max_iters:
            return finish("max_iters")
        pts[j] = base
        pts[j, j] += rho
        fvals[j] = _evaluate(fun, pts[j])
        iters += 1
    jbest = int(np.argmin(fvals))
    if fvals[jbest] < fbase:
        pts[jbest], base = base.copy(), pts[jbest].copy()
        fvals[jbest], fbase = fbase, fvals[jbest]
        if callback is not None and callback(base.copy()):
            return finish("stopped")

    need_check = False
    while True:
        offsets = pts - base
        try:
            inv = np.linalg.inv(offsets)
        except np.linalg.LinAlgError:
            inv = np.linalg.pinv(offsets)
        grad = inv @ (fvals - fbase)
        col_norms = np.linalg.norm(inv, axis=0)
        sigma = np.where(col_norms > 0, 1.0 / np.maximum(col_norms, 1e-300), np.inf)
        dist = np.linalg.norm(offsets, axis=1)
        acceptable = bool(np.all(sigma >= _ALPHA * rho) and np.all(dist <= _BETA * rho))
        gnorm = float(np.linalg.norm(grad))

        if need_check or gnorm == 0.0:
            need_check = False
            if not acceptable:
                if iters >= max_iters:
                    return finish("max_iters")
                if np.any(dist > _BETA * rho):
                    j = int(np.argmax(dist))
                else:
                    j = int(np.argmin(sigma))
                normal = inv[:, j] / col_norms[j]
                if grad @ normal > 0:
                    normal = -normal
                xnew = base + _GAMMA * rho * normal
                fnew = _evaluate(fun, xnew)
                iters += 1
                pts[j], fvals[j] = xnew, fnew
                if fnew < fbase:
                    pts[j], base = base.copy(), xnew
                    fvals[j], fbase = fbase, fnew
                    if callback is not None and callback(base.copy()):
                        return finish("stopped")
                continue
            if rho <= rho_end:
                return finish("converged")
            rho *= 0.5
            if rho <= 1.5 * rho_end:
                rho = rho_end
            logger.debug("rho -> %g at f=%g", rho, fbase)
            continue

        if iters >= max_iters:
            return finish("max_iters")
        step = -rho * grad / gnorm
        xnew = base + step
        fnew = _evaluate(fun, xnew)
        iters += 1
        ratio = (fbase - fnew) / (rho * gnorm)

        # coordinates of the step in the simplex basis decide which vertex to drop
        lam = step @ inv
        candidates = np.abs(lam) * np.maximum(1.0, np.linalg.norm(pts - xnew, axis=1) / rho) ** 2
        improved = fnew < fbase
        if improved:
            lam_base = abs(1.0 - lam.sum()) * max(1.0, float(np.linalg.norm(step)) / rho) ** 2
        else:
            lam_base = -1.0
        j = int(np.argmax(candidates))
        if improved and lam_base > candidates[j]:
            # drop the old base; the new point takes its place
            base, fbase = xnew, fnew
        elif candidates[j] > 0:
            pts[j], fvals[j] = xnew, fnew
            if improved:
                pts[j], base = base.copy(), xnew
                fvals[j], fbase = fbase, fnew
        if improved and callback is not None and callback(base.copy()):
            return finish("stopped")
        if ratio <= _POOR_RATIO:
            need_check = True
