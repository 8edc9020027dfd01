"""Weighted Euclidean (geometric) median.

Minimises ``C(x) = sum_j w_j * ||x - x_j||`` over ``x`` in R^d by
iteratively reweighted least squares. Two reweighting rules are offered:

``weiszfeld``
    ``mu_j = w_j / ||x - x_j||``. When the iterate comes within
    ``snap_epsilon`` of a data point it jumps onto that point, checks the
    subgradient optimality condition there, and if the point is not optimal
    leaves it with the Vardi-Zhang step.
``irls``
    ``mu_j = w_j / sqrt(||x - x_j||^2 + eps_k^2)`` with ``eps_0 =
    bias_initial`` and ``eps_{k+1} = max(bias_shrink * eps_k, bias_floor)``.

Both start from the weighted mean. On exit the data point nearest the
last iterate is tested for optimality and returned exactly if it passes,
which rescues the slow approach to medians that sit on a data point (the
1-D case, for one). The numerical core is a numba function
so that the image denoiser can call it from compiled per-pixel loops.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numba import njit

from .errors import DegenerateWeightsError, InvalidInputError, InvalidParameterError

WEISZFELD = 0
IRLS = 1
_ALGORITHMS = {"weiszfeld": WEISZFELD, "irls": IRLS}


@dataclass(frozen=True)
class MedianSolverConfig:
    """Solver settings. Defaults keep the solver error far below one grey level."""

    algorithm: Literal["weiszfeld", "irls"] = "irls"
    snap_epsilon: float = 1e-6
    bias_initial: float = 1.0
    bias_shrink: float = 0.1
    bias_floor: float = 1e-8
    step_tolerance: float = 1e-6
    max_iterations: int = 20

    def __post_init__(self):
        if self.algorithm not in _ALGORITHMS:
            raise InvalidParameterError(f"unknown algorithm {self.algorithm!r}")
        if not self.snap_epsilon > 0:
            raise InvalidParameterError("snap_epsilon must be > 0")
        if not self.bias_initial > 0:
            raise InvalidParameterError("bias_initial must be > 0")
        if not 0 < self.bias_shrink < 1:
            raise InvalidParameterError("bias_shrink must lie in (0, 1)")
        if not self.bias_floor >= 0:
            raise InvalidParameterError("bias_floor must be >= 0")
        if not self.step_tolerance > 0:
            raise InvalidParameterError("step_tolerance must be > 0")
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise InvalidParameterError("max_iterations must be a positive integer")

    @property
    def algorithm_code(self) -> int:
        return _ALGORITHMS[self.algorithm]


@dataclass
class MedianResult:
    point: np.ndarray
    iterations: int
    final_cost: float
    converged: bool
    path: np.ndarray | None = None


@njit(cache=True)
def _cost(points, weights, x):
    n, d = points.shape
    total = 0.0
    for j in range(n):
        s = 0.0
        for a in range(d):
            diff = x[a] - points[j, a]
            s += diff * diff
        total += weights[j] * math.sqrt(s)
    return total


# reassociation lets the length-d reductions vectorise; NaN/Inf semantics kept
FASTMATH = {"nsz", "contract", "reassoc"}


@njit(cache=True, fastmath=FASTMATH)
def solve_median(points, weights, algorithm, snap_epsilon, bias_initial,
                 bias_shrink, bias_floor, step_tolerance, max_iterations, path):
    """Compiled solver core.

    Returns ``(x, iterations, converged)``. If ``path`` has at least
    ``max_iterations + 1`` rows, the starting point and every iterate are
    written to it (row 0 is the start); pass a zero-row array to skip.
    Inputs are assumed validated.
    """
    n, d = points.shape
    record = path.shape[0] > 0
    x = np.zeros(d)
    dist = np.empty(n)
    mu = np.empty(n)

    total = 0.0
    imax = 0
    for j in range(n):
        total += weights[j]
        if weights[j] > weights[imax]:
            imax = j
    # majority weight: that point is a minimiser
    if weights[imax] >= total - weights[imax]:
        for a in range(d):
            x[a] = points[imax, a]
        if record:
            path[0, :] = x
        return x, 0, True

    for j in range(n):
        for a in range(d):
            x[a] += weights[j] * points[j, a]
    for a in range(d):
        x[a] /= total
    if record:
        path[0, :] = x

    x_new = np.empty(d)
    resid = np.empty(d)
    bias = bias_initial
    iterations = 0
    converged = False
    for it in range(max_iterations):
        nearest = -1
        for j in range(n):
            s = 0.0
            for a in range(d):
                diff = x[a] - points[j, a]
                s += diff * diff
            dist[j] = math.sqrt(s)
            if weights[j] > 0.0 and (nearest < 0 or dist[j] < dist[nearest]):
                nearest = j

        if algorithm == WEISZFELD and dist[nearest] < snap_epsilon:
            # snap onto the data point and test 0 in subdifferential
            rnorm, w_at, musum = _vertex_residual(points, weights, nearest, resid, x_new)
            if rnorm <= w_at:
                for a in range(d):
                    x[a] = points[nearest, a]
                iterations = it + 1
                if record:
                    path[iterations, :] = x
                converged = True
                break
            # Vardi-Zhang: move towards the Weiszfeld map taken without the
            # snapped point, shortened by w_at / ||R||
            lam = 1.0 - w_at / rnorm
            for a in range(d):
                x_new[a] = points[nearest, a] + lam * (x_new[a] / musum - points[nearest, a])
        else:
            musum = 0.0
            for a in range(d):
                x_new[a] = 0.0
            for j in range(n):
                if weights[j] == 0.0:
                    mu[j] = 0.0
                    continue
                if algorithm == WEISZFELD:
                    mu[j] = weights[j] / dist[j]
                else:
                    mu[j] = weights[j] / math.sqrt(dist[j] * dist[j] + bias * bias)
                musum += mu[j]
                for a in range(d):
                    x_new[a] += mu[j] * points[j, a]
            for a in range(d):
                x_new[a] /= musum
            if algorithm == IRLS:
                bias = max(bias * bias_shrink, bias_floor)

        step = 0.0
        xnorm = 0.0
        for a in range(d):
            diff = x_new[a] - x[a]
            step += diff * diff
            xnorm += x[a] * x[a]
            x[a] = x_new[a]
        iterations = it + 1
        if record:
            path[iterations, :] = x
        if math.sqrt(step) <= step_tolerance * (1.0 + math.sqrt(xnorm)):
            converged = True
            break

    # Both reweighting rules approach a median sitting on a data point only
    # sublinearly, so finish by testing the data point nearest the last
    # iterate (distances from the previous sweep) for exact optimality.
    if iterations > 0:
        rnorm, w_at, _ = _vertex_residual(points, weights, nearest, resid, x_new)
        if rnorm <= w_at:
            for a in range(d):
                x[a] = points[nearest, a]
            converged = True
            if record:
                path[iterations, :] = x
    return x, iterations, converged


@njit(cache=True, fastmath=FASTMATH)
def _vertex_residual(points, weights, i, resid, acc):
    """Subgradient data at data point ``i``.

    Fills ``resid`` with ``R = sum_{j: x_j != x_i} w_j (x_i - x_j) / ||x_i - x_j||``
    and ``acc`` with the matching ``sum mu_j x_j``; returns ``(||R||, weight
    sitting on x_i, sum mu_j)``. ``x_i`` is optimal iff ``||R|| <= weight``.
    """
    n, d = points.shape
    w_at = 0.0
    musum = 0.0
    for a in range(d):
        resid[a] = 0.0
        acc[a] = 0.0
    for j in range(n):
        s = 0.0
        for a in range(d):
            diff = points[i, a] - points[j, a]
            s += diff * diff
        dj = math.sqrt(s)
        if dj == 0.0:
            w_at += weights[j]
        elif weights[j] > 0.0:
            m = weights[j] / dj
            musum += m
            for a in range(d):
                resid[a] += m * (points[i, a] - points[j, a])
                acc[a] += m * points[j, a]
    rnorm = 0.0
    for a in range(d):
        rnorm += resid[a] * resid[a]
    return math.sqrt(rnorm), w_at, musum


def _validate(points, weights):
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
        raise InvalidInputError(f"points must be an (n, d) array, got shape {pts.shape}")
    w = np.asarray(weights, dtype=np.float64).ravel()
    if w.shape[0] != pts.shape[0]:
        raise InvalidInputError(f"{pts.shape[0]} points but {w.shape[0]} weights")
    if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(w))):
        raise InvalidInputError("points and weights must be finite")
    if np.any(w < 0):
        raise InvalidInputError("weights must be nonnegative")
    if not np.any(w > 0):
        raise DegenerateWeightsError("at least one weight must be positive")
    return np.ascontiguousarray(pts), np.ascontiguousarray(w)


def weighted_mean(points, weights) -> np.ndarray:
    """``sum_j w_j x_j / sum_j w_j``."""
    pts, w = _validate(points, weights)
    return w @ pts / w.sum()


def median_cost(points, weights, x) -> float:
    """``sum_j w_j ||x - x_j||``."""
    pts, w = _validate(points, weights)
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.shape[0] != pts.shape[1]:
        raise InvalidInputError(f"x has dimension {x.shape[0]}, points have {pts.shape[1]}")
    return float(_cost(pts, w, x))


def euclidean_median(points, weights, cfg: MedianSolverConfig | None = None,
                     record_path: bool = False) -> MedianResult:
    """Weighted geometric median of the rows of ``points``.

    Non-convergence within ``cfg.max_iterations`` is reported through
    ``MedianResult.converged`` rather than raised.
    """
    cfg = cfg or MedianSolverConfig()
    pts, w = _validate(points, weights)
    rows = cfg.max_iterations + 1 if record_path else 0
    path = np.zeros((rows, pts.shape[1]))
    x, iters, conv = solve_median(pts, w, cfg.algorithm_code, cfg.snap_epsilon,
                                  cfg.bias_initial, cfg.bias_shrink, cfg.bias_floor,
                                  cfg.step_tolerance, cfg.max_iterations, path)
    return MedianResult(point=x, iterations=int(iters), final_cost=float(_cost(pts, w, x)),
                        converged=bool(conv), path=path[:iters + 1] if record_path else None)
