"""Non-local means (NLM) and non-local Euclidean medians (NLEM).

For pixel ``i`` every pixel ``j`` of the truncated ``S x S`` search window
gets the weight ``w_ij = exp(-||P_i - P_j||^2 / h^2)`` with ``h = lambda *
sigma`` and ``P`` the mirror-padded ``k x k`` patches. NLM returns the
weighted average of the ``u_j``; NLEM returns the centre coordinate of the
weighted geometric median of the patches ``P_j``.

The per-pixel functions here are straightforward numpy code and serve as
the reference; :func:`denoise_image` runs a compiled kernel over all
pixels that must agree with them.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Literal

import numba
import numpy as np
from numba import njit, prange

from .errors import DegenerateWeightsError, InvalidInputError, InvalidParameterError
from .geomedian import FASTMATH, MedianSolverConfig, euclidean_median, solve_median
from .image import as_image, check_odd, extract_patch, pad_for_patches, search_window

# the bundled TBB is too old for numba; skip straight to OpenMP / workqueue
numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]


@dataclass(frozen=True)
class DenoiseParams:
    """Denoiser parameters; ``h = lam * sigma``."""

    sigma: float
    S: int = 21
    k: int = 7
    lam: float = 10.0
    method: Literal["nlm", "nlem"] = "nlem"
    knn_fraction: float = 1.0

    def __post_init__(self):
        check_odd(self.S, "S")
        check_odd(self.k, "k")
        if not self.lam > 0:
            raise InvalidParameterError("lambda must be > 0")
        if not self.sigma >= 0:
            raise InvalidParameterError("sigma must be >= 0")
        if self.method not in ("nlm", "nlem"):
            raise InvalidParameterError(f"unknown method {self.method!r}")
        if not 0 < self.knn_fraction <= 1:
            raise InvalidParameterError("knn_fraction must lie in (0, 1]")

    @property
    def h(self) -> float:
        return self.lam * self.sigma


@dataclass
class WeightProfile:
    indices: np.ndarray  # (n, 2) rows of (row, col)
    weights: np.ndarray

    def __len__(self):
        return len(self.weights)


@dataclass
class Diagnostics:
    mean_iterations: float
    nonconverged: int
    iterations: np.ndarray | None = None


def patch_weight(Pi, Pj, h: float) -> float:
    Pi = np.asarray(Pi, dtype=np.float64)
    Pj = np.asarray(Pj, dtype=np.float64)
    if Pi.shape != Pj.shape:
        raise InvalidInputError(f"patch sizes differ: {Pi.shape} vs {Pj.shape}")
    if not h > 0:
        raise InvalidParameterError(f"h must be > 0, got {h}")
    diff = Pi - Pj
    return float(np.exp(-np.dot(diff.ravel(), diff.ravel()) / (h * h)))


def _keep_count(fraction: float, n: int) -> int:
    return n if fraction >= 1.0 else max(1, math.ceil(fraction * n))


def compute_weights(img, i, p: DenoiseParams) -> WeightProfile:
    """Weights of every window pixel for pixel ``i``, optionally kNN-truncated.

    With ``knn_fraction < 1`` only the ``ceil(fraction * n)`` largest weights
    are kept; ties go to the earlier pixel in row-major order. Retained
    entries stay in row-major order.
    """
    img = as_image(img)
    h = p.h
    if not h > 0:
        raise InvalidParameterError("h = lambda * sigma must be > 0")
    height, width = img.shape
    window = search_window(i, p.S, width, height)
    Pi = extract_patch(img, i, p.k)
    w = np.array([patch_weight(Pi, extract_patch(img, j, p.k), h) for j in window])
    idx = np.array(window, dtype=np.int64)
    m = _keep_count(p.knn_fraction, len(w))
    if m < len(w):
        keep = np.sort(np.argsort(-w, kind="stable")[:m])
        idx, w = idx[keep], w[keep]
    return WeightProfile(indices=idx, weights=w)


def denoise_pixel_nlm(img, i, wp: WeightProfile) -> float:
    img = as_image(img)
    if len(wp) == 0 or not np.sum(wp.weights) > 0:
        raise DegenerateWeightsError("empty or all-zero weight profile")
    vals = img[wp.indices[:, 0], wp.indices[:, 1]]
    return float(np.dot(wp.weights, vals) / np.sum(wp.weights))


def denoise_pixel_nlem(img, i, wp: WeightProfile, cfg: MedianSolverConfig | None = None,
                       k: int = 7) -> float:
    img = as_image(img)
    if len(wp) == 0 or not np.sum(wp.weights) > 0:
        raise DegenerateWeightsError("empty or all-zero weight profile")
    patches = np.stack([extract_patch(img, tuple(j), k) for j in wp.indices])
    res = euclidean_median(patches, wp.weights, cfg)
    return float(res.point[(k * k - 1) // 2])


@njit(parallel=True, cache=True, fastmath=FASTMATH)
def _denoise_kernel(padded, height, width, S, k, h, knn_fraction, use_median,
                    algorithm, snap_epsilon, bias_initial, bias_shrink, bias_floor,
                    step_tolerance, max_iterations):
    hs = S // 2
    hk = k // 2
    d = k * k
    inv_h2 = 1.0 / (h * h)
    out = np.empty((height, width))
    iters = np.zeros((height, width), dtype=np.int64)
    conv = np.ones((height, width), dtype=np.bool_)
    nmax = S * S
    for r in prange(height):
        wts = np.empty(nmax)
        rr_of = np.empty(nmax, dtype=np.int64)
        cc_of = np.empty(nmax, dtype=np.int64)
        pts = np.empty((nmax, d))
        no_path = np.empty((0, d))
        for c in range(width):
            r0 = max(0, r - hs)
            r1 = min(height - 1, r + hs)
            c0 = max(0, c - hs)
            c1 = min(width - 1, c + hs)
            n = 0
            for rr in range(r0, r1 + 1):
                for cc in range(c0, c1 + 1):
                    s = 0.0
                    for a in range(k):
                        for b in range(k):
                            diff = padded[r + a, c + b] - padded[rr + a, cc + b]
                            s += diff * diff
                    wts[n] = math.exp(-s * inv_h2)
                    rr_of[n] = rr
                    cc_of[n] = cc
                    n += 1
            m = n
            if knn_fraction < 1.0:
                m = max(1, math.ceil(knn_fraction * n))
            if m < n:
                order = np.sort(np.argsort(-wts[:n], kind="mergesort")[:m])
                sel_w = wts[order]
                sel_r = rr_of[order]
                sel_c = cc_of[order]
            else:
                sel_w = wts[:n]
                sel_r = rr_of[:n]
                sel_c = cc_of[:n]
            if not use_median:
                num = 0.0
                den = 0.0
                for j in range(m):
                    num += sel_w[j] * padded[sel_r[j] + hk, sel_c[j] + hk]
                    den += sel_w[j]
                out[r, c] = num / den
            else:
                for j in range(m):
                    for a in range(k):
                        for b in range(k):
                            pts[j, a * k + b] = padded[sel_r[j] + a, sel_c[j] + b]
                x, it, ok = solve_median(pts[:m], sel_w, algorithm, snap_epsilon,
                                         bias_initial, bias_shrink, bias_floor,
                                         step_tolerance, max_iterations, no_path)
                out[r, c] = x[(d - 1) // 2]
                iters[r, c] = it
                conv[r, c] = ok
    return out, iters, conv


def _apply_thread_cap():
    cap = os.environ.get("NLEM_THREADS")
    if cap:
        numba.set_num_threads(max(1, min(int(cap), numba.config.NUMBA_NUM_THREADS)))


def denoise_image(img, p: DenoiseParams, cfg: MedianSolverConfig | None = None):
    """Denoise every pixel of ``img``; returns ``(denoised, Diagnostics)``.

    ``cfg`` is ignored for ``method="nlm"``. The output does not depend on
    the number of worker threads.
    """
    img = as_image(img)
    cfg = cfg or MedianSolverConfig()
    if not p.h > 0:
        raise InvalidParameterError("h = lambda * sigma must be > 0")
    height, width = img.shape
    padded = pad_for_patches(img, p.k)
    _apply_thread_cap()
    out, iters, conv = _denoise_kernel(
        padded, height, width, p.S, p.k, float(p.h), float(p.knn_fraction),
        p.method == "nlem", cfg.algorithm_code, cfg.snap_epsilon, cfg.bias_initial,
        cfg.bias_shrink, cfg.bias_floor, cfg.step_tolerance, cfg.max_iterations)
    if p.method == "nlem":
        diag = Diagnostics(mean_iterations=float(iters.mean()),
                           nonconverged=int(np.count_nonzero(~conv)), iterations=iters)
    else:
        diag = Diagnostics(mean_iterations=0.0, nonconverged=0)
    return out, diag
