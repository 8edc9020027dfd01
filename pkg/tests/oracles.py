"""Independent reference computations used only by the tests."""

import numpy as np
from scipy import optimize


def grid_median(points, weights, pitch=1e-3, chunk=200_000):
    """Brute-force weighted geometric median in 2-D.

    Dense grid over the bounding box of the points, then Nelder-Mead from
    the best grid node.
    """
    points = np.asarray(points, float)
    weights = np.asarray(weights, float)
    lo, hi = points.min(0), points.max(0)
    xs = np.arange(lo[0], hi[0] + pitch / 2, pitch)
    ys = np.arange(lo[1], hi[1] + pitch / 2, pitch)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    grid = np.column_stack([gx.ravel(), gy.ravel()])
    best, best_cost = None, np.inf
    for start in range(0, len(grid), chunk):
        g = grid[start:start + chunk]
        cost = np.sqrt(((g[:, None, :] - points[None]) ** 2).sum(-1)) @ weights
        i = int(np.argmin(cost))
        if cost[i] < best_cost:
            best, best_cost = g[i], cost[i]

    def f(x):
        return float(np.sqrt(((x - points) ** 2).sum(1)) @ weights)

    res = optimize.minimize(f, best, method="Nelder-Mead",
                            options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": 5000})
    return res.x if res.fun <= best_cost else best


def weighted_median_1d(values, weights):
    """Smallest value whose cumulative weight reaches half the total."""
    order = np.argsort(values, kind="stable")
    v = np.asarray(values, float)[order]
    w = np.asarray(weights, float)[order]
    cum = np.cumsum(w)
    return v[int(np.searchsorted(cum, 0.5 * cum[-1]))]


def splitmix64_scalar(seed, n):
    """Textbook SplitMix64 on Python ints."""
    mask = (1 << 64) - 1
    state = seed & mask
    out = []
    for _ in range(n):
        state = (state + 0x9E3779B97F4A7C15) & mask
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
        out.append(z ^ (z >> 31))
    return out


def mirror_pad_manual(img, r):
    """Mirror padding by explicit index arithmetic, no numpy.pad."""
    h, w = img.shape
    out = np.empty((h + 2 * r, w + 2 * r))

    def refl(i, n):
        i = abs(i)
        return 2 * (n - 1) - i if i >= n else i

    for a in range(h + 2 * r):
        for b in range(w + 2 * r):
            out[a, b] = img[refl(a - r, h), refl(b - r, w)]
    return out
