"""Image quality metrics: PSNR, SSIM, method noise and improvement maps."""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .errors import InvalidInputError
from .image import as_image

PEAK = 255.0


def _pair(a, b):
    a = as_image(a)
    b = as_image(b)
    if a.shape != b.shape:
        raise InvalidInputError(f"image shapes differ: {a.shape} vs {b.shape}")
    return a, b


def psnr(reference, test) -> float:
    """Peak signal-to-noise ratio in dB with a fixed peak of 255."""
    ref, tst = _pair(reference, test)
    mse = float(np.mean((ref - tst) ** 2))
    if mse == 0.0:
        return float("inf")
    return 10.0 * np.log10(PEAK ** 2 / mse)


def _gaussian_window(size=11, std=1.5):
    x = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-x ** 2 / (2 * std ** 2))
    g /= g.sum()
    return np.outer(g, g)


def _valid_filter(img, window):
    # correlation restricted to positions where the window fits entirely
    full = ndimage.correlate(img, window, mode="constant")
    r = window.shape[0] // 2
    return full[r:-r, r:-r]


def ssim_map(reference, test, win_size=11, std=1.5):
    ref, tst = _pair(reference, test)
    if min(ref.shape) < win_size:
        raise InvalidInputError(f"SSIM needs both sides >= {win_size}, got {ref.shape}")
    c1 = (0.01 * PEAK) ** 2
    c2 = (0.03 * PEAK) ** 2
    win = _gaussian_window(win_size, std)
    mu_x = _valid_filter(ref, win)
    mu_y = _valid_filter(tst, win)
    sxx = _valid_filter(ref * ref, win) - mu_x ** 2
    syy = _valid_filter(tst * tst, win) - mu_y ** 2
    sxy = _valid_filter(ref * tst, win) - mu_x * mu_y
    num = (2 * mu_x * mu_y + c1) * (2 * sxy + c2)
    den = (mu_x ** 2 + mu_y ** 2 + c1) * (sxx + syy + c2)
    return num / den


def ssim(reference, test) -> float:
    """Mean SSIM (11x11 Gaussian window, std 1.5) over valid window positions."""
    return float(np.mean(ssim_map(reference, test)))


def method_noise(noisy, denoised) -> np.ndarray:
    """Denoised minus noisy, pixel-wise."""
    u, uh = _pair(noisy, denoised)
    return uh - u


def rescale_for_display(img) -> np.ndarray:
    """Affine map of ``img`` onto [0, 255] (min to 0, max to 255)."""
    img = as_image(img)
    lo, hi = img.min(), img.max()
    if hi == lo:
        return np.zeros_like(img)
    return (img - lo) * (255.0 / (hi - lo))


def improvement_map(clean, nlm, nlem, threshold: float = 10.0) -> np.ndarray:
    """Flag pixels where the NLEM error beats the NLM error by more than ``threshold``."""
    f, a = _pair(clean, nlm)
    _, b = _pair(clean, nlem)
    return np.abs(b - f) < np.abs(a - f) - threshold


def edge_mask(clean) -> np.ndarray:
    """Pixels having a 4-neighbour of different intensity."""
    f = as_image(clean)
    mask = np.zeros(f.shape, dtype=bool)
    dv = f[1:, :] != f[:-1, :]
    dh = f[:, 1:] != f[:, :-1]
    mask[1:, :] |= dv
    mask[:-1, :] |= dv
    mask[:, 1:] |= dh
    mask[:, :-1] |= dh
    return mask


def fraction_near_edges(flags, clean, radius: float = 8.0) -> float:
    """Share of flagged pixels within ``radius`` (Euclidean) of an edge pixel of ``clean``."""
    flags = np.asarray(flags, dtype=bool)
    edges = edge_mask(clean)
    if not flags.any():
        return float("nan")
    if not edges.any():
        return 0.0
    dist = ndimage.distance_transform_edt(~edges)
    return float(np.mean(dist[flags] <= radius))


def lag1_autocorrelation(img) -> float:
    """Mean of the horizontal and vertical lag-1 sample autocorrelations."""
    x = as_image(img)
    x = x - x.mean()
    var = float(np.mean(x * x))
    if var == 0.0:
        return 0.0
    horiz = float(np.mean(x[:, 1:] * x[:, :-1])) / var
    vert = float(np.mean(x[1:, :] * x[:-1, :])) / var
    return 0.5 * (horiz + vert)
