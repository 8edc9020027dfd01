"""Synthetic test images, seeded Gaussian noise and noise-level estimation.

Noise streams are bit-reproducible: SplitMix64 draws are turned into
uniforms on (0, 1) by ``((x >> 11) + 0.5) * 2**-53`` and consecutive pairs
``(u1, u2)`` feed Box-Muller, ``sqrt(-2 ln u1) * (cos, sin)(2 pi u2)``.
The cosine output goes to the even pixel of each pair and the sine output
to the odd one, in row-major order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .image import as_image

GOLDEN_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class NoiseSpec:
    sigma: float
    seed: int = 0

    def __post_init__(self):
        if not self.sigma >= 0:
            raise InvalidParameterError("sigma must be >= 0")


@dataclass
class EdgeSignal1D:
    samples: np.ndarray
    edge_position: int


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def splitmix64(seed: int, n: int) -> np.ndarray:
    """First ``n`` outputs of SplitMix64 started from state ``seed``."""
    state = np.uint64(int(seed) & _MASK64)
    with np.errstate(over="ignore"):
        steps = np.arange(1, n + 1, dtype=np.uint64) * GOLDEN_GAMMA
        return _mix(state + steps)


def splitmix64_next(seed: int) -> int:
    """Single SplitMix64 output for state ``seed`` (used to derive seeds)."""
    return int(splitmix64(seed, 1)[0])


def uniforms(seed: int, n: int) -> np.ndarray:
    """``n`` uniforms strictly inside (0, 1)."""
    x = splitmix64(seed, n)
    return ((x >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53


def standard_normal(seed: int, n: int) -> np.ndarray:
    pairs = (n + 1) // 2
    u = uniforms(seed, 2 * pairs)
    radius = np.sqrt(-2.0 * np.log(u[0::2]))
    theta = 2.0 * np.pi * u[1::2]
    z = np.empty(2 * pairs)
    z[0::2] = radius * np.cos(theta)
    z[1::2] = radius * np.sin(theta)
    return z[:n]


def add_noise(img, spec: NoiseSpec) -> np.ndarray:
    """Add i.i.d. N(0, sigma^2) noise; the result is not clipped."""
    img = as_image(img)
    if spec.sigma == 0:
        return img.copy()
    z = standard_normal(spec.seed, img.size).reshape(img.shape)
    return img + spec.sigma * z


def make_checker(size: int = 256, square: int = 32) -> np.ndarray:
    """Checkerboard of 0/255 squares with a black top-left square."""
    if size < 1 or square < 1 or size % square:
        raise InvalidParameterError(f"size {size} must be a positive multiple of square {square}")
    idx = np.arange(size) // square
    return 255.0 * ((idx[:, None] + idx[None, :]) % 2)


def make_circles(size: int = 256, ring_width: int = 16) -> np.ndarray:
    """Concentric rings about the image centre, white disk in the middle."""
    if size < 1:
        raise InvalidParameterError("size must be >= 1")
    if ring_width < 1:
        raise InvalidParameterError("ring_width must be >= 1")
    centre = (size - 1) / 2.0
    yy, xx = np.mgrid[0:size, 0:size]
    radius = np.hypot(yy - centre, xx - centre)
    ring = np.floor(radius / ring_width).astype(np.int64)
    return np.where(ring % 2 == 0, 255.0, 0.0)


def make_edge_1d(n: int, edge_position: int) -> EdgeSignal1D:
    if not 0 < edge_position < n:
        raise InvalidParameterError(f"edge_position must lie in (0, {n}), got {edge_position}")
    samples = np.zeros(n)
    samples[edge_position:] = 1.0
    return EdgeSignal1D(samples=samples, edge_position=edge_position)


def estimate_sigma(img) -> float:
    """Noise std from the MAD of the 5-point Laplacian on interior pixels.

    The Laplacian ``4u - (up + down + left + right)`` of white noise has
    standard deviation ``sqrt(20) * sigma``.
    """
    img = as_image(img)
    if min(img.shape) < 3:
        raise InvalidParameterError("estimate_sigma needs an image at least 3x3")
    lap = (4.0 * img[1:-1, 1:-1] - img[:-2, 1:-1] - img[2:, 1:-1]
           - img[1:-1, :-2] - img[1:-1, 2:])
    return float(np.median(np.abs(lap)) / (0.6745 * np.sqrt(20.0)))
