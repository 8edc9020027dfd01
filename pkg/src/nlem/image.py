"""Grayscale images, patches, search windows and PGM I/O.

An image is a 2-D ``float64`` numpy array indexed ``[row, col]``. A patch
is the row-major flattening of the ``k x k`` neighbourhood of a pixel, with
out-of-image samples taken from the mirror reflection of the image (the
border pixel itself is not repeated).
"""

from __future__ import annotations

import os
import re

import numpy as np

from .errors import InvalidInputError, InvalidParameterError, PGMFormatError


def as_image(data) -> np.ndarray:
    """Validate and return ``data`` as a C-contiguous 2-D float64 array."""
    img = np.ascontiguousarray(data, dtype=np.float64)
    if img.ndim != 2:
        raise InvalidInputError(f"image must be 2-D, got shape {img.shape}")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise InvalidInputError(f"image must be non-empty, got shape {img.shape}")
    if not np.all(np.isfinite(img)):
        raise InvalidInputError("image contains NaN or Inf")
    return img


def check_odd(value: int, name: str) -> int:
    if int(value) != value or value < 1 or value % 2 == 0:
        raise InvalidParameterError(f"{name} must be a positive odd integer, got {value!r}")
    return int(value)


def _reflect(idx: int, n: int) -> int:
    # single reflection suffices because half-width <= n - 1
    if idx < 0:
        return -idx
    if idx >= n:
        return 2 * (n - 1) - idx
    return idx


def extract_patch(img, i, k: int) -> np.ndarray:
    """Return the ``k*k`` patch centred at pixel ``i = (row, col)``.

    Samples outside the image are mirrored about the border pixel.
    """
    img = as_image(img)
    k = check_odd(k, "k")
    height, width = img.shape
    if k > min(height, width):
        raise InvalidParameterError(f"k={k} exceeds smallest image side {min(height, width)}")
    row, col = i
    if not (0 <= row < height and 0 <= col < width):
        raise InvalidInputError(f"pixel {i} outside {height}x{width} image")
    half = k // 2
    rows = [_reflect(row + a, height) for a in range(-half, half + 1)]
    cols = [_reflect(col + b, width) for b in range(-half, half + 1)]
    return img[np.ix_(rows, cols)].ravel()


def pad_for_patches(img, k: int) -> np.ndarray:
    """Mirror-pad ``img`` by ``k // 2`` on every side."""
    img = as_image(img)
    k = check_odd(k, "k")
    if k > min(img.shape):
        raise InvalidParameterError(f"k={k} exceeds smallest image side {min(img.shape)}")
    return np.pad(img, k // 2, mode="reflect")


def window_bounds(i, S: int, width: int, height: int) -> tuple[int, int, int, int]:
    """Inclusive ``(r0, r1, c0, c1)`` of the truncated ``S x S`` window."""
    S = check_odd(S, "S")
    row, col = i
    half = S // 2
    return (max(0, row - half), min(height - 1, row + half),
            max(0, col - half), min(width - 1, col + half))


def search_window(i, S: int, width: int, height: int) -> list[tuple[int, int]]:
    """In-bounds pixels of the ``S x S`` square centred at ``i``, row-major."""
    r0, r1, c0, c1 = window_bounds(i, S, width, height)
    return [(r, c) for r in range(r0, r1 + 1) for c in range(c0, c1 + 1)]


# --------------------------------------------------------------------------
# PGM

_WS = b" \t\n\r\x0b\x0c"


def _header_tokens(raw: bytes, count: int):
    """Read ``count`` whitespace-separated header tokens after the magic.

    Returns the tokens (as (bytes, offset) pairs) and the offset just past
    the last token.
    """
    pos = 2
    tokens = []
    n = len(raw)
    while len(tokens) < count:
        while pos < n and (raw[pos] in _WS or raw[pos] == ord("#")):
            if raw[pos] == ord("#"):
                while pos < n and raw[pos] not in b"\r\n":
                    pos += 1
            else:
                pos += 1
        if pos >= n:
            raise PGMFormatError("truncated header", pos)
        start = pos
        while pos < n and raw[pos] not in _WS and raw[pos] != ord("#"):
            pos += 1
        tokens.append((raw[start:pos], start))
    return tokens, pos


def _parse_int(token: bytes, offset: int, what: str) -> int:
    if not re.fullmatch(rb"[0-9]+", token):
        raise PGMFormatError(f"invalid {what} {token!r}", offset)
    return int(token)


def parse_pgm(raw: bytes) -> np.ndarray:
    """Decode P2/P5 bytes into an image with intensities on a 0-255 scale."""
    magic = raw[:2]
    if magic not in (b"P2", b"P5"):
        raise PGMFormatError(f"unsupported magic number {magic!r}", 0)
    tokens, pos = _header_tokens(raw, 3)
    width = _parse_int(*tokens[0], "width")
    height = _parse_int(*tokens[1], "height")
    maxval = _parse_int(*tokens[2], "maxval")
    if width < 1 or height < 1:
        raise PGMFormatError(f"invalid dimensions {width}x{height}", tokens[0][1])
    if not 1 <= maxval <= 255:
        raise PGMFormatError(f"maxval {maxval} not in 1..255", tokens[2][1])
    count = width * height

    if magic == b"P5":
        if pos >= len(raw) or raw[pos] not in _WS:
            raise PGMFormatError("missing whitespace after maxval", pos)
        pos += 1
        payload = raw[pos:pos + count]
        if len(payload) < count:
            raise PGMFormatError(
                f"truncated payload: expected {count} bytes, found {len(payload)}",
                pos + len(payload))
        samples = np.frombuffer(payload, dtype=np.uint8).astype(np.float64)
        bad = np.flatnonzero(samples > maxval)
        if bad.size:
            raise PGMFormatError(f"sample exceeds maxval {maxval}", pos + int(bad[0]))
    else:
        values = []
        for m in re.finditer(rb"[^\s]+", raw[pos:]):
            if len(values) == count:
                break
            values.append(_parse_int(m.group(), pos + m.start(), "sample"))
            if values[-1] > maxval:
                raise PGMFormatError(f"sample exceeds maxval {maxval}", pos + m.start())
        if len(values) < count:
            raise PGMFormatError(
                f"truncated payload: expected {count} samples, found {len(values)}", len(raw))
        samples = np.asarray(values, dtype=np.float64)

    if maxval != 255:
        samples = samples * (255.0 / maxval)
    return samples.reshape(height, width)


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return parse_pgm(fh.read())


def quantize(img) -> np.ndarray:
    """Clamp to [0, 255] and round half away from zero to uint8."""
    img = as_image(img)
    return np.floor(np.clip(img, 0.0, 255.0) + 0.5).astype(np.uint8)


def encode_pgm(img) -> bytes:
    q = quantize(img)
    height, width = q.shape
    return f"P5\n{width} {height}\n255\n".encode("ascii") + q.tobytes()


def write_pgm(img, path) -> None:
    """Write ``img`` as binary (P5) 8-bit PGM."""
    data = encode_pgm(img)
    with open(os.fspath(path), "wb") as fh:
        fh.write(data)
