"""Procedural test textures.

Small, seeded, dependency-free stand-ins for photographs, used by the test
suite and the demo scripts.  All outputs are ``(H, W, 3)`` images in
``[-1, 1]``.
"""

from __future__ import annotations

import numpy as np

from .imaging import gaussian_blur


def _colorize(gray: np.ndarray, low, high) -> np.ndarray:
    low = np.asarray(low, dtype=np.float64)
    high = np.asarray(high, dtype=np.float64)
    t = np.clip(gray, 0.0, 1.0)[:, :, None]
    return np.clip(low + (high - low) * t, -1.0, 1.0)


def blobs(h: int, w: int, seed: int = 0, density: float = 0.02, radius: float = 2.5,
          low=(-0.8, -0.5, -0.2), high=(0.9, 0.6, -0.4)) -> np.ndarray:
    """Bright round spots of random size scattered on a dark background."""
    rng = np.random.default_rng(seed)
    n = max(1, int(density * h * w))
    cy = rng.uniform(0, h, n)
    cx = rng.uniform(0, w, n)
    r = radius * rng.uniform(0.6, 1.4, n)
    yy, xx = np.mgrid[0:h, 0:w]
    field = np.zeros((h, w))
    for y0, x0, r0 in zip(cy, cx, r):
        field = np.maximum(field, np.exp(-((yy - y0) ** 2 + (xx - x0) ** 2) / (2 * r0 ** 2)))
    field += 0.08 * rng.standard_normal((h, w))
    return _colorize(field, low, high)


def stripes(h: int, w: int, period: float = 6.0, seed: int = 0, vertical: bool = True,
            noise: float = 0.06, wobble: float = 0.6, low=(-0.9, -0.9, -0.6), high=(0.8, 0.7, 0.9)) -> np.ndarray:
    """Slightly wavy, noisy stripes; vertical means constant along columns' direction."""
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    along, across = (yy, xx) if vertical else (xx, yy)
    phase = wobble * np.sin(2 * np.pi * along / (4.3 * period) + rng.uniform(0, 2 * np.pi))
    field = 0.5 + 0.5 * np.sin(2 * np.pi * across / period + phase)
    field += noise * rng.standard_normal((h, w))
    return _colorize(field, low, high)


def noise_texture(h: int, w: int, seed: int = 0, scale: float = 1.5,
                  low=(-0.2, -0.9, -0.9), high=(0.7, 0.1, -0.2)) -> np.ndarray:
    """Smoothed Gaussian noise, contrast-stretched."""
    rng = np.random.default_rng(seed)
    field = gaussian_blur(rng.standard_normal((h, w, 1)), scale, truncate=3.0)[:, :, 0]
    field = (field - field.mean()) / (3.0 * field.std() + 1e-12) + 0.5
    return _colorize(field, low, high)


def two_region(h: int, w: int, fraction: float = 0.7, seed: int = 0):
    """Left ``fraction`` of columns is one texture, the rest another.

    Returns ``(image, labels)`` where ``labels`` is an integer map with ``0``
    for the left texture and ``1`` for the right.
    """
    left = blobs(h, w, seed=seed)
    right = stripes(h, w, period=5.0, seed=seed + 1, vertical=False)
    split = int(round(fraction * w))
    labels = np.zeros((h, w), dtype=np.intp)
    labels[:, split:] = 1
    img = np.where(labels[:, :, None] == 0, left, right)
    return img, labels
