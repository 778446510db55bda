"""Image arrays, value-range handling, resampling, pyramids and file I/O.

Images are plain ``float64`` arrays of shape ``(H, W, C)`` with ``C`` in
``{1, 3}`` and values nominally in ``[-1, 1]``.  Every function here returns a
new array; inputs are never modified in place.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image as PILImage
from scipy import ndimage


class ImageDecodeError(ValueError):
    """Raised when a file cannot be decoded as an 8-bit PNG/JPEG image."""


@dataclass(frozen=True)
class PyramidConfig:
    """Downscale ratio and minimal side length of the coarsest pyramid level."""

    ratio: float
    coarse_dim: int

    def __post_init__(self):
        if not 0.0 < self.ratio < 1.0:
            raise ValueError(f"pyramid ratio must lie in (0, 1), got {self.ratio}")
        if self.coarse_dim < 1:
            raise ValueError(f"coarse_dim must be positive, got {self.coarse_dim}")


def as_image(data) -> np.ndarray:
    """Validate and convert ``data`` to a ``(H, W, C)`` float64 image.

    2-D input is treated as a single-channel image.
    """
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3:
        raise ValueError(f"image must have shape (H, W, C), got {arr.shape}")
    h, w, c = arr.shape
    if h < 1 or w < 1:
        raise ValueError(f"image dimensions must be positive, got {h}x{w}")
    if c not in (1, 3):
        raise ValueError(f"image must have 1 or 3 channels, got {c}")
    return arr


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _pixels_to_unit(u: np.ndarray) -> np.ndarray:
    return 2.0 * u.astype(np.float64) / 255.0 - 1.0


def _unit_to_pixels(v: np.ndarray) -> np.ndarray:
    v = np.clip(v, -1.0, 1.0)
    return np.floor(255.0 * (v + 1.0) / 2.0 + 0.5).astype(np.uint8)


def load_image(path) -> np.ndarray:
    """Read an 8-bit PNG or JPEG file into an image with values in ``[-1, 1]``.

    Grayscale files give ``C == 1``; color and palette files give ``C == 3``.
    An alpha channel, if present, is dropped.
    """
    path = Path(path)
    try:
        pil = PILImage.open(path)
        pil.load()
    except (OSError, SyntaxError) as exc:
        raise ImageDecodeError(f"cannot decode image {path}: {exc}") from exc
    if pil.format not in ("PNG", "JPEG"):
        raise ImageDecodeError(f"{path}: unsupported format {pil.format}")
    mode = pil.mode
    if mode in ("L", "LA"):
        pil = pil.convert("L")
    elif mode in ("RGB", "RGBA", "P", "CMYK", "YCbCr"):
        pil = pil.convert("RGB")
    else:
        # "1", "I;16", "I", "F" and friends are not 8 bits per sample.
        raise ImageDecodeError(f"{path}: unsupported pixel mode {mode!r} (need 8-bit)")
    return as_image(_pixels_to_unit(np.asarray(pil)))


def save_image(img, path) -> None:
    """Write ``img`` as an 8-bit PNG, clipping to ``[-1, 1]`` first."""
    img = as_image(img)
    pixels = _unit_to_pixels(img)
    if pixels.shape[2] == 1:
        pil = PILImage.fromarray(pixels[:, :, 0], mode="L")
    else:
        pil = PILImage.fromarray(pixels, mode="RGB")
    path = Path(path)
    try:
        pil.save(path, format="PNG")
    except OSError as exc:
        raise OSError(f"cannot write image {path}: {exc}") from exc


def _bilinear_axis(n_in: int, n_out: int):
    # Half-pixel-center mapping, clamped to the valid sample range.
    src = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
    src = np.clip(src, 0.0, n_in - 1)
    lo = np.floor(src).astype(np.intp)
    hi = np.minimum(lo + 1, n_in - 1)
    frac = src - lo
    return lo, hi, frac


def resize(img, new_h: int, new_w: int) -> np.ndarray:
    """Bilinear resampling with edge clamping to exactly ``(new_h, new_w)``."""
    img = as_image(img)
    if new_h < 1 or new_w < 1:
        raise ValueError(f"target size must be positive, got {new_h}x{new_w}")
    h, w, _ = img.shape
    if (h, w) == (new_h, new_w):
        return img.copy()
    r0, r1, fr = _bilinear_axis(h, new_h)
    c0, c1, fc = _bilinear_axis(w, new_w)
    fr = fr[:, None, None]
    fc = fc[None, :, None]
    rows = img[r0] * (1.0 - fr) + img[r1] * fr
    return rows[:, c0] * (1.0 - fc) + rows[:, c1] * fc


def pyramid_shapes(h: int, w: int, cfg: PyramidConfig) -> list[tuple[int, int]]:
    """Level sizes of the pyramid built from an ``h x w`` image, coarse first."""
    shapes = [(h, w)]
    while True:
        ch, cw = shapes[-1]
        nh, nw = round_half_up(ch * cfg.ratio), round_half_up(cw * cfg.ratio)
        if min(nh, nw) < cfg.coarse_dim:
            break
        shapes.append((nh, nw))
    return shapes[::-1]


def build_pyramid(img, cfg: PyramidConfig) -> list[np.ndarray]:
    """Repeatedly downscale ``img`` by ``cfg.ratio``; returns levels coarse to fine.

    Each level is resized from the next finer one.  The finest level is a copy
    of the input.
    """
    img = as_image(img)
    shapes = pyramid_shapes(img.shape[0], img.shape[1], cfg)
    levels = [img.copy()]
    for h, w in reversed(shapes[:-1]):
        levels.append(resize(levels[-1], h, w))
    return levels[::-1]


def add_noise(img, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Add i.i.d. ``N(0, sigma^2)`` noise to every value.  The result is not clipped."""
    img = as_image(img)
    if sigma < 0:
        raise ValueError(f"noise sigma must be non-negative, got {sigma}")
    if sigma == 0:
        return img.copy()
    return img + rng.normal(0.0, sigma, size=img.shape)


def clip(img) -> np.ndarray:
    return np.clip(as_image(img), -1.0, 1.0)


def gaussian_blur(img, sigma: float, truncate: float = 2.0) -> np.ndarray:
    """Per-channel Gaussian blur with edge replication."""
    img = as_image(img)
    if sigma <= 0:
        return img.copy()
    return ndimage.gaussian_filter(img, sigma=(sigma, sigma, 0), mode="nearest", truncate=truncate)
