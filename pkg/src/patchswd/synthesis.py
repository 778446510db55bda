"""Coarse-to-fine image synthesis by patch-SWD minimization, and task presets.

At every pyramid level the current guess is optimized with Adam against the
target level, clipped to ``[-1, 1]``, and upscaled to serve as the next
level's starting point.  Fresh projection filters are drawn at every step from
a generator seeded by ``(seed, level, step)``, so a run is a pure function of
its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .imaging import (PyramidConfig, add_noise, as_image, build_pyramid, clip, gaussian_blur,
                      resize, round_half_up)
from .metrics import nearest_neighbors
from .optim import AdamState, adam_step
from .swd import (ImageTooSmallError, extract_patches, sample_projections,
                  swd_loss_and_grad_with_filters)


class InitMode(str, Enum):
    ZEROS = "zeros"
    TARGET = "target"
    BLURRED_TARGET = "blurred_target"
    PROVIDED_IMAGE = "provided_image"


@dataclass(frozen=True)
class SynthesisConfig:
    pyramid_factor: float = 0.85
    coarse_dim: int = 28
    scale_factors: tuple[float, float] = (1.0, 1.0)
    init_mode: InitMode = InitMode.ZEROS
    noise_sigma: float = 1.5
    patch_size: int = 7
    stride: int = 1
    num_projections: int = 64
    learning_rate: float = 0.05
    num_steps: int = 300
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "init_mode", InitMode(self.init_mode))
        object.__setattr__(self, "scale_factors", tuple(float(s) for s in self.scale_factors))
        if not 0.0 < self.pyramid_factor < 1.0:
            raise ValueError(f"pyramid_factor must lie in (0, 1), got {self.pyramid_factor}")
        if len(self.scale_factors) != 2 or min(self.scale_factors) <= 0:
            raise ValueError(f"scale_factors must be two positive numbers, got {self.scale_factors}")
        for name in ("coarse_dim", "patch_size", "stride", "num_projections"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.num_steps < 0:
            raise ValueError(f"num_steps must be non-negative, got {self.num_steps}")
        if self.noise_sigma < 0:
            raise ValueError(f"noise_sigma must be non-negative, got {self.noise_sigma}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.patch_size > self.coarse_dim:
            raise ValueError(f"patch_size {self.patch_size} exceeds coarse_dim {self.coarse_dim}")

    @property
    def pyramid(self) -> PyramidConfig:
        return PyramidConfig(self.pyramid_factor, self.coarse_dim)


@dataclass(frozen=True)
class FrequencyMask:
    """Binary map over the target; patches centred on it are duplicated ``boost_factor`` times."""

    mask: np.ndarray
    boost_factor: int = 2

    def __post_init__(self):
        m = np.asarray(self.mask)
        if m.ndim == 3:
            m = m[:, :, 0]
        if m.ndim != 2:
            raise ValueError(f"mask must be a 2D map, got shape {m.shape}")
        object.__setattr__(self, "mask", m.astype(bool))
        if int(self.boost_factor) != self.boost_factor or self.boost_factor < 1:
            raise ValueError(f"boost_factor must be an integer >= 1, got {self.boost_factor}")


def apply_frequency_mask(target, mask: FrequencyMask, patch_size: int, stride: int = 1) -> np.ndarray:
    """Per-patch multiplicities of ``target``: ``boost_factor`` where the patch centre is masked."""
    target = as_image(target)
    h, w = target.shape[:2]
    if mask.mask.shape != (h, w):
        raise ValueError(f"mask shape {mask.mask.shape} does not match target {h}x{w}")
    half = patch_size // 2
    centers = mask.mask[half:h - patch_size + half + 1:stride, half:w - patch_size + half + 1:stride]
    return np.where(centers.ravel(), int(mask.boost_factor), 1).astype(np.intp)


def resize_mask(mask: FrequencyMask, h: int, w: int) -> FrequencyMask:
    m = resize(mask.mask.astype(np.float64), h, w)[:, :, 0]
    return FrequencyMask(m >= 0.5, mask.boost_factor)


def blur_sigma(shape, pyramid_factor: float) -> float:
    """Blur strength for ``blurred_target`` initial guesses at a given coarse size."""
    diag = math.hypot(shape[0], shape[1])
    return 2.0 * (1.0 / pyramid_factor - 1.0) * diag / 100.0


def step_rng(seed: int, level: int, step: int) -> np.random.Generator:
    return np.random.default_rng([seed, level, step])


def output_shapes(base_hw, scale_factors, n_levels: int, pyramid_factor: float):
    """Working sizes of the synthesized image per level, coarse first."""
    h = round_half_up(base_hw[0] * scale_factors[0])
    w = round_half_up(base_hw[1] * scale_factors[1])
    shapes = [(h, w)]
    for _ in range(n_levels - 1):
        ph, pw = shapes[-1]
        shapes.append((round_half_up(ph * pyramid_factor), round_half_up(pw * pyramid_factor)))
    return shapes[::-1]


def _initial_guess(cfg: SynthesisConfig, coarse_target, shape):
    h, w = shape
    mode = cfg.init_mode
    if mode is InitMode.ZEROS:
        return np.zeros((h, w, coarse_target.shape[2]))
    if mode is InitMode.TARGET:
        return resize(coarse_target, h, w)
    return gaussian_blur(resize(coarse_target, h, w), blur_sigma((h, w), cfg.pyramid_factor))


def resize_chain(img, shapes) -> list[np.ndarray]:
    """Resize ``img`` to the finest of ``shapes``, then successively to each coarser one."""
    levels = [resize(img, *shapes[-1])]
    for shp in reversed(shapes[:-1]):
        levels.append(resize(levels[-1], *shp))
    return levels[::-1]


def synthesize(target, cfg: SynthesisConfig, mask: Optional[FrequencyMask] = None,
               init=None, callback: Optional[Callable[[int, int, float], None]] = None) -> np.ndarray:
    """Run the multi-scale optimization and return the finest-level result.

    For ``provided_image`` initialization the output size follows ``init``
    (times the scale factors); otherwise it follows ``target``.  A provided
    image is downscaled along the output pyramid, and each level starts from
    that level of it plus the upsampled correction made one level coarser, so
    its fine detail is kept rather than lost to resampling.  An ``init`` equal
    to the target is therefore an exact fixed point.

    ``callback`` is invoked as ``callback(level, step, loss)`` after every
    Adam step.
    """
    target = as_image(target)
    provided = cfg.init_mode is InitMode.PROVIDED_IMAGE
    if provided and init is None:
        raise ValueError("init_mode 'provided_image' needs an initial image")
    if init is not None:
        init = as_image(init)
        if init.shape[2] != target.shape[2]:
            raise ValueError("initial image and target have different channel counts")
    if mask is not None and mask.mask.shape != target.shape[:2]:
        raise ValueError(f"mask shape {mask.mask.shape} does not match target {target.shape[:2]}")

    pyramid = build_pyramid(target, cfg.pyramid)
    base = init.shape[:2] if provided else target.shape[:2]
    shapes = output_shapes(base, cfg.scale_factors, len(pyramid), cfg.pyramid_factor)
    p = cfg.patch_size
    for lvl, (x, shp) in enumerate(zip(pyramid, shapes)):
        if min(x.shape[:2]) < p or min(shp) < p:
            raise ImageTooSmallError(f"level {lvl} ({x.shape[0]}x{x.shape[1]} target, "
                             f"{shp[0]}x{shp[1]} output) is smaller than patch size {p}")

    if provided:
        guides = resize_chain(init, shapes)
        y = guides[0]
    else:
        y = _initial_guess(cfg, pyramid[0], shapes[0])
    y = add_noise(y, cfg.noise_sigma, np.random.default_rng([cfg.seed, 0x5EED]))

    channels = target.shape[2]
    for lvl, (x, shp) in enumerate(zip(pyramid, shapes)):
        if lvl > 0:
            if provided:
                y = guides[lvl] + resize(y - guides[lvl - 1], *shp)
            else:
                y = resize(y, *shp)
        augment = None
        if mask is not None and mask.boost_factor > 1:
            augment = apply_frequency_mask(x, resize_mask(mask, *x.shape[:2]), p, cfg.stride)
        state = AdamState.zeros_like(y)
        for step in range(cfg.num_steps):
            filters = sample_projections(cfg.num_projections, p, channels, step_rng(cfg.seed, lvl, step))
            loss, grad = swd_loss_and_grad_with_filters(x, y, filters, cfg.stride, augment)
            y, state = adam_step(y, grad, state, cfg.learning_rate)
            if callback is not None:
                callback(lvl, step, loss)
        y = clip(y)
    return y


RESHUFFLE = SynthesisConfig()
RETARGET = SynthesisConfig(coarse_dim=35, init_mode=InitMode.BLURRED_TARGET, noise_sigma=0.0,
                           num_projections=128)
STYLE = SynthesisConfig(init_mode=InitMode.PROVIDED_IMAGE, noise_sigma=0.0, patch_size=11)
TEXTURE = SynthesisConfig(scale_factors=(2.0, 2.0))
EDIT = SynthesisConfig(init_mode=InitMode.PROVIDED_IMAGE, noise_sigma=0.0)

PRESETS = {
    "reshuffle": RESHUFFLE,
    "retarget": RETARGET,
    "style": STYLE,
    "texture": TEXTURE,
    "edit": EDIT,
}


def single_level(cfg: SynthesisConfig, shape) -> SynthesisConfig:
    """Force a one-level pyramid for a target of the given size."""
    return replace(cfg, coarse_dim=max(shape[0], shape[1], cfg.patch_size) + 1)


def reshuffle(target, seed: int = 0, **overrides) -> np.ndarray:
    return synthesize(target, replace(RESHUFFLE, seed=seed, **overrides))


def retarget(target, scale_factors=(1.0, 1.0), seed: int = 0, **overrides) -> np.ndarray:
    return synthesize(target, replace(RETARGET, scale_factors=tuple(scale_factors), seed=seed, **overrides))


def style_transfer(content, style, seed: int = 0, **overrides) -> np.ndarray:
    """Start from ``content`` and match the patch distribution of ``style`` at one scale."""
    style = as_image(style)
    cfg = replace(STYLE, seed=seed, **overrides)
    if "coarse_dim" not in overrides:
        cfg = single_level(cfg, style.shape)
    return synthesize(style, cfg, init=content)


def texture_synthesize(target, seed: int = 0, **overrides) -> np.ndarray:
    return synthesize(target, replace(TEXTURE, seed=seed, **overrides))


def edit_harmonize(crude_edit, target, seed: int = 0, mask: Optional[FrequencyMask] = None,
                   **overrides) -> np.ndarray:
    crude_edit = as_image(crude_edit)
    target = as_image(target)
    if crude_edit.shape != target.shape:
        raise ValueError(f"edited image {crude_edit.shape} and target {target.shape} differ in size")
    return synthesize(target, replace(EDIT, seed=seed, **overrides), mask=mask, init=crude_edit)


def nearest_patch_classes(img, target, labels, patch_size: int = 7, stride: int = 1) -> np.ndarray:
    """Label each patch of ``img`` by the class map value at its nearest target patch's centre."""
    target = as_image(target)
    labels = np.asarray(labels)
    h, w = target.shape[:2]
    half = patch_size // 2
    target_labels = labels[half:h - patch_size + half + 1:stride,
                           half:w - patch_size + half + 1:stride].ravel()
    idx, _ = nearest_neighbors(extract_patches(img, patch_size, stride),
                               extract_patches(target, patch_size, stride))
    return target_labels[idx]
