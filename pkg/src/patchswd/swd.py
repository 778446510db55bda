"""Patch sliced-Wasserstein loss between two images and its pixel gradient.

A random unit-norm ``p x p x C`` filter projects every patch of an image to a
scalar (a valid, strided cross-correlation).  Sorting the projections of the
two images pairs them optimally in 1D, and the mean absolute difference of
the sorted sequences estimates the 1D Wasserstein distance.  Averaging over
``k`` filters estimates the sliced distance between the two patch
distributions.

The gradient with respect to the synthesized image is the sign of each sorted
residual, routed back through the sorting permutation and scattered onto the
pixels by the adjoint of the projection (a transposed correlation with the
same filter).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .imaging import as_image


class ImageTooSmallError(ValueError):
    """Raised when a patch does not fit inside an image."""


@dataclass(frozen=True)
class ProjectionFilter:
    weights: np.ndarray  # (patch_size, patch_size, channels), unit L2 norm

    @property
    def patch_size(self) -> int:
        return self.weights.shape[0]

    @property
    def channels(self) -> int:
        return self.weights.shape[2]


@dataclass(frozen=True)
class ProjectedSamples:
    """Projected patch values of one image, row-major over patch positions.

    ``source_index[j]`` is the flat pixel index ``row * W + col`` of the
    top-left corner of patch ``j``.
    """

    values: np.ndarray
    source_index: np.ndarray

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class SortPairing:
    perm_p: np.ndarray
    perm_q: np.ndarray


def num_patches(h: int, w: int, patch_size: int, stride: int) -> int:
    return ((h - patch_size) // stride + 1) * ((w - patch_size) // stride + 1)


def _check_patch_fits(shape, patch_size: int, stride: int):
    h, w = shape[:2]
    if patch_size < 1 or stride < 1:
        raise ValueError(f"patch_size and stride must be positive, got {patch_size}, {stride}")
    if patch_size > min(h, w):
        raise ImageTooSmallError(f"patch size {patch_size} exceeds image size {h}x{w}")


def sample_projections(k: int, patch_size: int, channels: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``k`` standard-normal filters, each rescaled to unit L2 norm.

    Returns an array of shape ``(k, patch_size, patch_size, channels)``.
    """
    if patch_size < 1 or k < 1:
        raise ValueError("k and patch_size must be positive")
    w = rng.standard_normal((k, patch_size, patch_size, channels))
    norms = np.sqrt(np.sum(w * w, axis=(1, 2, 3), keepdims=True))
    return w / norms


def sample_projection(patch_size: int, channels: int, rng: np.random.Generator) -> ProjectionFilter:
    return ProjectionFilter(sample_projections(1, patch_size, channels, rng)[0])


def extract_patches(img, patch_size: int, stride: int = 1) -> np.ndarray:
    """All ``p x p`` patches at the given stride as rows of an ``(M, p*p*C)`` array.

    Rows are ordered row-major over patch positions; each row is the patch
    flattened in ``(row, col, channel)`` order.
    """
    img = as_image(img)
    _check_patch_fits(img.shape, patch_size, stride)
    c = img.shape[2]
    win = sliding_window_view(img, (patch_size, patch_size), axis=(0, 1))[::stride, ::stride]
    # win: (nh, nw, C, p, p) -> (nh, nw, p, p, C)
    win = win.transpose(0, 1, 3, 4, 2)
    return win.reshape(-1, patch_size * patch_size * c)


def _patch_grid(shape, patch_size: int, stride: int):
    h, w = shape[:2]
    return (h - patch_size) // stride + 1, (w - patch_size) // stride + 1


def project(img, filters: np.ndarray, stride: int = 1) -> np.ndarray:
    """Project all patches of ``img`` on each filter; returns ``(k, M)``."""
    filters = np.asarray(filters, dtype=np.float64)
    k = filters.shape[0]
    patches = extract_patches(img, filters.shape[1], stride)
    return filters.reshape(k, -1) @ patches.T


def scatter(values: np.ndarray, filters: np.ndarray, shape, stride: int = 1) -> np.ndarray:
    """Adjoint of :func:`project`: spread sample-space values back onto pixels.

    ``values`` has shape ``(k, M)``; the result has the image ``shape``.
    Each value is multiplied by its filter and added onto every pixel of the
    patch it came from.
    """
    filters = np.asarray(filters, dtype=np.float64)
    k, p, _, c = filters.shape
    h, w = shape[:2]
    nh, nw = _patch_grid(shape, p, stride)
    values = np.asarray(values, dtype=np.float64).reshape(k, nh * nw)
    # Channel-first planes keep the p*p shifted adds on contiguous memory.
    planes = (filters.reshape(k, -1).T @ values).reshape(p, p, c, nh, nw)
    out = np.zeros((c, h, w))
    row_end = stride * (nh - 1) + 1
    col_end = stride * (nw - 1) + 1
    for di in range(p):
        for dj in range(p):
            out[:, di:di + row_end:stride, dj:dj + col_end:stride] += planes[di, dj]
    return out.transpose(1, 2, 0).copy()


def project_patches(img, w: ProjectionFilter, stride: int = 1) -> ProjectedSamples:
    img = as_image(img)
    values = project(img, w.weights[None], stride)[0]
    nh, nw = _patch_grid(img.shape, w.patch_size, stride)
    rows = np.arange(nh) * stride
    cols = np.arange(nw) * stride
    source = (rows[:, None] * img.shape[1] + cols[None, :]).ravel()
    return ProjectedSamples(values, source)


def sort_pairing(p, q) -> SortPairing:
    return SortPairing(np.argsort(p), np.argsort(q))


def sorted_l1(p, q) -> tuple[float, np.ndarray]:
    """Mean absolute difference of sorted ``p`` and ``q``, and its gradient in ``q``.

    The i-th smallest ``q`` is paired with the i-th smallest ``p``; the
    gradient entry of ``q[j]`` is ``sign(q[j] - partner) / M`` with
    ``sign(0) == 0``.
    """
    p = np.asarray(getattr(p, "values", p), dtype=np.float64)
    q = np.asarray(getattr(q, "values", q), dtype=np.float64)
    if p.shape != q.shape or p.ndim != 1:
        raise ValueError(f"sorted_l1 needs equal-length 1D inputs, got {p.shape} and {q.shape}")
    loss, grad = _sorted_l1_batch(p[None], q[None])
    return float(loss[0]), grad[0]


def _sorted_l1_batch(p: np.ndarray, q: np.ndarray):
    """Row-wise sorted L1 for ``(k, M)`` arrays; returns per-row losses and dL/dq."""
    m = p.shape[1]
    p_sorted = np.sort(p, axis=1)
    perm_q = np.argsort(q, axis=1)
    q_sorted = np.take_along_axis(q, perm_q, axis=1)
    diff = q_sorted - p_sorted
    losses = np.mean(np.abs(diff), axis=1)
    grad = np.empty_like(q)
    np.put_along_axis(grad, perm_q, np.sign(diff) / m, axis=1)
    return losses, grad


def _cycle_index(m: int, n: int) -> np.ndarray:
    return np.arange(n) % m


def equalize_counts(a, b):
    """Repeat the shorter sample list cyclically until both have equal length."""
    a = np.asarray(getattr(a, "values", a))
    b = np.asarray(getattr(b, "values", b))
    if len(a) == 0 or len(b) == 0:
        raise ValueError("cannot equalize an empty sample list")
    n = max(len(a), len(b))
    if len(a) < n:
        a = a[_cycle_index(len(a), n)]
    if len(b) < n:
        b = b[_cycle_index(len(b), n)]
    return a, b


def _fold_cyclic(grad: np.ndarray, m: int) -> np.ndarray:
    """Sum gradients of cyclically repeated columns back onto the ``m`` originals."""
    k, n = grad.shape
    if n == m:
        return grad
    out = np.zeros((k, m))
    full = n // m
    out += grad[:, :full * m].reshape(k, full, m).sum(axis=1)
    rem = n - full * m
    out[:, :rem] += grad[:, full * m:]
    return out


def swd_loss_and_grad_with_filters(x, y, filters, stride: int = 1, target_augment=None):
    """Patch SWD between target ``x`` and image ``y`` for a fixed filter bank.

    ``target_augment`` is an optional integer array of per-patch
    multiplicities for ``x``: patch ``j`` of the target contributes
    ``target_augment[j]`` copies of its projection.  Returns ``(loss, grad)``
    with ``grad`` shaped like ``y``.
    """
    x = as_image(x)
    y = as_image(y)
    filters = np.asarray(filters, dtype=np.float64)
    if filters.ndim != 4:
        raise ValueError(f"filters must have shape (k, p, p, C), got {filters.shape}")
    k, p = filters.shape[:2]
    for img in (x, y):
        _check_patch_fits(img.shape, p, stride)
        if img.shape[2] != filters.shape[3]:
            raise ValueError("filter channels do not match image channels")

    px = project(x, filters, stride)
    qy = project(y, filters, stride)
    if target_augment is not None:
        mult = np.asarray(target_augment, dtype=np.intp)
        if mult.shape != (px.shape[1],):
            raise ValueError(f"target_augment needs {px.shape[1]} multiplicities, got {mult.shape}")
        px = np.repeat(px, mult, axis=1)

    m_y = qy.shape[1]
    n = max(px.shape[1], m_y)
    if px.shape[1] < n:
        px = px[:, _cycle_index(px.shape[1], n)]
    if m_y < n:
        qy = qy[:, _cycle_index(m_y, n)]

    losses, grad_q = _sorted_l1_batch(px, qy)
    grad_q = _fold_cyclic(grad_q, m_y)
    loss = float(np.mean(losses))
    grad = scatter(grad_q / k, filters, y.shape, stride)
    return loss, grad


def patch_swd_loss_and_grad(x, y, k: int, patch_size: int, stride: int,
                            rng: np.random.Generator, target_augment=None):
    """Estimate patch SWD with ``k`` fresh random filters drawn from ``rng``."""
    if k < 1:
        raise ValueError(f"number of projections must be positive, got {k}")
    x = as_image(x)
    filters = sample_projections(k, patch_size, x.shape[2], rng)
    return swd_loss_and_grad_with_filters(x, y, filters, stride, target_augment)


def patch_swd(x, y, patch_size: int = 7, stride: int = 1, k: int = 128, seed: int = 0) -> float:
    """Fixed-seed patch SWD value, for evaluation and reports."""
    x = as_image(x)
    filters = sample_projections(k, patch_size, x.shape[2], np.random.default_rng(seed))
    return swd_loss_and_grad_with_filters(x, y, filters, stride)[0]
