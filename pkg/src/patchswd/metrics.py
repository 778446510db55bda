"""Reference distances between patch sample sets.

Bidirectional similarity (coherence + completeness) and the relaxed earth
mover's distance are nearest-neighbour based and blind to how often a patch
occurs.  The exact 1D and small-instance Wasserstein distances serve as
ground truth for the sliced estimator.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass

import numpy as np

from .imaging import as_image
from .swd import extract_patches, patch_swd

MAX_EXACT_SAMPLES = 8


def as_samples(samples) -> np.ndarray:
    """Coerce a sample set to an ``(n, dim)`` float array; 1-D input means scalars."""
    arr = np.asarray(samples, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ValueError(f"sample set must be a non-empty (n, dim) array, got shape {arr.shape}")
    return arr


def nearest_neighbors(queries, keys, block_size: int = 1024, dtype=np.float64):
    """Exact L2 nearest neighbour in ``keys`` of every row of ``queries``.

    Candidates are ranked block by block with the ``|a|^2 + |b|^2 - 2 a.b``
    expansion so memory stays at ``block_size * len(keys)``.  The returned
    distances are recomputed from explicit differences, so identical vectors
    give exactly zero.

    Returns ``(indices, distances)``.
    """
    a = as_samples(queries)
    b = as_samples(keys)
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    a_work = a.astype(dtype, copy=False)
    b_work = b.astype(dtype, copy=False)
    b_sq = np.einsum("ij,ij->i", b_work, b_work)
    b_t = np.ascontiguousarray(b_work.T)
    idx = np.empty(len(a), dtype=np.intp)
    for start in range(0, len(a), block_size):
        blk = a_work[start:start + block_size]
        # |a|^2 is constant per row and does not change the argmin.
        scores = blk @ b_t
        scores *= -2.0
        scores += b_sq
        idx[start:start + len(blk)] = np.argmin(scores, axis=1)
    dist = np.sqrt(np.sum((a - b[idx]) ** 2, axis=1))
    return idx, dist


def bds(P, Q):
    """Coherence, completeness and their sum (bidirectional similarity)."""
    P = as_samples(P)
    Q = as_samples(Q)
    if P.shape[1] != Q.shape[1]:
        raise ValueError(f"dimension mismatch: {P.shape[1]} vs {Q.shape[1]}")
    coherence = float(np.mean(nearest_neighbors(P, Q)[1]))
    completeness = float(np.mean(nearest_neighbors(Q, P)[1]))
    return coherence, completeness, coherence + completeness


def remd(P, Q) -> float:
    coherence, completeness, _ = bds(P, Q)
    return max(coherence, completeness)


def wasserstein_1d_exact(p, q) -> float:
    """Exact 1D Wasserstein-1 distance between equal-size samples (by sorting)."""
    p = np.asarray(p, dtype=np.float64).ravel()
    q = np.asarray(q, dtype=np.float64).ravel()
    if len(p) != len(q):
        raise ValueError(f"sample sizes differ: {len(p)} vs {len(q)}")
    return float(np.mean(np.abs(np.sort(q) - np.sort(p))))


def wasserstein_exact_small(P, Q) -> float:
    """Brute-force optimal matching cost between two small equal-size sample sets.

    Enumerates all pairings, so it is limited to ``MAX_EXACT_SAMPLES`` samples.
    """
    P = as_samples(P)
    Q = as_samples(Q)
    n = len(P)
    if len(Q) != n:
        raise ValueError(f"sample counts differ: {n} vs {len(Q)}")
    if n > MAX_EXACT_SAMPLES:
        raise ValueError(f"brute force is limited to {MAX_EXACT_SAMPLES} samples, got {n}")
    if P.shape[1] != Q.shape[1]:
        raise ValueError(f"dimension mismatch: {P.shape[1]} vs {Q.shape[1]}")
    cost = np.sqrt(np.sum((P[:, None, :] - Q[None, :, :]) ** 2, axis=2))
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.intp)
    totals = cost[np.arange(n), perms].mean(axis=1)
    return float(totals.min())


@dataclass(frozen=True)
class DistanceReport:
    coherence: float
    completeness: float
    bds: float
    remd: float
    patch_swd: float
    patch_size: int
    stride: int

    def to_text(self) -> str:
        return "\n".join(f"{k}={v}" for k, v in asdict(self).items())

    def to_record(self) -> str:
        return json.dumps(asdict(self), sort_keys=False)


REPORT_PROJECTIONS = 128


def distance_report(x, y, patch_size: int = 7, stride: int = 1, seed: int = 0) -> DistanceReport:
    """Patch distances between reference ``x`` and generated ``y``.

    The argument order follows the loss: ``x`` is the target.  Coherence
    averages over patches of ``y``, completeness over patches of ``x``.  The
    SWD term uses ``REPORT_PROJECTIONS`` filters drawn from ``seed``.
    """
    x = as_image(x)
    y = as_image(y)
    px = extract_patches(x, patch_size, stride)
    py = extract_patches(y, patch_size, stride)
    coherence, completeness, total = bds(py, px)
    swd_value = patch_swd(x, y, patch_size, stride, k=REPORT_PROJECTIONS, seed=seed)
    return DistanceReport(coherence, completeness, total, max(coherence, completeness),
                          swd_value, patch_size, stride)
