"""Single-iteration timing of the SWD step against an exact nearest-neighbour pass.

Both timings run on images of growing size so the cost can be plotted
against the patch count ``M``.  By default BLAS is pinned to one thread so
the comparison reflects operation counts rather than core counts.
"""

from __future__ import annotations

import contextlib
import math
import statistics
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np
from threadpoolctl import threadpool_info, threadpool_limits

from .metrics import nearest_neighbors
from .swd import extract_patches, num_patches, patch_swd_loss_and_grad

# Byte size of a full M x M float32 distance matrix above which a pass is refused.
DEFAULT_MEMORY_CAP = 64 * 1024 ** 3
MIN_REPEATS = 5


class MemoryCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class BenchRecord:
    method: str
    M: int
    wall_time: float
    image_dims: tuple[int, int, int]
    patch_size: int
    k: Optional[int] = None
    repeats: int = MIN_REPEATS
    threads: int = 1

    def to_csv(self) -> str:
        k = "" if self.k is None else str(self.k)
        return f"{self.method},{self.M},{self.patch_size},{k},{self.wall_time:.6g}"


CSV_HEADER = "method,M,patch,k,median_seconds"


def dims_for_patch_count(m: int, patch_size: int = 7) -> tuple[int, int]:
    """Square image size whose stride-1 patch count is closest to ``m``."""
    side = max(1, round(math.sqrt(m))) + patch_size - 1
    return side, side


def _threads(parallel: bool, threads: Optional[int]):
    if parallel:
        return contextlib.nullcontext() if threads is None else threadpool_limits(threads)
    return threadpool_limits(1)


def time_call(fn, repeats: int = MIN_REPEATS) -> float:
    """Median wall time of ``fn()`` over ``repeats`` runs after one discarded warm-up."""
    if repeats < MIN_REPEATS:
        raise ValueError(f"need at least {MIN_REPEATS} repetitions, got {repeats}")
    fn()
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def _random_pair(dims, seed: int):
    rng = np.random.default_rng(seed)
    h, w, c = dims
    return rng.uniform(-1, 1, (h, w, c)), rng.uniform(-1, 1, (h, w, c))


def _as_dims(d, channels: int):
    return (d[0], d[1], channels) if len(d) == 2 else tuple(d)


def bench_swd_iter(image_dims, patch_size: int = 7, k: int = 64, seed: int = 0,
                   repeats: int = MIN_REPEATS, channels: int = 3,
                   parallel: bool = False, threads: Optional[int] = None) -> list[BenchRecord]:
    """Time one full loss-and-gradient evaluation (``k`` projections) per image size."""
    records = []
    with _threads(parallel, threads):
        n_threads = _thread_count()
        for d in image_dims:
            dims = _as_dims(d, channels)
            x, y = _random_pair(dims, seed)
            counter = iter(range(10 ** 9))

            def step():
                rng = np.random.default_rng([seed, next(counter)])
                patch_swd_loss_and_grad(x, y, k, patch_size, 1, rng)

            t = time_call(step, repeats)
            records.append(BenchRecord("swd", num_patches(dims[0], dims[1], patch_size, 1), t,
                                       dims, patch_size, k, repeats, n_threads))
    return records


def exact_nn_pass(queries, keys, block_size: int = 1024, dtype=np.float32,
                  memory_cap: int = DEFAULT_MEMORY_CAP):
    """Exact nearest neighbour of every query among ``keys``, blocked to bound memory.

    Refuses the job when the full ``M x M`` distance matrix would exceed
    ``memory_cap`` bytes, since that signals a size the quadratic baseline
    should not be asked to run.
    """
    m_q, m_k = len(queries), len(keys)
    full_bytes = m_q * m_k * np.dtype(dtype).itemsize
    if full_bytes > memory_cap:
        raise MemoryCapExceeded(
            f"{m_q}x{m_k} distance matrix needs {full_bytes / 2**30:.1f} GiB, "
            f"cap is {memory_cap / 2**30:.1f} GiB")
    return nearest_neighbors(queries, keys, block_size=block_size, dtype=dtype)[0]


def naive_nn(queries, keys) -> np.ndarray:
    """Unblocked reference: full distance matrix, then argmin."""
    a = np.asarray(queries, dtype=np.float64)
    b = np.asarray(keys, dtype=np.float64)
    d = np.sum((a[:, None, :] - b[None, :, :]) ** 2, axis=2)
    return np.argmin(d, axis=1)


def bench_nn_iter(image_dims, patch_size: int = 7, seed: int = 0, repeats: int = MIN_REPEATS,
                  channels: int = 3, memory_cap: int = DEFAULT_MEMORY_CAP,
                  parallel: bool = False, threads: Optional[int] = None) -> list[BenchRecord]:
    """Time one exact nearest-neighbour pass from every patch of one image to the other."""
    records = []
    with _threads(parallel, threads):
        n_threads = _thread_count()
        for d in image_dims:
            dims = _as_dims(d, channels)
            x, y = _random_pair(dims, seed)
            px = extract_patches(x, patch_size).astype(np.float32)
            py = extract_patches(y, patch_size).astype(np.float32)
            t = time_call(lambda: exact_nn_pass(py, px, memory_cap=memory_cap), repeats)
            records.append(BenchRecord("exact_nn", len(px), t, dims, patch_size, None,
                                       repeats, n_threads))
    return records


def fit_loglog_slope(records) -> float:
    """Least-squares slope of ``log(time)`` against ``log(M)``."""
    ms = np.array([r.M for r in records], dtype=np.float64)
    ts = np.array([r.wall_time for r in records], dtype=np.float64)
    if len(ms) < 4:
        raise ValueError(f"need at least 4 records, got {len(ms)}")
    if ms.max() / ms.min() < 16:
        raise ValueError(f"patch counts span only {ms.max() / ms.min():.1f}x, need 16x")
    slope, _ = np.polyfit(np.log(ms), np.log(ts), 1)
    return float(slope)


def _thread_count() -> int:
    counts = [info["num_threads"] for info in threadpool_info() if info.get("user_api") == "blas"]
    return max(counts) if counts else 1
