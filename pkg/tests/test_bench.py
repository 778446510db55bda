import math

import numpy as np
import pytest

from patchswd import bench as B
from patchswd.swd import extract_patches


def synthetic(times_of_m, ms):
    return [B.BenchRecord("swd", int(m), times_of_m(m), (1, 1, 3), 7, 64) for m in ms]


# --- slope fitting ---------------------------------------------------------

def test_slope_quadratic():
    recs = synthetic(lambda m: 3e-9 * m ** 2, [1e3, 3e3, 1e4, 3e4, 1e5])
    assert B.fit_loglog_slope(recs) == pytest.approx(2.0, abs=0.01)


def test_slope_m_log_m():
    ms = np.logspace(3, 6, 13)
    slope = B.fit_loglog_slope(synthetic(lambda m: 1e-7 * m * math.log(m), ms))
    # the local slope is 1 + 1/ln(M): 1.145 at 10^3 falling to 1.072 at 10^6
    assert 1.10 <= round(slope, 2) <= 1.20
    assert 1 + 1 / math.log(1e6) < slope < 1 + 1 / math.log(1e3)


def test_slope_constant():
    assert B.fit_loglog_slope(synthetic(lambda m: 0.5, [1e3, 4e3, 1.6e4, 6.4e4])) == pytest.approx(0.0, abs=1e-9)


def test_slope_needs_span_and_count():
    with pytest.raises(ValueError):
        B.fit_loglog_slope(synthetic(lambda m: m, [1e3, 2e3, 4e3, 8e3]))
    with pytest.raises(ValueError):
        B.fit_loglog_slope(synthetic(lambda m: m, [1e3, 1e5, 1e6]))


# --- records and plumbing --------------------------------------------------

def test_csv_line():
    r = B.BenchRecord("swd", 10000, 0.0123456789, (106, 106, 3), 7, 64)
    assert r.to_csv() == "swd,10000,7,64,0.0123457"
    assert B.BenchRecord("exact_nn", 5, 1.5, (5, 5, 3), 7).to_csv() == "exact_nn,5,7,,1.5"
    assert B.CSV_HEADER == "method,M,patch,k,median_seconds"


def test_dims_for_patch_count():
    h, w = B.dims_for_patch_count(10000, 7)
    assert (h - 6) * (w - 6) == 10000


def test_time_call_requires_five_repeats():
    with pytest.raises(ValueError):
        B.time_call(lambda: None, repeats=4)
    calls = []
    assert B.time_call(lambda: calls.append(1), repeats=5) >= 0
    assert len(calls) == 6  # warm-up plus five timed runs


def test_records_are_complete():
    recs = B.bench_swd_iter([(20, 20), (30, 30)], patch_size=5, k=8)
    assert [r.M for r in recs] == [256, 676]
    assert all(r.wall_time > 0 and r.repeats >= 5 and r.k == 8 for r in recs)
    assert recs[0].threads == 1
    nn = B.bench_nn_iter([(20, 20)], patch_size=5)
    assert nn[0].method == "exact_nn" and nn[0].k is None and nn[0].M == 256


# --- nearest-neighbour baseline --------------------------------------------

def test_nn_matches_naive_oracle(rng):
    x = rng.uniform(-1, 1, (50, 46, 3))
    y = rng.uniform(-1, 1, (50, 46, 3))
    px = extract_patches(x, 7)
    py = extract_patches(y, 7)
    assert len(px) <= 2000
    assert np.array_equal(B.exact_nn_pass(py, px, block_size=256, dtype=np.float64), B.naive_nn(py, px))


def test_nn_float32_agrees_on_separated_data(rng):
    keys = rng.uniform(-1, 1, (500, 20))
    queries = keys[rng.permutation(500)] + 1e-3 * rng.standard_normal((500, 20))
    assert np.array_equal(B.exact_nn_pass(queries, keys), B.naive_nn(queries, keys))


def test_memory_cap_refusal():
    q = np.zeros((1000, 4), dtype=np.float32)
    with pytest.raises(B.MemoryCapExceeded):
        B.exact_nn_pass(q, q, memory_cap=1000 * 1000 * 4 - 1)
    B.exact_nn_pass(q, q, memory_cap=1000 * 1000 * 4)


# --- scaling measurements (wall-clock, single-threaded) ---------------------

def dims(*ms):
    return [B.dims_for_patch_count(m) for m in ms]


@pytest.mark.slow
def test_swd_scaling_and_linearity_in_k():
    base, double = B.bench_swd_iter(dims(10000, 20000))
    assert double.wall_time / base.wall_time < 2.6
    more_k = B.bench_swd_iter(dims(10000), k=128)[0]
    assert 1.6 <= more_k.wall_time / base.wall_time <= 2.4


@pytest.mark.slow
def test_swd_median_is_stable():
    a = B.bench_swd_iter(dims(10000), repeats=7)[0]
    b = B.bench_swd_iter(dims(10000), repeats=7)[0]
    assert abs(a.wall_time - b.wall_time) <= 0.2 * min(a.wall_time, b.wall_time)


@pytest.mark.slow
def test_nn_scaling_is_quadratic():
    small, double = B.bench_nn_iter(dims(5000, 10000))
    assert 3.0 <= double.wall_time / small.wall_time <= 5.0


def test_crossover_report():
    swd = B.bench_swd_iter(dims(400, 1000))
    nn = B.bench_nn_iter(dims(400, 1000))
    for s, n in zip(swd, nn):
        print(f"M={s.M}: swd={s.wall_time:.4f}s exact_nn={n.wall_time:.4f}s")
