"""
Cost of one SWD step vs one exact nearest-neighbour pass
========================================================

Sorting makes the SWD step roughly linear in the patch count M, while an
exact nearest-neighbour pass compares all pairs.  Timings are single-threaded
medians; the fitted log-log slopes are the quantities of interest.

    python demos/scaling.py          # M up to 3e4, under a minute
"""

from patchswd import bench

counts = [1000, 3000, 10000, 30000]
dims = [bench.dims_for_patch_count(m) for m in counts]

swd = bench.bench_swd_iter(dims)
nn = bench.bench_nn_iter(dims)

print(bench.CSV_HEADER)
for r in swd + nn:
    print(r.to_csv())
print(f"slope swd {bench.fit_loglog_slope(swd):.2f}  exact_nn {bench.fit_loglog_slope(nn):.2f}")
