"""
Why nearest-neighbour distances are not distribution distances
==============================================================

Two sample sets on the same support {0, a} but with opposite frequencies:
every sample has an exact match on the other side, so bidirectional
similarity and its relaxed EMD are zero.  The Wasserstein distance sees the
mass that has to move, and grows with a.
"""

import numpy as np

from patchswd.metrics import bds, remd, wasserstein_1d_exact
from patchswd.swd import swd_loss_and_grad_with_filters

n = 1000
for a in (1.0, 2.0, 4.0):
    P = np.full(n, a)
    P[0] = 0.0          # one 0, the rest a
    Q = np.zeros(n)
    Q[-1] = a           # one a, the rest 0
    # 1x1 "patches" with a unit filter reduce the patch SWD to the 1D distance
    swd, _ = swd_loss_and_grad_with_filters(P.reshape(1, -1, 1), Q.reshape(1, -1, 1), np.ones((1, 1, 1, 1)))
    print(f"a={a:g}: bds={bds(P, Q)[2]} remd={remd(P, Q)} W1={wasserstein_1d_exact(P, Q)} swd={swd}")
