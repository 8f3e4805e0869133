"""Numba @njit implementations of the hot kernels.

See ``_kernels_numpy`` for the reference semantics.  The coherence combine
is parallelized over rows; every output element is written exactly once, so
results are independent of the thread count.
"""

import numpy as np
from numba import njit, prange


@njit(cache=True)
def damped_scan(decay, seg):
    n = seg.shape[0]
    out = np.empty(n + 1, np.complex128)
    acc = 0.0 + 0.0j
    out[0] = acc
    for i in range(n):
        acc = decay[i] * acc + seg[i]
        out[i + 1] = acc
    return out


@njit(cache=True, parallel=True)
def coherence_combine(b, t1, t2, r1, r2, eps_t, eps_r):
    nc, nd = b.shape
    g2_rr = np.empty((nc, nd), np.float64)
    g2_ll = np.empty((nc, nd), np.float64)
    for i in prange(nc):
        for j in range(nd):
            den_t = t1[i] * t2[i, j]
            den_r = r1[i] * r2[i, j]
            if abs(den_t) < eps_t:
                g2_rr[i, j] = np.nan
            else:
                x = 1.0 + b[i, j] / den_t
                g2_rr[i, j] = x.real * x.real + x.imag * x.imag
            if abs(den_r) < eps_r:
                g2_ll[i, j] = np.nan
            else:
                x = 1.0 + b[i, j] / den_r
                g2_ll[i, j] = x.real * x.real + x.imag * x.imag
    return g2_rr, g2_ll
