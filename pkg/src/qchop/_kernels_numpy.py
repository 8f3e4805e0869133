"""Pure-numpy fallback implementations of the hot kernels.

Same signatures and semantics as ``_kernels_numba``.  The damped scan is a
genuine sequential recurrence, so the fallback is an interpreted loop; the
coherence combine is ordinary broadcasting.
"""

import numpy as np


def damped_scan(decay, seg):
    """Q[0] = 0;  Q[i+1] = decay[i] * Q[i] + seg[i].

    decay and seg are complex arrays of length n; returns Q of length n+1.
    All |decay[i]| <= 1 for physical inputs, so the recurrence is stable.
    """
    n = seg.shape[0]
    out = np.empty(n + 1, np.complex128)
    acc = 0.0 + 0.0j
    out[0] = acc
    for i in range(n):
        acc = decay[i] * acc + seg[i]
        out[i + 1] = acc
    return out


def coherence_combine(b, t1, t2, r1, r2, eps_t, eps_r):
    """g2 matrices from the inelastic kernel and amplitude products.

    b, t2, r2 are (nc, nd) matrices; t1, r1 are (nc,) column amplitudes.
    Entries whose denominator amplitude product falls below eps_t (resp.
    eps_r) in magnitude are flagged NaN rather than clamped.
    """
    den_t = t1[:, None] * t2
    den_r = r1[:, None] * r2
    with np.errstate(divide="ignore", invalid="ignore"):
        x = 1.0 + b / den_t
        g2_rr = x.real * x.real + x.imag * x.imag
        x = 1.0 + b / den_r
        g2_ll = x.real * x.real + x.imag * x.imag
    g2_rr[np.abs(den_t) < eps_t] = np.nan
    g2_ll[np.abs(den_r) < eps_r] = np.nan
    return g2_rr, g2_ll
