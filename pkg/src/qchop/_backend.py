"""Numba/numpy kernel backend selection.

The hot inner kernels (the sequential damped scan over a period grid and the
elementwise coherence-grid combine) exist twice: a numba @njit version and a
pure-numpy fallback.  Selection happens once at import time from the
environment variable ``QCHOP_BACKEND``:

    QCHOP_BACKEND=numba   require numba (ImportError if missing)
    QCHOP_BACKEND=numpy   force the pure-numpy fallback
    QCHOP_BACKEND=auto    use numba when importable (default)

``benchmarks/bench_kernels.py`` compares the two.
"""

import os

_CHOICE = os.environ.get("QCHOP_BACKEND", "auto").strip().lower()

if _CHOICE not in ("auto", "numba", "numpy"):
    raise ImportError(f"QCHOP_BACKEND must be auto|numba|numpy, got {_CHOICE!r}")

if _CHOICE == "numpy":
    from . import _kernels_numpy as kernels

    HAS_NUMBA = False
elif _CHOICE == "numba":
    from . import _kernels_numba as kernels

    HAS_NUMBA = True
else:
    try:
        from . import _kernels_numba as kernels

        HAS_NUMBA = True
    except ImportError:
        from . import _kernels_numpy as kernels

        HAS_NUMBA = False

BACKEND_NAME = "numba" if HAS_NUMBA else "numpy"


def set_num_threads(n: int) -> None:
    """Set the numba thread count; a no-op on the numpy backend."""
    if n < 1:
        raise ValueError("thread count must be >= 1")
    if HAS_NUMBA:
        import numba

        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
