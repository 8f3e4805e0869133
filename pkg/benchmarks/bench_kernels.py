#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Two layers:
  * kernel level — the damped period scan (sequential recurrence) and the
    coherence-grid combine, timed on synthetic arrays with both
    implementations imported side by side;
  * pipeline level — one envelope table build plus one 257x512 coherence
    grid, run in subprocesses with QCHOP_BACKEND=numba / numpy.

Usage: python benchmarks/bench_kernels.py [--quick]
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from qchop import _kernels_numpy

try:
    from qchop import _kernels_numba
except ImportError:
    _kernels_numba = None


def _time(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernels(n_scan, grid_shape, repeat):
    rng = np.random.default_rng(7)
    decay = (rng.uniform(0.2, 1.0, n_scan) * np.exp(1j * rng.uniform(-3, 3, n_scan))).astype(
        np.complex128
    )
    seg = (rng.normal(size=n_scan) + 1j * rng.normal(size=n_scan)).astype(np.complex128)
    nc, nd = grid_shape
    b = rng.normal(size=(nc, nd)) + 1j * rng.normal(size=(nc, nd))
    t1 = rng.normal(size=nc) + 1j * rng.normal(size=nc)
    t2 = rng.normal(size=(nc, nd)) + 1j * rng.normal(size=(nc, nd))
    combine_args = (b, t1, t2, 0.5 * t1, 0.5 * t2, 1e-6, 1e-6)

    rows = []
    for name, fn_np, fn_nb in (
        ("damped_scan", _kernels_numpy.damped_scan, None if _kernels_numba is None else _kernels_numba.damped_scan),
        ("coherence_combine", _kernels_numpy.coherence_combine, None if _kernels_numba is None else _kernels_numba.coherence_combine),
    ):
        args = (decay, seg) if name == "damped_scan" else combine_args
        t_np = _time(fn_np, *args, repeat=repeat)
        if fn_nb is not None:
            fn_nb(*args)  # compile
            t_nb = _time(fn_nb, *args, repeat=repeat)
        else:
            t_nb = float("nan")
        rows.append((name, t_np, t_nb))
    return rows


PIPELINE_CODE = """
import json, time
import qchop
import qchop._engine as engine_mod
from qchop.presets import unit_rate_protocol
from qchop.single_photon import ScatterParams, envelope
from qchop.two_photon import coherence_grid

protocol = unit_rate_protocol("sign_change_cosine", 10.0)
params = ScatterParams(delta=0.0, U=4.0, protocol=protocol)
envelope(params)  # warm any JIT
coherence_grid(params, n_tauc=33, n_taud=32)

best_env = best_grid = float("inf")
for _ in range(3):
    engine_mod.clear_caches()  # cold table builds, warm JIT
    t0 = time.perf_counter()
    env = envelope(params)
    t1 = time.perf_counter()
    cg = coherence_grid(params, n_tauc=257, n_taud=512)
    t2 = time.perf_counter()
    best_env = min(best_env, t1 - t0)
    best_grid = min(best_grid, t2 - t1)
print(json.dumps({
    "backend": qchop.BACKEND_NAME,
    "envelope_s": best_env,
    "coherence_grid_s": best_grid,
}))
"""


def bench_pipeline(backend):
    env = dict(os.environ, QCHOP_BACKEND=backend)
    out = subprocess.run(
        [sys.executable, "-c", PIPELINE_CODE],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true", help="smaller sizes, fewer repeats")
    args = ap.parse_args()
    n_scan = 1 << 16 if args.quick else 1 << 20
    shape = (256, 256) if args.quick else (1024, 1024)
    repeat = 3 if args.quick else 5

    print(f"kernel benchmarks  (scan n={n_scan}, combine grid {shape[0]}x{shape[1]})")
    print(f"{'kernel':<20}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>9}")
    for name, t_np, t_nb in bench_kernels(n_scan, shape, repeat):
        ratio = t_np / t_nb if t_nb == t_nb else float("nan")
        print(f"{name:<20}{1e3 * t_np:>12.2f}{1e3 * t_nb:>12.2f}{ratio:>8.1f}x")

    print("\npipeline benchmarks (subprocess per backend)")
    print(f"{'stage':<20}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>9}")
    res = {}
    for backend in ("numpy", "numba"):
        try:
            res[backend] = bench_pipeline(backend)
        except (subprocess.CalledProcessError, json.JSONDecodeError) as exc:
            print(f"  {backend} pipeline failed: {exc}", file=sys.stderr)
            return 1
    for key, label in (("envelope_s", "envelope build"), ("coherence_grid_s", "coherence grid")):
        t_np, t_nb = res["numpy"][key], res["numba"][key]
        print(f"{label:<20}{1e3 * t_np:>12.2f}{1e3 * t_nb:>12.2f}{t_np / t_nb:>8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
