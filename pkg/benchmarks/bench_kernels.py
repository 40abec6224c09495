"""Compare the compiled kernels against the pure-Python fallback.

Both variants live in fhn_tis._kernels; the fallback is selected by the
FHN_TIS_NO_NUMBA environment variable at import time. This script loads the
module twice (once per mode) so the same build is timed both ways.

Run: python benchmarks/bench_kernels.py [--repeats 5] [--t-final 200]
"""
import argparse
import importlib.util
import math
import os
import time

import numpy as np

import fhn_tis._kernels as fast


def load_pure():
    old = os.environ.get("FHN_TIS_NO_NUMBA")
    os.environ["FHN_TIS_NO_NUMBA"] = "1"
    try:
        spec = importlib.util.spec_from_file_location("fhn_tis_kernels_pure",
                                                      fast.__file__)
        mod = importlib.util.module_from_spec(spec)
        spec.loader.exec_module(mod)
    finally:
        if old is None:
            os.environ.pop("FHN_TIS_NO_NUMBA", None)
        else:
            os.environ["FHN_TIS_NO_NUMBA"] = old
    return mod


def timed(func, repeats):
    best = math.inf
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = func()
        t1 = time.perf_counter()
        best = min(best, t1 - t0)
    return best * 1000.0, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=5,
                    help="timing repeats per kernel; the best run is reported")
    ap.add_argument("--t-final", type=float, default=200.0,
                    help="integration horizon for the trajectory workloads")
    args = ap.parse_args()

    pure = load_pure()
    print(f"compiled path: numba enabled = {fast.NUMBA_ENABLED}")
    if not fast.NUMBA_ENABLED:
        print("warning: FHN_TIS_NO_NUMBA is set, so both columns run the "
              "fallback and the speedup is meaningless")

    A = B = 0.3
    beta, gamma, eps = 0.8, 0.5, 0.02
    empty = np.empty(0)
    tf = args.t_final
    rng = np.random.default_rng(0)
    trace = rng.standard_normal(1_000_000)

    workloads = [
        ("cosine_cell_spikes (T={:g}, dt=0.01)".format(tf),
         lambda m: m.cosine_cell_spikes(A, B, beta, gamma, eps, 0.02,
                                        0.0, 0.0, tf, 0.01, 0.0, -0.5)),
        ("rk4_trajectory    (T={:g}, dt=0.01)".format(tf),
         lambda m: m.rk4_trajectory(m.DRIVE_COSINE, 0.02, 0.0, empty, 1.0,
                                    A, B, beta, gamma, eps,
                                    0.0, 0.0, 0.0, tf, 0.01, 10)),
        ("dp45_trajectory   (T={:g}, adaptive)".format(tf),
         lambda m: m.dp45_trajectory(m.DRIVE_COSINE, 0.02, 0.0, empty, 1.0,
                                     A, B, beta, gamma, eps,
                                     0.0, 0.0, 0.0, tf, 1e-8, 1e-10, 1.0, 10)),
        ("transport_arc     (kappa=2, ds=5e-4)",
         lambda m: m.transport_arc(A, B, beta, gamma, 2.0, 0.0, -0.62,
                                   math.pi / 2.0, 5e-4, 1e-6, 10)),
        ("spike_scan        (1e6 samples)",
         lambda m: m.spike_scan(trace, 1.5, -1.5)),
    ]

    # first calls trigger compilation; keep that out of the timings
    for _, call in workloads:
        call(fast)
        call(pure)

    width = max(len(name) for name, _ in workloads)
    print(f"{'kernel':<{width}}  {'numpy ms':>10}  {'numba ms':>10}  speedup")
    for name, call in workloads:
        t_py, _ = timed(lambda: call(pure), args.repeats)
        t_nb, _ = timed(lambda: call(fast), args.repeats)
        print(f"{name:<{width}}  {t_py:>10.3f}  {t_nb:>10.3f}  "
              "{:.2f}x".format(t_py / max(1e-9, t_nb)))


if __name__ == "__main__":
    main()
