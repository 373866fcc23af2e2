"""Time the recurrence kernels: numba-compiled versus the numpy reference.

    python benchmarks/bench_kernels.py [--sizes 1000,10000,100000] [--repeat 5]

Both paths live in ``esagraph._accel``; the numba kernels are compiled
once before timing. Results are checked for agreement before printing.
"""
from __future__ import annotations

import argparse
from timeit import default_timer as timer

import numpy as np

from esagraph import _accel


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = timer()
        fn()
        best = min(best, timer() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="1000,10000,100000")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if not _accel.USE_NUMBA:
        print("numba disabled (ESAGRAPH_DISABLE_NUMBA or not installed); timing numpy only")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<16}{'n':>10}{'numpy [s]':>14}{'numba [s]':>14}{'speedup':>10}")
    for n in (int(s) for s in args.sizes.split(",")):
        t11 = (2.0 + rng.random(n)) + 1j * rng.random(n)
        t12 = -(0.5 + rng.random(n)) + 0j
        cases = [
            ("qr_log_growth", lambda: _accel.qr_log_growth_numpy(t11, t12),
             lambda: _accel._qr_log_growth_nb(t11, t12)),
            ("propagate", lambda: _accel.propagate_numpy(t11 / 3, t12 / 3, 1.0, 0.0),
             lambda: _accel._propagate_nb(t11 / 3, t12 / 3, 1.0 + 0j, 0j)),
        ]
        for name, ref, fast in cases:
            r, f = ref(), fast()                      # warm-up and compilation
            for x, y in zip(np.atleast_2d(r), np.atleast_2d(f)):
                np.testing.assert_allclose(x, y, rtol=1e-9, atol=1e-300)
            t_ref = _best(ref, args.repeat)
            if _accel.USE_NUMBA:
                t_fast = _best(fast, args.repeat)
                print(f"{name:<16}{n:>10}{t_ref:>14.6f}{t_fast:>14.6f}{t_ref / t_fast:>10.1f}")
            else:
                print(f"{name:<16}{n:>10}{t_ref:>14.6f}{'-':>14}{'-':>10}")


if __name__ == "__main__":
    main()
