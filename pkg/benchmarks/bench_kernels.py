"""Compare the compiled Monte Carlo kernels against the numpy fallback.

Usage::

    python benchmarks/bench_kernels.py --samples 200000 --nc 3 --rank 3
"""

import argparse
import time

import numpy as np

from isacdmt import _kernels_py
from isacdmt.linalg import sample_ginibre
from isacdmt.rng import stream

try:
    from isacdmt import _kernels as compiled
except ImportError:
    compiled = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    p = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    p.add_argument("--samples", type=int, default=200_000)
    p.add_argument("--nc", type=int, default=3)
    p.add_argument("--rank", type=int, default=3)
    p.add_argument("--t", type=float, default=10.0)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args()

    h = sample_ginibre(args.nc, args.rank, stream(0), size=args.samples)
    lam = np.linspace(1.5, 0.5, args.rank) if args.rank > 1 else np.ones(1)
    a = _kernels_py.gram_eigvalsh(h, lam)
    log_snr = np.log(10.0 ** np.arange(1.0, 6.01, 0.5))

    backends = [("python", _kernels_py)]
    if compiled is not None:
        backends.append(("compiled", compiled))
    else:
        print("compiled extension not available; timing the fallback only")

    print(f"{args.samples} samples, N_c={args.nc}, rank={args.rank}, {log_snr.size} grid points")
    print(f"{'kernel':<16}{'backend':<10}{'seconds':>10}{'speedup':>10}")
    for name, call in [
        ("gram_eigvalsh", lambda k: k.gram_eigvalsh(h, lam)),
        ("outage_counts", lambda k: k.outage_counts(a, log_snr, args.t, args.r)),
    ]:
        base = None
        for label, mod in backends:
            sec = best_of(lambda: call(mod), args.repeat)
            base = base or sec
            print(f"{name:<16}{label:<10}{sec:>10.4f}{base / sec:>9.2f}x")


if __name__ == "__main__":
    main()
