"""Compare the compiled and numpy lattice-sum backends.

Usage: python benchmarks/bench_kernels.py [--sizes 256 512 1024] [--repeat 3]
"""

import argparse
import time

import numpy as np

from superbath.kernels import available_backends


def bench(fn, n, zs, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(zs, n, 1.0, 1.0, 1, 3, 0)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[256, 512, 1024])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    zs = np.array([0.3, -4.5, 0.1 - 0.2j, 5.0 + 0.1j])
    backends = available_backends()
    print(f"{'grid_n':>7} " + " ".join(f"{name:>12}" for name in backends) + "   speedup  max|diff|")
    for n in args.sizes:
        times, outs = [], []
        for fn in backends.values():
            t, out = bench(fn, n, zs, args.repeat)
            times.append(t)
            outs.append(out[0])
        speed = times[0] / times[-1] if len(times) > 1 else 1.0
        diff = max(np.max(np.abs(o - outs[0])) for o in outs)
        print(f"{n:>7} " + " ".join(f"{t:>11.4f}s" for t in times) + f"   {speed:7.2f}  {diff:.1e}")


if __name__ == "__main__":
    main()
