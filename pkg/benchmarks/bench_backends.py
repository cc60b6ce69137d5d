"""Compare the compiled kernels with the numpy fallback.

Usage::

    python benchmarks/bench_backends.py [--paths N] [--steps N] [--calls N]
"""

import argparse
import time

import numpy as np

from gbm_exfun import _kernels_py
from gbm_exfun.mc import time_grid

try:
    from gbm_exfun import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_series(mod, calls):
    rng = np.random.default_rng(0)
    args = [(complex(rng.uniform(0.5, 3), rng.uniform(-1, 1)), complex(rng.uniform(1, 6), rng.uniform(-1, 1)),
             float(rng.uniform(0.1, 30))) for _ in range(calls)]

    def run():
        for a, b, z in args:
            mod.kummer_series(a, b, z, 1e-16, 10000)
    return run


def bench_paths(mod, paths, steps):
    dts, idx = time_grid([1.0], steps)
    out = np.empty((paths, 1))

    def run():
        mod.integrate_paths(0.0, 1.0, dts, idx, 1, 0, paths, True, out, 0)
    return run


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--paths", type=int, default=20_000, help="paths per integrate_paths call")
    parser.add_argument("--steps", type=int, default=1000, help="time steps per path")
    parser.add_argument("--calls", type=int, default=2000, help="kummer_series calls")
    parser.add_argument("--repeat", type=int, default=3, help="timing repetitions (best kept)")
    args = parser.parse_args()

    mods = [("python", _kernels_py)] + ([("cython", _kernels)] if _kernels else [])
    print(f"{'kernel':<16}{'backend':<10}{'seconds':>10}{'per unit':>16}")
    results = {}
    for name, mod in mods:
        t = best_of(bench_series(mod, args.calls), args.repeat)
        results["kummer_series", name] = t
        print(f"{'kummer_series':<16}{name:<10}{t:>10.4f}{t / args.calls * 1e6:>12.2f} us/call")
    for name, mod in mods:
        t = best_of(bench_paths(mod, args.paths, args.steps), args.repeat)
        results["integrate_paths", name] = t
        print(f"{'integrate_paths':<16}{name:<10}{t:>10.4f}{t / (args.paths * args.steps) * 1e9:>12.2f} ns/step")
    if _kernels:
        for kernel in ("kummer_series", "integrate_paths"):
            print(f"speedup {kernel}: {results[kernel, 'python'] / results[kernel, 'cython']:.1f}x")


if __name__ == "__main__":
    main()
