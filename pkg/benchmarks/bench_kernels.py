"""Time the RK4 sweep kernels: numba against the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py --steps 4096 --lams 311 --repeat 5
"""

import argparse
import math
import time

import numpy as np

from fracdirac import _kernels
from fracdirac.integrator import discretize
from fracdirac.presets import EXAMPLES


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=4096)
    parser.add_argument("--lams", type=int, default=311, help="spectral parameters per scan")
    parser.add_argument("--alpha", type=float, default=0.8)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    problem = EXAMPLES[1].problem(args.alpha, args.steps)
    arrays = discretize(problem).arrays()
    lams = np.linspace(0.0, math.pi, args.lams + 1)[1:]
    y0 = np.array([0.0, 1.0])

    cases = {
        "numpy": (_kernels.sweep_endpoint_numpy, _kernels.sweep_path_numpy),
    }
    if _kernels.HAVE_NUMBA:
        cases["numba"] = (_kernels.sweep_endpoint_numba, _kernels.sweep_path_numba)
        # compile (or load from cache) outside the timed region
        _kernels.sweep_endpoint_numba(lams[:2], *arrays, y0, False)
        _kernels.sweep_path_numba(1.0, *arrays, y0, False)
    else:
        print("numba not installed; timing the numpy fallback only")

    print(f"example 1, alpha={args.alpha}, steps={args.steps}, {args.lams} lambdas, best of {args.repeat}")
    print(f"{'backend':<8} {'scan (s)':>10} {'path (ms)':>10}")
    endpoints = {}
    for name, (endpoint, path) in cases.items():
        scan = best_of(lambda: endpoints.__setitem__(name, endpoint(lams, *arrays, y0, False)), args.repeat)
        single = best_of(lambda: path(1.0, *arrays, y0, False), args.repeat)
        print(f"{name:<8} {scan:>10.4f} {1e3 * single:>10.2f}")
    if len(endpoints) == 2:
        diff = np.max(np.abs(endpoints["numba"] - endpoints["numpy"]))
        print(f"max |numba - numpy| over the scan: {diff:.1e}")


if __name__ == "__main__":
    main()
