"""Time the compiled Airy kernel against the pure-Python one.

Usage: python benchmarks/bench_kernels.py [--points 4000] [--repeat 5]
"""

import argparse
import time

import numpy as np

from oswave import _airy_py, specfun


def best_of(fn, z, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(z)
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=4000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    r = 10 * np.sqrt(rng.random(args.points))
    z = r * np.exp(2j * np.pi * rng.random(args.points))

    t_py = best_of(_airy_py.airy_scaled_array, z, args.repeat)
    print(f"points       {args.points}")
    print(f"python       {t_py:.4f} s")
    if specfun.BACKEND != "compiled":
        print("compiled     not built")
        return
    from oswave import _airy_core
    t_c = best_of(_airy_core.airy_scaled_array, z, args.repeat)
    e1, m1 = _airy_py.airy_scaled_array(z)
    e2, m2 = _airy_core.airy_scaled_array(z)
    diff = np.max(np.abs(m1 * np.exp(e1 - e2)[:, None] - m2) / np.maximum(1.0, np.abs(m2)))
    print(f"compiled     {t_c:.4f} s")
    print(f"speedup      {t_py / t_c:.1f}x")
    print(f"max mismatch {diff:.1e}")


if __name__ == "__main__":
    main()
