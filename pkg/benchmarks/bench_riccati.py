"""Compare the compiled and pure-Python Riccati kernels.

Usage: python benchmarks/bench_riccati.py [--dims 5 11 21] [--repeat 5]
"""

import argparse
import time

import numpy as np

from hslab import kernels
from hslab.riccati import flow_closed_form


def problem(d, seed=0):
    rng = np.random.default_rng(seed)
    Q = np.linalg.qr(rng.standard_normal((d, d)))[0]
    lams = rng.uniform(-1.0, 1.0, d)
    kaps = np.array([-1.0] * (d - 1) + [-4.0])
    return Q @ np.diag(lams) @ Q.T, Q @ np.diag(kaps) @ Q.T, lams, kaps, Q


def bench(fn, A0, K, t1, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        A, _, _, status, steps = fn(A0, K, 0.0, t1, 1e-2, 1e-12, 1e6, 1e-14)
        best = min(best, time.perf_counter() - t0)
    assert status == kernels.OK
    return best, steps, A


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dims", type=int, nargs="+", default=[5, 11, 21])
    ap.add_argument("--t", type=float, default=0.4)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    names = ["python"] + sorted(set(kernels.BACKENDS) - {"python"})
    print(f"default backend: {kernels.BACKEND}")
    print(f"{'dim':>4} {'backend':>8} {'steps':>6} {'best_s':>10} {'err':>9} {'speedup':>8}")
    for d in args.dims:
        A0, K, lams, kaps, Q = problem(d)
        exact = Q @ np.diag([flow_closed_form(l, k, args.t) for l, k in zip(lams, kaps)]) @ Q.T
        times = {}
        for name in names:
            best, steps, A = bench(kernels.BACKENDS[name], A0, K, args.t, args.repeat)
            times[name] = best
            err = np.max(np.abs(A - exact))
            speed = times["python"] / best
            print(f"{d:>4} {name:>8} {steps:>6} {best:>10.5f} {err:>9.2e} {speed:>8.1f}")


if __name__ == "__main__":
    main()
