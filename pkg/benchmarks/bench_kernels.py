"""Time the compiled kernels against the pure-Python loops.

    python benchmarks/bench_kernels.py [--repeat 3] [--scale 1.0]

Both backends consume the same random stream, so every pair of runs below
produces identical outcomes; only wall time differs.
"""
import argparse
import time

from paramctl import backend
from paramctl.algorithms import (FixedStrength, OneFifthLambda, StaticLambda, StaticRate, run_ollga,
                                 run_one_plus_lambda, run_rls, run_self_adaptive_one_comma_lambda,
                                 run_single_point_hh)
from paramctl.problems import LeadingOnes, OneMax
from paramctl.rng import RandomSource

CASES = {
    "(1+1) EA, LeadingOnes n=600": lambda e, s: run_one_plus_lambda(
        LeadingOnes(int(600 * s)), StaticLambda(1), StaticRate(), 10 ** 7, RandomSource(1), engine=e),
    "RLS, LeadingOnes n=600": lambda e, s: run_rls(
        LeadingOnes(int(600 * s)), FixedStrength(1), 10 ** 7, RandomSource(2), engine=e),
    "GA one-fifth, OneMax n=20000": lambda e, s: run_ollga(
        OneMax(int(20000 * s)), OneFifthLambda(), 10 ** 7, RandomSource(3), engine=e),
    "greedy HH, OneMax n=10000": lambda e, s: run_single_point_hh(
        OneMax(int(10000 * s)), "greedy", (1, 2, 3), 10 ** 7, RandomSource(4), engine=e),
    "(1,lambda) self-adaptive, OneMax n=500": lambda e, s: run_self_adaptive_one_comma_lambda(
        OneMax(int(500 * s)), 12, 2.0, int(5 * 10 ** 5 * s), RandomSource(5), engine=e),
}


def best_time(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--scale", type=float, default=1.0, help="multiply problem sizes and budgets")
    a = ap.parse_args(argv)
    if backend.compiled() is None:
        raise SystemExit("compiled kernels are not built; run `pip install -e . --no-build-isolation`")
    print(f"{'case':40s} {'cython s':>10s} {'python s':>10s} {'speed-up':>9s} {'evals':>10s}")
    for name, case in CASES.items():
        tc, rc = best_time(lambda: case("kernel", a.scale), a.repeat)
        tp, rp = best_time(lambda: case("python", a.scale), a.repeat)
        assert rc == rp, f"backends disagree on {name}"
        print(f"{name:40s} {tc:10.3f} {tp:10.3f} {tp / tc:8.1f}x {rc.evaluations:10d}")


if __name__ == "__main__":
    main()
