"""Compare the compiled and pure-Python allocation kernels.

    python3 benchmarks/bench_kernels.py [--instances 2000] [--periods 3 24] [--repeat 3]

Both backends solve the same random instances; the script checks that they
agree and reports the best-of-``repeat`` time per solve.
"""
import argparse
import sys
import time

import numpy as np

from riskdemand import kernels
from riskdemand.multi_period import MultiPeriodProfile


def make_instances(rng, n, T):
    out = []
    for _ in range(n):
        a = rng.uniform(0.2, 2.5, size=T)
        profile = MultiPeriodProfile.build("exponential", a, rng.uniform(0.3, 3.0, size=T), rng.uniform(100, 1500, size=T))
        prices = profile.initial_prices * rng.uniform(0.8, 1.2, size=T)
        budget = profile.default_budget * rng.uniform(0.5, 1.5)
        lam_hi = float(np.max(profile.A * profile.a / prices))
        out.append((profile.kind_codes, profile.a, profile.A, prices, budget, lam_hi))
    return out


def solve_all(instances):
    results = []
    for kinds, a, A, prices, budget, lam_hi in instances:
        results.append(kernels.bisect_lambda(kinds, a, A, prices, budget, 1e-12, lam_hi, 1e-12, 200))
    return results


def time_backend(name, instances, repeat):
    kernels.use_backend(name)
    best = float("inf")
    results = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        results = solve_all(instances)
        best = min(best, time.perf_counter() - t0)
    return best, results


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--instances", type=int, default=2000)
    parser.add_argument("--periods", type=int, nargs="+", default=[3, 24])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args(argv)

    backends = kernels.available_backends()
    if len(backends) < 2:
        print("compiled extension not built; only the Python kernel is available", file=sys.stderr)
    previous = kernels.BACKEND
    print(f"{'T':>3} {'backend':>8} {'us/solve':>10} {'speedup':>8}")
    try:
        for T in args.periods:
            instances = make_instances(np.random.default_rng(args.seed), args.instances, T)
            timings = {}
            outputs = {}
            for name in backends:
                timings[name], outputs[name] = time_backend(name, instances, args.repeat)
            ref = outputs["python"]
            for name in backends:
                worst = max(float(np.max(np.abs(o[5] - r[5]) / np.maximum(np.abs(r[5]), 1e-300)))
                            for o, r in zip(outputs[name], ref))
                if worst > 1e-12:
                    print(f"warning: {name} differs from python by {worst:.2e}", file=sys.stderr)
                per = 1e6 * timings[name] / len(instances)
                speedup = timings["python"] / timings[name]
                print(f"{T:>3} {name:>8} {per:>10.2f} {speedup:>7.1f}x")
    finally:
        kernels.use_backend(previous)
    return 0


if __name__ == "__main__":
    sys.exit(main())
