"""Compare the compiled kernels against the pure-numpy fallback.

The backend is chosen once at import time from ISCORE_KERNEL, so each
measurement runs in a child process with the flag set. Timings exclude
jit compilation (one warmup call per case before the clock starts).

Usage:
    python3 benchmarks/bench_kernels.py            # the comparison table
    python3 benchmarks/bench_kernels.py --reps 9   # steadier medians
"""

from __future__ import annotations

import argparse
import json
import os
import statistics
import subprocess
import sys
import time

CASES = ("closure", "search", "enumerate")


def _closure_input():
    import numpy as np

    rng = np.random.default_rng(7)
    n = 160
    potential = rng.integers(0, 50, size=n).astype(np.float64)
    slack = rng.integers(0, 8, size=(n, n)).astype(np.float64)
    weights = potential[None, :] - potential[:, None] + slack
    np.fill_diagonal(weights, 0.0)
    return weights


def _search_problem():
    # an unsatisfiable instance (even values, odd target): the solver
    # must prove absence rather than stop at the first witness
    from iscore.csp import FiniteDomainProblem, SubsetSumInstance, default_horizon, gen_subset_sum_score
    from iscore.events import normal_encoding, structure_constraints

    values = tuple(2 * v for v in (3, 5, 7, 2, 9, 4, 8, 6, 10, 5, 7, 3))
    score = gen_subset_sum_score(SubsetSumInstance(values, sum(values) // 2 + 1))
    cs = structure_constraints(normal_encoding(score)[0])
    return FiniteDomainProblem.from_constraints(cs, default_horizon(cs))


def _enumerate_problem():
    from iscore.csp import FiniteDomainProblem
    from iscore.durations import DurationSet
    from iscore.events import normal_encoding, structure_constraints
    from iscore.score import Score, TemporalObject, TemporalRelation

    objects = tuple(TemporalObject(f"o{i}", DurationSet.between(1, 4)) for i in range(3))
    relations = tuple(
        TemporalRelation(f"r{i}", objects[i].ep, objects[i + 1].sp, DurationSet.between(0, 3))
        for i in range(2)
    )
    cs = structure_constraints(normal_encoding(Score("bench", objects, relations))[0])
    return FiniteDomainProblem.from_constraints(cs, 14)


def run_case(case: str, reps: int) -> dict:
    from iscore import kernels
    from iscore.csp import enumerate_traces, solve

    if case == "closure":
        weights = _closure_input()
        work = lambda: kernels.floyd_warshall(weights)
    elif case == "search":
        problem = _search_problem()
        work = lambda: solve(problem, node_budget=50_000_000)
    elif case == "enumerate":
        problem = _enumerate_problem()
        work = lambda: enumerate_traces(problem, node_budget=50_000_000, max_traces=500_000)
    else:
        raise SystemExit(f"unknown case {case!r}")

    work()  # warmup; compiles on the jit backend
    times = []
    for _ in range(reps):
        start = time.perf_counter()
        work()
        times.append(time.perf_counter() - start)
    return {"backend": kernels.backend_name(), "median_s": statistics.median(times)}


def _child(case: str, backend: str, reps: int) -> dict:
    env = dict(os.environ, ISCORE_KERNEL=backend)
    out = subprocess.run(
        [sys.executable, __file__, "--case", case, "--reps", str(reps)],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    return json.loads(out.stdout)


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--case", choices=CASES, default=None, help="internal: run one case")
    parser.add_argument("--reps", type=int, default=5)
    args = parser.parse_args()

    if args.case:
        print(json.dumps(run_case(args.case, args.reps)))
        return

    labels = {
        "closure": "all-pairs closure, 160 nodes",
        "search": "first-solution search, unsat subset chain",
        "enumerate": "full trace enumeration, 3-object chain",
    }
    print(f"{'case':<42}{'numba':>12}{'numpy':>12}{'speedup':>10}")
    for case in CASES:
        fast = _child(case, "numba", args.reps)
        slow = _child(case, "numpy", args.reps)
        if fast["backend"] != "numba":
            print(f"{labels[case]:<42}{'(numba unavailable)':>34}")
            continue
        ratio = slow["median_s"] / fast["median_s"] if fast["median_s"] > 0 else float("inf")
        print(
            f"{labels[case]:<42}"
            f"{fast['median_s'] * 1000:>10.2f}ms"
            f"{slow['median_s'] * 1000:>10.2f}ms"
            f"{ratio:>9.1f}x"
        )


if __name__ == "__main__":
    main()
