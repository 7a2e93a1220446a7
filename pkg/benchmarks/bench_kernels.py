"""Compare the compiled kernels with their pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Times integer max-flow on domination-style networks and Kuhn matching on
random voter-voter graphs, checks the two backends agree, and prints one
row per workload.
"""

import argparse
import random
import time

from mvote import _kernels


def flow_network(rng, n, m):
    # source, n voters, m candidates, sink; voter->candidate edges "infinite"
    size = n + m + 2
    s, t = 0, size - 1
    cap = [[0] * size for _ in range(size)]
    total = 0
    for i in range(n):
        w = rng.randint(1, 1000)
        cap[s][1 + i] = w
        total += w
    for c in range(m):
        cap[1 + n + c][t] = rng.randint(1, 1000)
    for i in range(n):
        for c in range(m):
            if rng.random() < 0.5:
                cap[1 + i][1 + n + c] = total + 1
    return cap, s, t


def matching_graph(rng, n, density):
    return [sorted(v for v in range(n) if rng.random() < density) for _ in range(n)]


def timed(fn, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - start)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    if _kernels._ckernels is None:
        raise SystemExit("compiled kernels are not built; run `pip install -e . --no-build-isolation` first")
    rng = random.Random(args.seed)
    workloads = []
    for n, m in ((8, 4), (40, 10), (150, 20)):
        cap, s, t = flow_network(rng, n, m)
        workloads.append((f"max_flow n={n} m={m}", lambda b, c=cap, s=s, t=t: _kernels.max_flow(c, s, t, backend=b)))
    for n, dens in ((50, 0.1), (200, 0.05), (600, 0.01)):
        adj = matching_graph(rng, n, dens)
        workloads.append((f"matching n={n} p={dens}", lambda b, a=adj, n=n: list(_kernels.bipartite_matching(a, n, backend=b))))

    print(f"{'workload':<28}{'python ms':>12}{'cython ms':>12}{'speedup':>10}")
    for name, fn in workloads:
        py_t, py_r = timed(lambda: fn("python"), args.repeat)
        cy_t, cy_r = timed(lambda: fn("cython"), args.repeat)
        if py_r != cy_r:
            raise SystemExit(f"backends disagree on {name}")
        print(f"{name:<28}{py_t * 1e3:>12.2f}{cy_t * 1e3:>12.2f}{py_t / cy_t:>9.1f}x")


if __name__ == "__main__":
    main()
