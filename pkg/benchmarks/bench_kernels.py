"""Numba vs pure-numpy kernels.

    python benchmarks/bench_kernels.py [--repeat 5] [--csv out.csv]

Times each kernel on both paths (after a JIT warm-up call) and an end-to-end
``scaling`` sweep in subprocesses with and without AGENTPLAN_DISABLE_NUMBA.
"""

import argparse
import csv
import os
import subprocess
import sys
import time

import numpy as np

from agentplan import _kernels as k


def metric(m, seed=0):
    pts = np.random.default_rng(seed).random((m + 1, 2)) * 100
    return np.ascontiguousarray(np.hypot(*(pts[:, None, :] - pts[None, :, :]).transpose(2, 0, 1)))


def graph(n, seed=0):
    rng = np.random.default_rng(seed)
    W = np.full((n, n), np.inf)
    np.fill_diagonal(W, 0)
    for i in range(1, n):
        j = int(rng.integers(0, i))
        W[i, j] = W[j, i] = float(rng.integers(10, 100))
    return W


def best_of(fn, arg, repeat):
    fn(arg)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(arg)
        times.append(time.perf_counter() - t0)
    return min(times)


CASES = [
    ("all_pairs n=30", k._all_pairs_nb, k._all_pairs_np, lambda: graph(30)),
    ("all_pairs n=120", k._all_pairs_nb, k._all_pairs_np, lambda: graph(120)),
    ("held_karp m=8", k._held_karp_nb, k._held_karp_np, lambda: metric(8)),
    ("held_karp m=10", k._held_karp_nb, k._held_karp_np, lambda: metric(10)),
    ("held_karp m=12", k._held_karp_nb, k._held_karp_np, lambda: metric(12)),
    ("nn+2opt m=30", k._heuristic_nb, k._heuristic_np, lambda: metric(30)),
    ("nn+2opt m=100", k._heuristic_nb, k._heuristic_np, lambda: metric(100)),
]


def end_to_end(disable: bool) -> float:
    env = dict(os.environ, AGENTPLAN_DISABLE_NUMBA="1" if disable else "0")
    cmd = [sys.executable, "-m", "agentplan", "scaling", "--sizes", "5,10,20,30", "--trials", "10", "--seed", "1"]
    subprocess.run(cmd, env=env, capture_output=True, check=True)  # populate numba cache
    t0 = time.perf_counter()
    subprocess.run(cmd, env=env, capture_output=True, check=True)
    return time.perf_counter() - t0


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--csv")
    ap.add_argument("--skip-end-to-end", action="store_true")
    args = ap.parse_args()

    rows = []
    for name, nb, npy, make in CASES:
        data = make()
        t_nb, t_np = best_of(nb, data, args.repeat), best_of(npy, data, args.repeat)
        rows.append((name, t_nb * 1e3, t_np * 1e3, t_np / t_nb))
    if not args.skip_end_to_end:
        t_nb, t_np = end_to_end(False), end_to_end(True)
        rows.append(("scaling sweep (process)", t_nb * 1e3, t_np * 1e3, t_np / t_nb))

    print(f"{'case':28s} {'numba ms':>10s} {'numpy ms':>10s} {'speedup':>8s}")
    for name, a, b, s in rows:
        print(f"{name:28s} {a:10.3f} {b:10.3f} {s:8.1f}x")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["case", "numba_ms", "numpy_ms", "speedup"])
            w.writerows(rows)


if __name__ == "__main__":
    main()
