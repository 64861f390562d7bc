#!/usr/bin/env python3
"""Compare the numba and numpy kernel backends on store-shaped columns.

    python benchmarks/bench_kernels.py --rows 900000 --repeat 5

Prints per-kernel timings for both backends plus end-to-end grid queries on
a synthetic store of the requested size.
"""

import argparse
import time

import numpy as np

from alertscope import kernels


def make_columns(rows, n_users=15000, n_policies=8, n_days=820, rng=None):
    rng = rng or np.random.default_rng(0)
    day = rng.integers(0, n_days, rows, dtype=np.int64)
    return {
        "times": day * 86400 + rng.integers(0, 86400, rows),
        "excluded": (rng.random(rows) < 0.05).astype(np.uint8),
        "user": rng.integers(0, n_users, rows, dtype=np.int32),
        "policy": rng.integers(0, n_policies, rows, dtype=np.int32),
        "day": day.astype(np.int32),
        "hour": rng.integers(0, 24, rows, dtype=np.int32),
        "user_lut": np.ones(n_users, dtype=np.uint8),
        "policy_lut": np.ones(n_policies, dtype=np.uint8),
        "row_flag": np.ones(rows, dtype=np.uint8),
        "n_users": n_users,
        "n_policies": n_policies,
        "n_days": n_days,
    }


def bench(fn, repeat):
    fn()  # warm up (jit compile / cache load)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best * 1000  # ms


def run(backend_name, table, c, repeat):
    t0 = int(c["times"].min() + 86400 * 30)
    t1 = int(c["times"].max() - 86400 * 30)
    mask = table["selection_mask"](
        c["times"], np.int64(t0), np.int64(t1), c["excluded"],
        c["user"], c["user_lut"], c["policy"], c["policy_lut"], c["row_flag"],
    )
    cases = {
        "selection_mask": lambda: table["selection_mask"](
            c["times"], np.int64(t0), np.int64(t1), c["excluded"],
            c["user"], c["user_lut"], c["policy"], c["policy_lut"], c["row_flag"],
        ),
        "count_masked[user]": lambda: table["count_masked"](c["user"], mask, 0, c["n_users"]),
        "count_masked[day]": lambda: table["count_masked"](c["day"], mask, 0, c["n_days"]),
        "count_pairs[policy,hour]": lambda: table["count_pairs_dense"](
            c["policy"], 0, c["n_policies"], c["hour"], 0, 24, mask
        ),
        "pair_keys[user,day]": lambda: table["pair_keys_masked"](
            c["user"], 0, c["day"], 0, c["n_days"], mask
        ),
    }
    results = {}
    for name, fn in cases.items():
        results[name] = bench(fn, repeat)
    return results


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rows", type=int, default=900_000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    columns = make_columns(args.rows)
    tables = {}
    for name in ("numpy", "numba"):
        try:
            tables[name] = kernels.load_backend(name)
        except ImportError:
            print(f"backend {name} unavailable, skipping")

    print(f"rows={args.rows:,}  repeat={args.repeat}  (best of N, ms)\n")
    all_results = {name: run(name, table, columns, args.repeat) for name, table in tables.items()}
    kernels_order = next(iter(all_results.values())).keys()
    header = f"{'kernel':28s}" + "".join(f"{name:>12s}" for name in all_results)
    if len(all_results) == 2:
        header += f"{'speedup':>10s}"
    print(header)
    for kernel in kernels_order:
        row = f"{kernel:28s}"
        times = [all_results[name][kernel] for name in all_results]
        row += "".join(f"{t:12.2f}" for t in times)
        if len(times) == 2 and times[1] > 0:
            row += f"{times[0] / times[1]:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
