#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Runs the pressured default scenario with both backends and times the raw
placement primitives on synthetic occupancy states.

    python3 benchmarks/bench_kernels.py [--seeds 3] [--horizon 500]
"""

import argparse
import importlib
import time

import numpy as np


def time_policy_runs(kernels_module, seeds, horizon):
    import dos_slotting.kernels as selected

    # swap the selected backend in place; policy code reads these attributes
    for name in (
        "nearest_available",
        "nearest_available_with_cost",
        "first_available",
        "kth_available",
        "nearest_available_banded",
    ):
        setattr(selected, name, getattr(kernels_module, name))

    from dos_slotting import simulator as sim
    from dos_slotting.policies import DosPolicy, GreedyPolicy
    from dos_slotting.warehouse import Warehouse

    spec = sim.DEFAULT_PRESSURED_SPEC
    capacity = sim.DEFAULT_PRESSURED_CAPACITY
    wh = Warehouse.aisle(capacity)
    dist = sim.distribution_for_spec(spec, capacity)

    started = time.perf_counter()
    placements = 0
    for seed in range(seeds):
        stream = sim.generate_perfect_balance_stream(spec, horizon, seed)
        policy = DosPolicy(sim.oracle_for_stream(stream), dist)
        result = sim.run_simulation(stream, wh, policy, seed)
        greedy = sim.run_simulation(stream, wh, GreedyPolicy(), seed)
        placements += len(result.placements) + len(greedy.placements)
    return time.perf_counter() - started, placements


def time_primitives(kernels_module, n=200, calls=200_000, seed=0):
    rng = np.random.default_rng(seed)
    occupied = (rng.random(n) < 0.8).astype(np.uint8)
    targets = rng.integers(1, n + 1, size=calls)
    started = time.perf_counter()
    fn = kernels_module.nearest_available
    for t in targets:
        fn(occupied, int(t))
    return time.perf_counter() - started


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, default=3)
    parser.add_argument("--horizon", type=int, default=500)
    args = parser.parse_args()

    backends = {}
    backends["python"] = importlib.import_module("dos_slotting._kernels_py")
    try:
        backends["compiled"] = importlib.import_module("dos_slotting._kernels_ext")
    except ImportError:
        print("compiled extension not built; benchmarking the fallback only")

    print(f"{'backend':<10} {'sim wall s':>11} {'placements/s':>13} {'argmin calls/s':>15}")
    for name, module in backends.items():
        wall, placements = time_policy_runs(module, args.seeds, args.horizon)
        prim = time_primitives(module)
        print(
            f"{name:<10} {wall:>11.2f} {placements / wall:>13.0f} "
            f"{200_000 / prim:>15.0f}"
        )


if __name__ == "__main__":
    main()
