#!/usr/bin/env python3
"""Compare the compiled replay kernel against the pure-Python fallback.

Builds a bank of plan-shaped nets, prepares one shared trace workload,
then times ``replay_sequence`` on each kernel over identical inputs.
Both kernels must return identical counters for every trace; the run
aborts if they ever disagree.

Usage:
    python3 benchmarks/bench_replay.py [--plans N] [--traces N] [--repeat N]
"""

from __future__ import annotations

import argparse
import random
import time

from studyflow.petri import RecommendedPlan, plan_to_petri
from studyflow.petri import _kernel as py_kernel
from studyflow.petri.replay import encode_net

try:
    from studyflow.petri import _kernel_c as c_kernel
except ImportError:
    c_kernel = None


def _build_workload(plans: int, traces_per_plan: int, seed: int):
    """List of (encoded net, event candidate lists) pairs, kernel-ready."""
    rng = random.Random(seed)
    workload = []
    for _ in range(plans):
        pool = [f"K{i:02d}" for i in range(24)]
        rng.shuffle(pool)
        blocks = []
        cursor = 0
        for _ in range(rng.randint(4, 8)):
            width = rng.randint(2, 3)
            blocks.append(tuple(pool[cursor : cursor + width]))
            cursor += width
        plan = RecommendedPlan("BENCH", "1", tuple(blocks))
        encoded = encode_net(plan_to_petri(plan))
        event_lists = []
        for index in range(traces_per_plan):
            trace = []
            for block in plan.semesters:
                chunk = list(block)
                rng.shuffle(chunk)
                trace.extend(chunk)
            if index % 2:
                # half the traces deviate: drop one sitting, duplicate another
                trace.pop(rng.randrange(len(trace)))
                trace.insert(rng.randrange(len(trace) + 1), rng.choice(trace))
            event_lists.append(
                [encoded.label_candidates[activity] for activity in trace]
            )
        workload.append((encoded, event_lists))
    return workload


def _run(kernel, workload) -> tuple[float, int]:
    started = time.perf_counter()
    traces = 0
    for encoded, event_lists in workload:
        n_places = len(encoded.place_names)
        for events in event_lists:
            kernel.replay_sequence(
                n_places,
                encoded.trans_inputs,
                encoded.trans_outputs,
                encoded.silent_ids,
                encoded.initial,
                encoded.final,
                events,
            )
            traces += 1
    return time.perf_counter() - started, traces


def _verify_agreement(workload) -> None:
    for encoded, event_lists in workload:
        n_places = len(encoded.place_names)
        for events in event_lists:
            args = (
                n_places,
                encoded.trans_inputs,
                encoded.trans_outputs,
                encoded.silent_ids,
                encoded.initial,
                encoded.final,
                events,
            )
            if py_kernel.replay_sequence(*args) != c_kernel.replay_sequence(*args):
                raise SystemExit("kernel disagreement; refusing to benchmark")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--plans", type=int, default=30, help="number of random plan nets")
    parser.add_argument("--traces", type=int, default=200, help="traces replayed per plan")
    parser.add_argument("--repeat", type=int, default=3, help="timing runs, best taken")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    workload = _build_workload(args.plans, args.traces, args.seed)
    total = sum(len(event_lists) for _, event_lists in workload)
    print(f"workload: {args.plans} plans x {args.traces} traces = {total} replays")

    kernels = [("python", py_kernel)]
    if c_kernel is not None:
        _verify_agreement(workload)
        print("kernels agree on every counter across the workload")
        kernels.append(("cython", c_kernel))
    else:
        print("compiled kernel not available; timing the fallback only")

    timings: dict[str, float] = {}
    for name, kernel in kernels:
        best = min(_run(kernel, workload)[0] for _ in range(args.repeat))
        timings[name] = best
        print(f"{name:>7}: {best:8.3f} s  ({total / best:10.0f} traces/s)")

    if "cython" in timings:
        print(f"speedup: {timings['python'] / timings['cython']:.2f}x")


if __name__ == "__main__":
    main()
