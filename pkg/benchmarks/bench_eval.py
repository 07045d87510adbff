"""Compare the compiled evaluation kernel with the pure-Python fallback.

Builds two machines, a near-deterministic 50-state cycle and a small
machine with wide superpositions, then times evaluation over random inputs
of growing length with each available backend.  The dense reference matrix
is timed on the short inputs only; it is quadratic in machine size by
design.

Run from the repository root:

    python benchmarks/bench_eval.py
"""

from __future__ import annotations

import argparse
import random
import time

from lexfst import DEFAULT_BACKEND, Evaluator, Policy, compile_source, evaluate_dense


def cycle_machine():
    # 49 positions under a star; overlapping alternatives keep one or two
    # states live in every column for the whole input
    body = " ".join("('a'|[a-b])" for _ in range(24)) + " [a-b]"
    return compile_source(f"({body})*", Policy.MAX)


def branchy_machine():
    # overlapping alternatives keep several states live at once
    return compile_source("(('ab':'x' 1)|('a':'y' 2 'b')|('b':'z'))* :'.'", Policy.MAX)


def wide_machine():
    # every one of 25 positions stays live in every column
    body = "|".join("[a-b]" for _ in range(25))
    return compile_source(f"({body})*", Policy.MAX)


def time_backend(machine, text: str, backend: str, repeats: int) -> float:
    evaluator = Evaluator(machine, backend=backend)
    evaluator.evaluate(text)  # warm up
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        evaluator.evaluate(text)
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--lengths", type=int, nargs="+", default=[1_000, 10_000, 100_000])
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    backends = ["python"]
    if DEFAULT_BACKEND == "c":
        backends.append("c")
    else:
        print("compiled kernel not available; timing the fallback only")

    machines = [
        ("cycle", cycle_machine(), 1),
        ("branchy", branchy_machine(), 1),
        ("wide", wide_machine(), 10),  # ~25 live cells per column; scale down
    ]
    for name, machine, shrink in machines:
        print(f"\n{name}: {machine.state_count} states, {len(machine.transitions)} transitions")
        for length in (max(1, n // shrink) for n in args.lengths):
            text = "".join(rng.choice("ab") for _ in range(length))
            row = [f"len={length:>7}"]
            times = {}
            for backend in backends:
                times[backend] = time_backend(machine, text, backend, args.repeats)
                row.append(f"{backend}={times[backend] * 1e3:8.2f} ms")
            if "c" in times:
                row.append(f"speedup={times['python'] / times['c']:6.1f}x")
            if length <= 2_000:
                start = time.perf_counter()
                evaluate_dense(machine, text)
                row.append(f"dense={(time.perf_counter() - start) * 1e3:8.2f} ms")
            print("  " + "  ".join(row))


if __name__ == "__main__":
    main()
