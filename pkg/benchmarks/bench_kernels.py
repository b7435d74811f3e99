"""Compare the compiled search kernels with the pure-Python fallback.

Each backend runs in a fresh interpreter because the JIT switch is read at
import time.  Usage::

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

CASES = [
    ("centralizer of a, radius 7", "vars: x1\ncoefficients: yes\neq: [x1, a]\n", 7),
    ("square root of a^2, radius 8", "vars: x1\ncoefficients: yes\neq: x1^2 a^-2\n", 8),
    ("commuting pair, radius 4", "vars: x1 x2\ncoefficients: no\neq: [x1, x2]\nneq: x1\n", 4),
    ("three commuting, radius 2", "vars: x1 x2 x3\ncoefficients: no\neq: [x1, x2]\neq: [x2, x3]\n", 2),
]

WORKER = r"""
import json, sys, time
from groupeq.eqsys import parse_system
from groupeq.group_core import GroupContext
from groupeq.search import SearchBudget, enumerate_solutions

ctx = GroupContext.free("a", "b")
cases, repeat = json.loads(sys.argv[1]), int(sys.argv[2])
warm = parse_system(cases[0][1], ctx)
enumerate_solutions(warm, ctx, SearchBudget(variable_radius=1)).collect()
out = []
for name, text, radius in cases:
    system = parse_system(text, ctx)
    best, found = float("inf"), 0
    for _ in range(repeat):
        start = time.perf_counter()
        found = len(enumerate_solutions(system, ctx, SearchBudget(variable_radius=radius)).collect())
        best = min(best, time.perf_counter() - start)
    out.append({"case": name, "seconds": best, "solutions": found})
print(json.dumps(out))
"""


def run_backend(disable_jit: bool, repeat: int) -> list[dict]:
    env = dict(os.environ, GROUPEQ_DISABLE_JIT="1" if disable_jit else "0")
    proc = subprocess.run([sys.executable, "-c", WORKER, json.dumps(CASES), str(repeat)],
                          env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    jit = run_backend(False, args.repeat)
    pure = run_backend(True, args.repeat)
    print(f"{'case':34} {'numba s':>10} {'python s':>10} {'speedup':>8}")
    for a, b in zip(jit, pure):
        assert a["solutions"] == b["solutions"], "backends disagree"
        print(f"{a['case']:34} {a['seconds']:10.4f} {b['seconds']:10.4f} {b['seconds'] / a['seconds']:8.1f}x")


if __name__ == "__main__":
    main()
