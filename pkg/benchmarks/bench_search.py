"""Time the exhaustive search with the numba kernel and with the plain fallback.

Each backend runs in its own interpreter because FIXFREE_NO_NUMBA is read at
import time. The numba run is warmed up first so compilation is not timed.

    python benchmarks/bench_search.py [--lmax 5] [--bound 3/4] [--repeat 3]
"""

import argparse
import json
import os
import subprocess
import sys
from fractions import Fraction

WORKER = r"""
import json, sys, time
from fractions import Fraction
from fixfree import verifier
from fixfree._kernels import backend_name
from fixfree.words import Profile

lmax, bound, repeat = int(sys.argv[1]), Fraction(sys.argv[2]), int(sys.argv[3])

def profiles(level, acc, total):
    if level > lmax:
        if any(acc):
            yield tuple(acc)
        return
    count = 0
    while total + Fraction(count, 2**level) <= bound:
        yield from profiles(level + 1, acc + [count], total + Fraction(count, 2**level))
        count += 1

batch = [Profile(2, p) for p in profiles(1, [], Fraction(0))]
verifier.search(batch[-1])
best = float("inf")
nodes = 0
for _ in range(repeat):
    start = time.perf_counter()
    nodes = sum(verifier.search(p).nodes for p in batch)
    best = min(best, time.perf_counter() - start)
print(json.dumps({"backend": backend_name(), "profiles": len(batch), "nodes": nodes, "seconds": best}))
"""


def run(no_numba: bool, lmax: int, bound: str, repeat: int) -> dict:
    env = dict(os.environ)
    env.pop("FIXFREE_NO_NUMBA", None)
    if no_numba:
        env["FIXFREE_NO_NUMBA"] = "1"
    out = subprocess.run(
        [sys.executable, "-c", WORKER, str(lmax), bound, str(repeat)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--lmax", type=int, default=5)
    parser.add_argument("--bound", default="3/4")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    Fraction(args.bound)
    fast = run(False, args.lmax, args.bound, args.repeat)
    slow = run(True, args.lmax, args.bound, args.repeat)
    if fast["nodes"] != slow["nodes"]:
        sys.exit(f"backends disagree on node counts: {fast['nodes']} vs {slow['nodes']}")
    print(f"{'backend':<8} {'profiles':>8} {'nodes':>8} {'seconds':>9}")
    for row in (fast, slow):
        print(f"{row['backend']:<8} {row['profiles']:>8} {row['nodes']:>8} {row['seconds']:>9.3f}")
    print(f"speedup  {slow['seconds'] / fast['seconds']:.1f}x")


if __name__ == "__main__":
    main()
