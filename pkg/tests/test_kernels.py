import json
import os
import subprocess
import sys

from fixfree import _kernels, verifier
from fixfree.words import Profile

CASES = [(2, (1, 1, 0, 2)), (2, (0, 1, 1, 6)), (2, (0, 0, 4, 1, 5)), (3, (1, 2, 4)), (2, (0, 0, 5, 0, 0, 17))]

SCRIPT = """
import json, sys
from fixfree import _kernels, verifier
from fixfree.words import Profile
out = []
for q, counts in json.loads(sys.argv[1]):
    r = verifier.search(Profile(q, tuple(counts)))
    out.append([r.verdict, r.nodes, r.witness.strings() if r.witness else None])
print(json.dumps([_kernels.backend_name(), out]))
"""


def run_backend(disable: bool):
    env = dict(os.environ, FIXFREE_NO_NUMBA="1" if disable else "0")
    proc = subprocess.run(
        [sys.executable, "-c", SCRIPT, json.dumps(CASES)], env=env, capture_output=True, text=True, check=True
    )
    return json.loads(proc.stdout)


def test_fallback_matches_compiled():
    name_plain, plain = run_backend(True)
    name_fast, fast = run_backend(False)
    assert name_plain == "numpy" and name_fast == "numba"
    assert plain == fast


def test_popcount():
    import numpy as np

    for x in [0, 1, 0xFF, 2**63, 2**64 - 1, 0x123456789ABCDEF]:
        assert _kernels._popcount(np.uint64(x)) == bin(x).count("1")


def test_backend_flag_in_process():
    assert _kernels.backend_name() in ("numba", "numpy")
    assert verifier.search(Profile(2, (1,))).verdict == "Found"
