"""Hot loop of the exhaustive search, written once over uint64 bitset arrays.

With numba available (and FIXFREE_NO_NUMBA unset) the functions below are
compiled with ``numba.njit``; otherwise the identical code runs as plain
Python on numpy arrays, which is slow but gives the same answers.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = numba is not None and os.environ.get("FIXFREE_NO_NUMBA", "") not in ("1", "true", "yes")

FOUND, EXHAUSTED, OUT_OF_BUDGET = 1, 0, 2


def _speed_up(func):
    """Compile with numba when enabled, otherwise return the function unchanged."""
    if USE_NUMBA:
        return numba.njit(cache=True)(func)
    return func


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"


@_speed_up
def _popcount(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return int((x * np.uint64(0x0101010101010101)) >> np.uint64(56))


@_speed_up
def _set_bit(row, offset, i):
    row[offset + (i >> 6)] |= np.uint64(1) << np.uint64(i & 63)


@_speed_up
def _test_bit(row, offset, i):
    return (row[offset + (i >> 6)] >> np.uint64(i & 63)) & np.uint64(1)


@_speed_up
def _set_range(row, offset, start, length):
    end = start + length
    i = start
    while i < end and (i & 63) != 0:
        _set_bit(row, offset, i)
        i += 1
    full = np.uint64(0xFFFFFFFFFFFFFFFF)
    while i + 64 <= end:
        row[offset + (i >> 6)] = full
        i += 64
    while i < end:
        _set_bit(row, offset, i)
        i += 1


@_speed_up
def _free_above(row, offset, nwords, start):
    """Number of clear bits with index >= start in one level's words."""
    total = 0
    first = start >> 6
    for w in range(first, nwords):
        word = ~row[offset + w]
        if w == first and (start & 63) != 0:
            word &= ~((np.uint64(1) << np.uint64(start & 63)) - np.uint64(1))
        total += _popcount(word)
    return total


@_speed_up
def dfs_search(q, counts, powers, offsets, nwords, init, slot_level, reps, budget):
    """Depth-first placement of one word per slot, ascending within a level.

    counts[l], powers[l] = q**l, offsets[l], nwords[l] describe levels 0..N;
    init is the blocked bitset (padding bits set); slot_level lists the level
    of each slot in placement order; reps are the allowed first words.
    Returns (status, nodes, choices).
    """
    nslots = slot_level.shape[0]
    top = counts.shape[0] - 1
    width = init.shape[0]
    blocked = np.zeros((nslots + 1, width), dtype=np.uint64)
    blocked[0, :] = init
    choice = np.full(nslots, -1, dtype=np.int64)
    cursor = np.zeros(nslots + 1, dtype=np.int64)
    left_at_level = np.zeros(nslots, dtype=np.int64)
    for s in range(nslots):
        cnt = 0
        for t in range(s, nslots):
            if slot_level[t] == slot_level[s]:
                cnt += 1
        left_at_level[s] = cnt
    nodes = 0
    s = 0
    while True:
        if s < 0:
            return EXHAUSTED, nodes, choice
        lvl = slot_level[s]
        off = offsets[lvl]
        cells = powers[lvl]
        picked = -1
        if s == 0:
            while cursor[0] < reps.shape[0]:
                c = reps[cursor[0]]
                cursor[0] += 1
                if _test_bit(blocked[0], off, c) == 0:
                    picked = c
                    break
        else:
            c = cursor[s]
            while c < cells:
                if _test_bit(blocked[s], off, c) == 0:
                    picked = c
                    break
                c += 1
            cursor[s] = c + 1
        if picked < 0:
            s -= 1
            continue
        nodes += 1
        if nodes > budget:
            return OUT_OF_BUDGET, nodes, choice
        choice[s] = picked
        row = blocked[s + 1]
        row[:] = blocked[s]
        _set_bit(row, off, picked)
        ok = True
        for up in range(lvl + 1, top + 1):
            span = powers[up - lvl]
            _set_range(row, offsets[up], picked * span, span)
            step = powers[lvl]
            for k in range(span):
                _set_bit(row, offsets[up], picked + k * step)
            if counts[up] > 0 and _free_above(row, offsets[up], nwords[up], 0) < counts[up]:
                ok = False
                break
        if ok and left_at_level[s] > 1:
            start = picked + 1 if s > 0 else 0
            if _free_above(row, off, nwords[lvl], start) < left_at_level[s] - 1:
                ok = False
        if not ok:
            continue
        s += 1
        if s == nslots:
            return FOUND, nodes, choice
        if slot_level[s] == slot_level[s - 1] and s - 1 > 0:
            cursor[s] = picked + 1
        else:
            cursor[s] = 0
