"""Ground truth for small profiles: exhaustive existence search, explicit
counterexamples above 3/4, and the binary su / ne product conditions.
"""

from __future__ import annotations

import itertools
import math
import os
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import OutOfRange, ParseError
from .words import LevelSet, Profile, check_level, fits, free_bits, is_free

FOUND, NONEXISTENT, UNKNOWN = "Found", "Nonexistent", "Unknown"

DEFAULT_BUDGET = 5_000_000
SEARCH_CELL_CAP = 1 << 20
MAX_SYMMETRY_PERMUTATIONS = 5040


def default_budget() -> int:
    return int(os.environ.get("FIXFREE_BUDGET", DEFAULT_BUDGET))


@dataclass(frozen=True)
class SearchResult:
    verdict: str
    witness: LevelSet | None
    nodes: int
    seconds: float
    budget: int

    def __bool__(self):
        return self.verdict == FOUND


# ---------------------------------------------------------------- search


def _orbit_minimum(q: int, length: int) -> np.ndarray:
    """For every word of A^length, the least num over its orbit under letter permutations and reversal."""
    vals = np.arange(q**length, dtype=np.int64)
    digits = np.stack([(vals // q ** (length - 1 - i)) % q for i in range(length)], axis=1)
    weights = q ** np.arange(length - 1, -1, -1, dtype=np.int64)
    if math.factorial(q) <= MAX_SYMMETRY_PERMUTATIONS:
        perms = itertools.permutations(range(q))
    else:
        perms = [tuple(range(q))]
    best = vals.copy()
    for perm in perms:
        mapped = np.asarray(perm, dtype=np.int64)[digits]
        best = np.minimum(best, mapped @ weights)
        best = np.minimum(best, mapped[:, ::-1] @ weights)
    return best


def orbit_representatives(q: int, length: int) -> np.ndarray:
    """Words of A^length that are the num-least member of their symmetry orbit."""
    best = _orbit_minimum(q, length)
    return np.flatnonzero(best == np.arange(best.size)).astype(np.int64)


def _layout(q: int, top: int):
    powers = np.array([q**l for l in range(top + 1)], dtype=np.int64)
    nwords = (powers + 63) // 64
    offsets = np.zeros(top + 1, dtype=np.int64)
    offsets[1:] = np.cumsum(nwords)[:-1]
    init = np.zeros(int(nwords.sum()), dtype=np.uint64)
    for l in range(top + 1):
        cells = int(powers[l])
        end = int(offsets[l] + nwords[l])
        spare = int(nwords[l]) * 64 - cells
        if spare:
            init[end - 1] = np.uint64(((1 << spare) - 1) << (64 - spare))
    init[offsets[0] : offsets[0] + nwords[0]] |= np.uint64(1)  # the empty word is never a codeword
    return powers, nwords, offsets, init


def search(p: Profile, budget: int | None = None, jobs: int = 1) -> SearchResult:
    """Decide by complete backtracking whether a fix-free code fits p.

    Nonexistent is reported only when the whole tree was exhausted; running
    out of budget gives Unknown. `jobs` is accepted as a hint and ignored:
    the search runs in one process so the witness is deterministic.
    """
    budget = default_budget() if budget is None else int(budget)
    start = time.perf_counter()
    q = p.q
    if p.kraft() > 1 or any(p.alpha(l) > q**l for l in p.levels()):
        return SearchResult(NONEXISTENT, None, 0, time.perf_counter() - start, budget)
    if not p.levels():
        return SearchResult(FOUND, LevelSet(q), 0, time.perf_counter() - start, budget)
    top = p.max_level
    check_level(q, top, SEARCH_CELL_CAP)
    powers, nwords, offsets, init = _layout(q, top)
    counts = np.array([0] + [p.alpha(l) for l in range(1, top + 1)], dtype=np.int64)
    slot_level = np.array(list(p.lengths()), dtype=np.int64)
    reps = orbit_representatives(q, p.min_level)
    status, nodes, choice = _kernels.dfs_search(
        q, counts, powers, offsets, nwords, init, slot_level, reps, budget
    )
    seconds = time.perf_counter() - start
    if status == _kernels.FOUND:
        levels: dict[int, int] = {}
        for l, v in zip(slot_level.tolist(), choice.tolist()):
            levels[l] = levels.get(l, 0) | (1 << v)
        witness = LevelSet(q, levels)
        assert is_free(witness, "fix") and fits(witness, p), "search produced an invalid witness"
        return SearchResult(FOUND, witness, int(nodes), seconds, budget)
    verdict = NONEXISTENT if status == _kernels.EXHAUSTED else UNKNOWN
    return SearchResult(verdict, None, int(nodes), seconds, budget)


# ---------------------------------------------------------------- counterexamples


@dataclass(frozen=True)
class Certificate:
    """The integer inequality 2 a_m q^(n-m) - a_m^2 q^(n-2m) + a_n > q^n.

    For n >= 2m the bifix shadow at level n of any a_m words of length m has
    exactly 2 a_m q^(n-m) - a_m^2 q^(n-2m) elements, so the inequality says
    no a_n words of length n remain free.
    """

    q: int
    m: int
    alpha_m: int
    n: int
    alpha_n: int

    @property
    def shadow(self) -> int:
        q, m, n, a = self.q, self.m, self.n, self.alpha_m
        return 2 * a * q ** (n - m) - a * a * q ** (n - 2 * m)

    @property
    def lhs(self) -> int:
        return self.shadow + self.alpha_n

    @property
    def rhs(self) -> int:
        return self.q**self.n

    @property
    def holds(self) -> bool:
        return self.n >= 2 * self.m and self.lhs > self.rhs

    def to_text(self) -> str:
        return f"{self.lhs} > {self.rhs}"


def counterexample(q: int, eps: Fraction | str | float) -> tuple[Profile, Certificate]:
    """A two-level profile with Kraft sum in (3/4, 3/4 + eps] that no fix-free code fits."""
    eps = Fraction(eps)
    if eps <= 0:
        raise OutOfRange(f"eps must be positive, got {eps}")
    if q < 2:
        raise OutOfRange("alphabet size must be >= 2")
    m = 1
    while eps * q**m <= 2:
        m += 1
    alpha_m = q**m // 2 + 1
    n = 2 * m
    while 2 * eps * q**n <= 4:
        n += 1
    alpha_n = q**n // 4 + 1
    assert 2 * alpha_m < q**m * (1 + eps) and 4 * alpha_n < q**n * (1 + 2 * eps)
    counts = [0] * n
    counts[m - 1] = alpha_m
    counts[n - 1] = alpha_n
    cert = Certificate(q, m, alpha_m, n, alpha_n)
    assert cert.holds, "counterexample certificate failed"
    return Profile(q, tuple(counts)), cert


def brute_force_certificate(cert: Certificate) -> bool:
    """Check over every alpha_m-subset of A^m that fewer than alpha_n level-n words stay free."""
    q, m, n = cert.q, cert.m, cert.n
    for chosen in itertools.combinations(range(q**m), cert.alpha_m):
        code = LevelSet(q, {m: sum(1 << v for v in chosen)})
        if free_bits(code, n).bit_count() >= cert.alpha_n:
            return False
    return True


# ---------------------------------------------------------------- su / ne


CORRECTED, LITERAL = "corrected", "literal"
READINGS = (CORRECTED, LITERAL)


@dataclass(frozen=True)
class LengthsSeq:
    """Binary nondecreasing codeword lengths l_1 <= ... <= l_n."""

    lengths: tuple[int, ...]
    q: int = 2

    def __post_init__(self):
        ls = tuple(int(l) for l in self.lengths)
        if self.q != 2:
            raise OutOfRange("su / ne are defined for the binary alphabet only")
        if not ls or ls[0] < 1 or any(a > b for a, b in zip(ls, ls[1:])):
            raise OutOfRange(f"need a nonempty nondecreasing sequence of positive lengths, got {ls}")
        object.__setattr__(self, "lengths", ls)

    @classmethod
    def parse(cls, text: str) -> "LengthsSeq":
        try:
            return cls(tuple(int(t) for t in text.replace(",", " ").split()))
        except ValueError as exc:
            raise ParseError(f"bad lengths sequence {text!r}") from exc

    def __len__(self):
        return len(self.lengths)

    def l(self, i: int) -> int:
        """1-based access l_i."""
        return self.lengths[i - 1]

    def h(self, i: int) -> int:
        """Least j with l_j = l_{i+1}; h(0) = 1."""
        target = self.l(i + 1)
        return self.lengths.index(target) + 1

    def profile(self) -> Profile:
        return Profile.from_lengths(2, self.lengths)


def _two(e: int) -> Fraction:
    return Fraction(2) ** e


def _factor(seq: LengthsSeq, i: int, kind: str, reading: str) -> Fraction:
    h = seq.h(i)
    nxt = seq.l(i + 1)
    if reading == CORRECTED:
        used = sum(_two(-seq.l(j)) for j in range(1, i + 1))
        same = (i + 1 - h) * _two(-nxt)
    else:
        used = i * _two(-seq.l(i))
        same = (i + 1 - h) * _two(1 - seq.l(i))
    pairs = Fraction(0)
    shorter = range(1, h)
    for j, k in itertools.product(shorter, shorter):
        lj, lk = seq.l(j), seq.l(k)
        if reading == LITERAL:
            lj = lk
        if kind == "su":
            if lj + lk <= nxt:
                pairs += _two(-lj - lk)
        else:
            pairs += _two(max(0, nxt - lj - lk) - nxt)
    return max(Fraction(0), 1 - 2 * used + same + pairs)


def _product(seq: LengthsSeq, kind: str, reading: str) -> Fraction:
    if reading not in READINGS:
        raise OutOfRange(f"unknown reading {reading!r}")
    out = Fraction(1)
    for i in range(1, len(seq)):
        out *= _factor(seq, i, kind, reading)
    return out


def su(seq: LengthsSeq, reading: str = CORRECTED) -> Fraction:
    """Sufficient condition: su > 0 guarantees a fix-free code."""
    return _product(seq, "su", reading)


def ne(seq: LengthsSeq, reading: str = CORRECTED) -> Fraction:
    """Necessary condition: ne = 0 rules a fix-free code out."""
    return _product(seq, "ne", reading)


def madcor_check(seq: LengthsSeq) -> bool:
    """Sum of 2^-l_j < 1/2 + (n + 2 - h(n-1)) / 2 * 2^-l_n."""
    n = len(seq)
    total = sum(_two(-l) for l in seq.lengths)
    h = seq.h(n - 1) if n > 1 else 1
    return total < Fraction(1, 2) + Fraction(n + 2 - h, 2) * _two(-seq.l(n))


def lengths_sequences(max_count: int, max_length: int):
    """All nondecreasing sequences with 1..max_count terms in 1..max_length."""
    for n in range(1, max_count + 1):
        for combo in itertools.combinations_with_replacement(range(1, max_length + 1), n):
            yield LengthsSeq(combo)


@dataclass(frozen=True)
class Calibration:
    reading: str
    sequences: int
    su_positive: int
    ne_zero: int
    su_violations: tuple
    ne_violations: tuple

    @property
    def passed(self) -> bool:
        return not self.su_violations and not self.ne_violations


@lru_cache(maxsize=None)
def _verdict(counts: tuple[int, ...], budget: int) -> str:
    return search(Profile(2, counts), budget=budget).verdict


def calibrate(
    reading: str = CORRECTED, max_count: int = 5, max_length: int = 6, budget: int | None = None
) -> Calibration:
    """Run su > 0 => Found and ne = 0 => Nonexistent against search."""
    budget = default_budget() if budget is None else budget
    total = su_pos = ne_zero = 0
    su_bad, ne_bad = [], []
    for seq in lengths_sequences(max_count, max_length):
        total += 1
        verdict = _verdict(seq.profile().counts, budget)
        if su(seq, reading) > 0:
            su_pos += 1
            if verdict != FOUND:
                su_bad.append((seq.lengths, verdict))
        if ne(seq, reading) == 0:
            ne_zero += 1
            if verdict != NONEXISTENT:
                ne_bad.append((seq.lengths, verdict))
    return Calibration(reading, total, su_pos, ne_zero, tuple(su_bad), tuple(ne_bad))


def chosen_reading(max_count: int = 5, max_length: int = 6) -> tuple[str, list[Calibration]]:
    """The first reading that passes calibration, with every report tried."""
    reports = []
    for reading in READINGS:
        report = calibrate(reading, max_count, max_length)
        reports.append(report)
        if report.passed:
            return reading, reports
    return "none", reports


__all__ = [
    "FOUND",
    "NONEXISTENT",
    "UNKNOWN",
    "SearchResult",
    "search",
    "orbit_representatives",
    "Certificate",
    "counterexample",
    "brute_force_certificate",
    "LengthsSeq",
    "su",
    "ne",
    "madcor_check",
    "lengths_sequences",
    "Calibration",
    "calibrate",
    "chosen_reading",
    "CORRECTED",
    "LITERAL",
]
