"""pi_q(n;k)-systems: fix-free sets of Kraft sum k/q split into k blocks
whose prefix and suffix shadows have full measure at the top level n.
Such a set can be extended greedily to any fitting profile whose Kraft sum
stays below the threshold `gamma(q, k)`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import debruijn
from .errors import (
    Impossible,
    OutOfRange,
    ParseError,
    PreconditionViolated,
    Unsupported,
)
from .words import (
    PREFIX,
    SUFFIX,
    LevelSet,
    Profile,
    _parse_fields,
    bit_indices,
    block_mask,
    greedy_fill,
    is_free,
    kraft_sum,
    shadow_bits,
)


@dataclass(frozen=True)
class PiSystem:
    """A code on levels <= n together with its ordered pi-partition."""

    q: int
    k: int
    n: int
    blocks: tuple

    @property
    def code(self) -> LevelSet:
        out = LevelSet(self.q)
        for block in self.blocks:
            out = out.union(block)
        return out

    def profile(self) -> Profile:
        return self.code.profile()

    def to_text(self) -> str:
        rows = [f"q={self.q} k={self.k} n={self.n}"]
        tagged = sorted(
            (w.length, w.val, str(w), i) for i, b in enumerate(self.blocks, start=1) for w in b
        )
        rows += [f"{s} {i}" for _, _, s, i in tagged]
        return "\n".join(rows) + "\n"

    @classmethod
    def parse(cls, text: str) -> "PiSystem":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ParseError("empty pi-system listing")
        head = dict(_parse_fields(lines[0], required=("q", "k", "n")))
        q, k, n = int(head["q"]), int(head["k"]), int(head["n"])
        members: list[list[str]] = [[] for _ in range(k)]
        for ln in lines[1:]:
            try:
                word, idx = ln.split()
                members[int(idx) - 1].append(word)
            except (ValueError, IndexError) as exc:
                raise ParseError(f"bad pi-system line {ln!r}") from exc
        return cls(q, k, n, tuple(LevelSet.from_words(q, m) for m in members))


# ---------------------------------------------------------------- threshold


def gamma(q: int, k: int) -> Fraction:
    """Extension threshold gamma_k."""
    if not 1 <= k < q:
        raise OutOfRange(f"gamma needs 1 <= k < q, got q={q} k={k}")
    if k <= q // 2:
        return Fraction(1, 2) + Fraction(k, 2 * q)
    return Fraction(q - k, q) ** 2 + Fraction(k, q)


# ---------------------------------------------------------------- checks


def _strip_first(q: int, n: int, bits: int) -> int:
    """Number of distinct words left after deleting the first letter of each."""
    idx = bit_indices(bits, q**n)
    return int(np.unique(idx % q ** (n - 1)).size)


def _strip_last(q: int, n: int, bits: int) -> int:
    idx = bit_indices(bits, q**n)
    return int(np.unique(idx // q).size)


def _shadow_sizes(block: LevelSet, n: int) -> tuple[int, int, int, int]:
    q = block.q
    pre = shadow_bits(block, n, PREFIX)
    suf = shadow_bits(block, n, SUFFIX)
    return pre.bit_count(), _strip_first(q, n, pre), suf.bit_count(), _strip_last(q, n, suf)


def _trimmed(block: LevelSet, side: str) -> LevelSet:
    """A^{-1}D (side='first') or D A^{-1} (side='last'); may contain the empty word."""
    q = block.q
    levels: dict[int, int] = {}
    for w in block:
        if w.length == 0:
            raise OutOfRange("the empty word cannot be trimmed")
        span = q ** (w.length - 1)
        v = w.val % span if side == "first" else w.val // q
        levels[w.length - 1] = levels.get(w.length - 1, 0) | (1 << v)
    return LevelSet(q, levels)


def property_one(p: PiSystem) -> bool:
    target = p.q ** (p.n - 1)
    return all(all(s == target for s in _shadow_sizes(b, p.n)) for b in p.blocks)


def property_two(p: PiSystem) -> bool:
    if kraft_sum(p.code) != Fraction(p.k, p.q):
        return False
    for b in p.blocks:
        pre, pre_cut, suf, suf_cut = _shadow_sizes(b, p.n)
        if pre != pre_cut or suf != suf_cut:
            return False
    return True


def property_three(p: PiSystem) -> bool:
    for b in p.blocks:
        head, tail = _trimmed(b, "first"), _trimmed(b, "last")
        if len(head) != len(b) or len(tail) != len(b):
            return False
        if not (is_free(head, "prefix") and is_free(tail, "suffix")):
            return False
        if kraft_sum(head) != 1 or kraft_sum(tail) != 1:
            return False
    return True


def _is_partition(p: PiSystem) -> bool:
    if len(p.blocks) != p.k or p.k < 1:
        return False
    seen = LevelSet(p.q)
    for b in p.blocks:
        if b.q != p.q or not len(b) or len(seen.union(b)) != len(seen) + len(b):
            return False
        if b.max_level > p.n:
            return False
        seen = seen.union(b)
    return True


def is_pi_system(p: PiSystem, debug: bool = False) -> bool:
    """Fix-free code, k disjoint blocks, full-measure shadows per block."""
    if not _is_partition(p) or not is_free(p.code, "fix"):
        return False
    first = property_one(p)
    if debug:
        second, third = property_two(p), property_three(p)
        assert first == second == third, f"pi-system properties disagree: {first, second, third}"
    return first


# ---------------------------------------------------------------- constructions


def _shift(a: int, i: int, q: int) -> int:
    return (a + i) % q


def one_level_pi(q: int, n: int, k: int) -> PiSystem:
    """Blocks D_i = union over a of a A^(n-2) (a+i mod q), all on level n."""
    if not 1 <= k < q or n < 1:
        raise OutOfRange("need 1 <= k < q and n >= 1")
    if n == 1:
        blocks = tuple(LevelSet(q, {1: 1 << i}) for i in range(k))
        return PiSystem(q, k, 1, blocks)
    blocks = []
    for i in range(k):
        bits = 0
        for a in range(q):
            bits |= block_mask(q, n, a, _shift(a, i, q))
        blocks.append(LevelSet(q, {n: bits}))
    return PiSystem(q, k, n, tuple(blocks))


def pi_from_factors(factors: list[debruijn.EdgeSet], q: int, n: int) -> PiSystem:
    """Two-level system on levels n-1, n from the 1-factors of a k-regular subgraph of B_q(n-2)."""
    k = len(factors)
    inner = n - 2
    verts = set().union(*(f.vertices() for f in factors))
    outside = [v for v in range(q**inner) if v not in verts]
    span = q ** (n - 1)
    blocks = []
    for i, factor in enumerate(factors):
        low = 0
        for e in factor.edges:
            low |= 1 << e
        high = 0
        for a in range(q):
            b = _shift(a, i, q)
            for v in outside:
                high |= 1 << (a * span + v * q + b)
        blocks.append(LevelSet(q, {n - 1: low, n: high}))
    return PiSystem(q, k, n, tuple(blocks))


def two_level_pi(
    q: int, n: int, k: int, L: int, budget: int = debruijn.DEFAULT_SUBGRAPH_BUDGET
) -> PiSystem | Impossible | Unsupported:
    """kL words on level n-1 from a k-regular subgraph of B_q(n-2) with L vertices."""
    if not 1 <= k < q or n < 2:
        raise OutOfRange("need 1 <= k < q and n >= 2")
    if not 1 <= L <= q ** (n - 2):
        raise OutOfRange(f"L={L} outside 1..{q ** (n - 2)}")
    graph = debruijn.k_regular_subgraph(q, n - 2, k, L, budget=budget)
    if not isinstance(graph, debruijn.EdgeSet):
        return graph
    return pi_from_factors(debruijn.one_factor_decomposition(graph, k), q, n)


def _cyclic(letters: list[int], i: int) -> dict[int, int]:
    size = len(letters)
    return {letters[j]: letters[(j + i) % size] for j in range(size)}


def _middle_words(letters: list[int], length: int, q: int):
    for mid in itertools.product(letters, repeat=length):
        v = 0
        for a in mid:
            v = v * q + a
        yield v


def _chain_block(q: int, first: int, middle: list[int], last: int, length: int) -> dict[int, int]:
    """Words first . middle^length . last as {level: bits}."""
    total = length + 2
    bits = 0
    lead = first * q ** (total - 1)
    for v in _middle_words(middle, length, q):
        bits |= 1 << (lead + v * q + last)
    return {total: bits}


def _merge(acc: dict[int, int], part: dict[int, int]) -> None:
    for l, b in part.items():
        acc[l] = acc.get(l, 0) | b


def chain_pi(q: int, n: int, k: int, d: int) -> PiSystem:
    """Words x Y^m phi(x) for m <= n-2 and y Y^(n-2) psi(y); X = {0..d-1}."""
    if not (1 <= d < q and 1 <= k <= min(d, q - d) and n >= 2):
        raise OutOfRange("need 1 <= d < q, k <= min(d, q-d), n >= 2")
    xs, ys = list(range(d)), list(range(d, q))
    blocks = []
    for i in range(k):
        phi, psi = _cyclic(xs, i), _cyclic(ys, i)
        acc: dict[int, int] = {}
        for y in ys:
            _merge(acc, _chain_block(q, y, ys, psi[y], n - 2))
        for m in range(n - 1):
            for x in xs:
                _merge(acc, _chain_block(q, x, ys, phi[x], m))
        blocks.append(LevelSet(q, acc))
    return PiSystem(q, k, n, tuple(blocks))


def double_chain_pi(q: int, n: int, k: int, d: int) -> PiSystem:
    """Words x Y^l phi(x), y X^l psi(y) for 1 <= l <= n-2, plus x X^(n-2) phi(x), y Y^(n-2) psi(y)."""
    if not (1 <= d < q and 1 <= k <= min(d, q - d) and n >= 3):
        raise OutOfRange("need 1 <= d < q, k <= min(d, q-d), n >= 3")
    xs, ys = list(range(d)), list(range(d, q))
    blocks = []
    for i in range(k):
        phi, psi = _cyclic(xs, i), _cyclic(ys, i)
        acc: dict[int, int] = {}
        for l in range(1, n - 1):
            for x in xs:
                _merge(acc, _chain_block(q, x, ys, phi[x], l))
            for y in ys:
                _merge(acc, _chain_block(q, y, xs, psi[y], l))
        for x in xs:
            _merge(acc, _chain_block(q, x, xs, phi[x], n - 2))
        for y in ys:
            _merge(acc, _chain_block(q, y, ys, psi[y], n - 2))
        blocks.append(LevelSet(q, acc))
    return PiSystem(q, k, n, tuple(blocks))


# ---------------------------------------------------------------- extension


def pi_extend(p: PiSystem, target: Profile) -> LevelSet:
    """Fix-free superset of the system's code fitting `target`."""
    if target.q != p.q:
        raise PreconditionViolated("alphabet sizes differ")
    code = p.code
    n = p.n
    for l in range(1, n):
        if code.count(l) != target.alpha(l):
            raise PreconditionViolated(f"system has {code.count(l)} words at level {l}, target {target.alpha(l)}")
    if code.count(n) > target.alpha(n):
        raise PreconditionViolated(f"system exceeds the target at its top level {n}")
    if code.max_level > n:
        raise PreconditionViolated("system has words above its declared level")
    limit = gamma(p.q, p.k)
    if target.kraft() > limit:
        raise PreconditionViolated(f"target Kraft sum {target.kraft()} exceeds gamma = {limit}")
    return greedy_fill(code, target, n)


__all__ = [
    "PiSystem",
    "gamma",
    "is_pi_system",
    "property_one",
    "property_two",
    "property_three",
    "one_level_pi",
    "two_level_pi",
    "pi_from_factors",
    "chain_pi",
    "double_chain_pi",
    "pi_extend",
]
