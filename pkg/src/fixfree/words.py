"""Words, level-indexed word sets, profiles, Kraft sums and shadows.

A word over {0..q-1} is stored as (length, val) where val is its base-q
value read most significant digit first.  A set of words of one length l
is a Python int used as a bitset over the q**l cells of A^l, so the cell
index of a word is exactly its num.  With that layout the prefix shadow
of a word i one level up is the contiguous run [i*q, (i+1)*q) and its
suffix shadow is the arithmetic progression i, i + q**l, i + 2*q**l, ...
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import LevelCapExceeded, OutOfRange, ParseError

DEFAULT_LEVEL_CAP = 1 << 26
LEVEL_CAP = int(os.environ.get("FIXFREE_LEVEL_CAP", DEFAULT_LEVEL_CAP))

PREFIX, SUFFIX, BIFIX = "prefix", "suffix", "bifix"
_SHADOW_MODES = (PREFIX, SUFFIX, BIFIX)
_FREE_MODES = {"prefix": PREFIX, "suffix": SUFFIX, "fix": BIFIX, "bifix": BIFIX}


def check_level(q: int, n: int, cap: int | None = None) -> int:
    """Return q**n, refusing levels whose bitset would exceed the cell cap."""
    cells = q**n
    limit = LEVEL_CAP if cap is None else cap
    if cells > limit:
        raise LevelCapExceeded(f"level {n} over q={q} has {cells} cells (cap {limit})")
    return cells


# ---------------------------------------------------------------- words


@dataclass(frozen=True)
class Word:
    q: int
    length: int
    val: int

    def __post_init__(self):
        if self.q < 2:
            raise OutOfRange(f"alphabet size must be >= 2, got {self.q}")
        if self.length < 0 or not 0 <= self.val < self.q**self.length:
            raise OutOfRange(f"value {self.val} does not fit length {self.length}")

    @classmethod
    def parse(cls, text: str, q: int) -> "Word":
        val = 0
        for ch in text:
            d = int(ch, 36) if ch.isalnum() else -1
            if not 0 <= d < q:
                raise ParseError(f"letter {ch!r} outside alphabet of size {q}")
            val = val * q + d
        return cls(q, len(text), val)

    def digits(self) -> tuple[int, ...]:
        return to_digits(self.val, self.length, self.q)

    def __len__(self):
        return self.length

    def __str__(self):
        return word_str(self.val, self.length, self.q)

    def __lt__(self, other: "Word"):
        return (self.length, self.val) < (other.length, other.val)


def to_digits(val: int, length: int, q: int) -> tuple[int, ...]:
    out = [0] * length
    for i in range(length - 1, -1, -1):
        val, out[i] = divmod(val, q)
    return tuple(out)


def from_digits(digits: Iterable[int], q: int) -> int:
    val = 0
    for d in digits:
        val = val * q + d
    return val


def word_str(val: int, length: int, q: int) -> str:
    return "".join(np.base_repr(d, 36).lower() for d in to_digits(val, length, q))


def num(w: Word | str, q: int | None = None) -> int:
    """Base-q value of a word, most significant letter first."""
    if isinstance(w, str):
        if q is None:
            raise ParseError("num of a string needs the alphabet size")
        return Word.parse(w, q).val
    return w.val


# ---------------------------------------------------------------- bitset primitives


@lru_cache(maxsize=4096)
def comb_mask(period: int, copies: int) -> int:
    """Bits 0, period, 2*period, ... (copies of them)."""
    mask, have = 1, 1
    while have < copies:
        mask |= mask << (period * have)
        have *= 2
    return mask & ((1 << (period * copies)) - 1)


def bits_to_array(bits: int, nbits: int) -> np.ndarray:
    raw = bits.to_bytes((nbits + 7) // 8 or 1, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:nbits]


def array_to_bits(arr: np.ndarray) -> int:
    return int.from_bytes(np.packbits(arr.astype(np.uint8), bitorder="little").tobytes(), "little")


def indices_to_bits(indices, nbits: int) -> int:
    """Bitset with the given bit positions set."""
    arr = np.zeros(nbits, dtype=np.uint8)
    arr[np.asarray(indices, dtype=np.int64)] = 1
    return array_to_bits(arr)


def iter_bits(bits: int) -> Iterator[int]:
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


def bit_indices(bits: int, nbits: int) -> np.ndarray:
    if bits.bit_count() <= 64:
        return np.fromiter(iter_bits(bits), dtype=np.int64)
    return np.flatnonzero(bits_to_array(bits, nbits))


def take_lowest(bits: int, count: int, nbits: int) -> int:
    """Sub-bitset made of the `count` lowest set bits (ascending num picks)."""
    if count <= 0:
        return 0
    if count > bits.bit_count():
        raise OutOfRange(f"asked for {count} of {bits.bit_count()} available words")
    if count <= 64:
        out = 0
        for _ in range(count):
            low = bits & -bits
            out |= low
            bits ^= low
        return out
    idx = np.flatnonzero(bits_to_array(bits, nbits))[:count]
    arr = np.zeros(nbits, dtype=np.uint8)
    arr[idx] = 1
    return array_to_bits(arr)


def spread_prefix(bits: int, cells: int, copies: int) -> int:
    """Map a set at level l (cells = q**l) to its prefix shadow `d` levels up (copies = q**d)."""
    if copies == 1 or not bits:
        return bits
    if bits.bit_count() <= 64:
        block = (1 << copies) - 1
        out = 0
        for i in iter_bits(bits):
            out |= block << (i * copies)
        return out
    arr = bits_to_array(bits, cells)
    return array_to_bits(np.repeat(arr, copies))


def spread_suffix(bits: int, cells: int, copies: int) -> int:
    """Map a set at level l (cells = q**l) to its suffix shadow `d` levels up."""
    if copies == 1 or not bits:
        return bits
    return bits * comb_mask(cells, copies)


def block_mask(q: int, length: int, first: int, last: int) -> int:
    """Words of `length` >= 2 starting with letter `first` and ending with `last`."""
    inner = q ** (length - 2)
    return comb_mask(q, inner) << (first * q ** (length - 1) + last)


# ---------------------------------------------------------------- profiles


@dataclass(frozen=True)
class Profile:
    """Codeword counts alpha_1..alpha_N over an alphabet of size q."""

    q: int
    counts: tuple[int, ...]

    def __post_init__(self):
        if self.q < 2:
            raise OutOfRange(f"alphabet size must be >= 2, got {self.q}")
        counts = tuple(int(c) for c in self.counts)
        if any(c < 0 for c in counts):
            raise OutOfRange("profile counts must be nonnegative")
        while counts and counts[-1] == 0:
            counts = counts[:-1]
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_lengths(cls, q: int, lengths: Iterable[int]) -> "Profile":
        lengths = list(lengths)
        if any(l < 1 for l in lengths):
            raise OutOfRange("codeword lengths must be >= 1")
        counts = [0] * (max(lengths, default=0))
        for l in lengths:
            counts[l - 1] += 1
        return cls(q, tuple(counts))

    @classmethod
    def parse(cls, text: str) -> "Profile":
        fields = dict(_parse_fields(text, required=("q", "alpha")))
        try:
            q = int(fields["q"])
            raw = fields["alpha"].strip()
            counts = tuple(int(c) for c in raw.split(",")) if raw else ()
        except ValueError as exc:
            raise ParseError(f"malformed profile line: {text!r}") from exc
        return cls(q, counts)

    def __str__(self):
        return f"q={self.q} alpha={','.join(map(str, self.counts)) or '0'}"

    def alpha(self, l: int) -> int:
        return self.counts[l - 1] if 1 <= l <= len(self.counts) else 0

    @property
    def max_level(self) -> int:
        return len(self.counts)

    @property
    def min_level(self) -> int:
        return next((l for l in self.levels()), 0)

    def levels(self) -> list[int]:
        return [l for l, c in enumerate(self.counts, start=1) if c]

    def kraft(self) -> Fraction:
        return sum((Fraction(c, self.q**l) for l, c in enumerate(self.counts, start=1)), Fraction(0))

    def lengths(self) -> tuple[int, ...]:
        return tuple(l for l, c in enumerate(self.counts, start=1) for _ in range(c))

    def with_count(self, l: int, count: int) -> "Profile":
        counts = list(self.counts) + [0] * max(0, l - len(self.counts))
        counts[l - 1] = count
        return Profile(self.q, tuple(counts))

    def padded(self, n: int) -> tuple[int, ...]:
        """Counts alpha_1..alpha_n, zero filled."""
        return tuple(self.alpha(l) for l in range(1, n + 1))


def _parse_fields(text: str, required: tuple[str, ...]) -> list[tuple[str, str]]:
    pairs = re.findall(r"(\w+)=(\S*)", text)
    keys = {k for k, _ in pairs}
    missing = [k for k in required if k not in keys]
    if missing:
        raise ParseError(f"missing {', '.join(missing)} in {text.strip()!r}")
    return pairs


# ---------------------------------------------------------------- level sets


class LevelSet:
    """Immutable family of per-level word sets, one bitset per length."""

    __slots__ = ("q", "_levels", "_hash")

    def __init__(self, q: int, levels: Mapping[int, int] | None = None):
        if q < 2:
            raise OutOfRange(f"alphabet size must be >= 2, got {q}")
        clean = {}
        for l, bits in (levels or {}).items():
            if bits < 0 or l < 0:
                raise OutOfRange("negative level or bitset")
            if bits:
                if bits.bit_length() > q**l:
                    raise OutOfRange(f"bitset at level {l} exceeds q**{l} cells")
                clean[l] = bits
        self.q = q
        self._levels = dict(sorted(clean.items()))
        self._hash = None

    @classmethod
    def from_words(cls, q: int, words: Iterable[Word | str]) -> "LevelSet":
        levels: dict[int, int] = {}
        for w in words:
            if isinstance(w, str):
                w = Word.parse(w, q)
            elif w.q != q:
                raise OutOfRange("word over a different alphabet")
            levels[w.length] = levels.get(w.length, 0) | (1 << w.val)
        return cls(q, levels)

    @classmethod
    def parse(cls, text: str) -> "LevelSet":
        """Read the code text form: a `q=<int>` header then one word per line."""
        lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        if not lines:
            raise ParseError("empty code listing")
        header = dict(_parse_fields(lines[0], required=("q",)))
        q = int(header["q"])
        return cls.from_words(q, (ln.split()[0] for ln in lines[1:]))

    def to_text(self) -> str:
        return "\n".join([f"q={self.q}", *self.strings()]) + "\n"

    def bits(self, l: int) -> int:
        return self._levels.get(l, 0)

    def level_items(self) -> list[tuple[int, int]]:
        return list(self._levels.items())

    def levels(self) -> list[int]:
        return list(self._levels)

    @property
    def max_level(self) -> int:
        return max(self._levels, default=0)

    def count(self, l: int) -> int:
        return self.bits(l).bit_count()

    def counts(self) -> tuple[int, ...]:
        return tuple(self.count(l) for l in range(1, self.max_level + 1))

    def profile(self) -> Profile:
        return Profile(self.q, self.counts())

    def words(self) -> Iterator[Word]:
        for l, bits in self._levels.items():
            for v in iter_bits(bits):
                yield Word(self.q, l, v)

    def strings(self) -> list[str]:
        return [str(w) for w in self.words()]

    def __len__(self):
        return sum(b.bit_count() for b in self._levels.values())

    def __iter__(self):
        return self.words()

    def __contains__(self, w: Word | str):
        if isinstance(w, str):
            w = Word.parse(w, self.q)
        return w.q == self.q and bool((self.bits(w.length) >> w.val) & 1)

    def __eq__(self, other):
        return isinstance(other, LevelSet) and self.q == other.q and self._levels == other._levels

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.q, tuple(self._levels.items())))
        return self._hash

    def __repr__(self):
        shown = self.strings()
        body = ", ".join(shown[:12]) + (", ..." if len(shown) > 12 else "")
        return f"LevelSet(q={self.q}, {{{body}}})"

    def union(self, other: "LevelSet") -> "LevelSet":
        merged = dict(self._levels)
        for l, b in other._levels.items():
            merged[l] = merged.get(l, 0) | b
        return LevelSet(self.q, merged)

    def difference(self, other: "LevelSet") -> "LevelSet":
        return LevelSet(self.q, {l: b & ~other.bits(l) for l, b in self._levels.items()})

    def below(self, n: int) -> "LevelSet":
        """The part of the set on levels strictly below n."""
        return LevelSet(self.q, {l: b for l, b in self._levels.items() if l < n})


# ---------------------------------------------------------------- Kraft sums


def kraft_sum(x: Profile | LevelSet | Mapping[int, int], q: int | None = None) -> Fraction:
    """Exact Kraft sum of a profile, a level set, or a {level: count} mapping."""
    if isinstance(x, Profile):
        return x.kraft()
    if isinstance(x, LevelSet):
        return sum((Fraction(b.bit_count(), x.q**l) for l, b in x.level_items()), Fraction(0))
    if q is None:
        raise OutOfRange("kraft_sum of a mapping needs q")
    return sum((Fraction(c, q**l) for l, c in x.items()), Fraction(0))


# ---------------------------------------------------------------- shadows


def shadow_bits(c: LevelSet, n: int, mode: str = BIFIX, cap: int | None = None) -> int:
    """Bitset over A^n of the prefix, suffix or bifix shadow of c (levels <= n)."""
    if mode not in _SHADOW_MODES:
        raise OutOfRange(f"unknown shadow mode {mode!r}")
    q = c.q
    check_level(q, n, cap)
    out = 0
    for l, bits in c.level_items():
        if l > n:
            break
        cells, copies = q**l, q ** (n - l)
        if mode != SUFFIX:
            out |= spread_prefix(bits, cells, copies)
        if mode != PREFIX:
            out |= spread_suffix(bits, cells, copies)
    return out


def shadow(c: LevelSet, n: int, mode: str = BIFIX) -> LevelSet:
    """Shadow of c at level n, returned as a level set living on level n only."""
    return LevelSet(c.q, {n: shadow_bits(c, n, mode)})


def free_bits(c: LevelSet, n: int, cap: int | None = None) -> int:
    """Words of A^n outside the bifix shadow of c."""
    cells = check_level(c.q, n, cap)
    return ((1 << cells) - 1) & ~shadow_bits(c, n, BIFIX, cap)


def overlap_count(x: Word, y: Word, n: int) -> int:
    """Number of z in A^n having x as a prefix and y as a suffix."""
    q = x.q
    lx, ly = x.length, y.length
    if n < max(lx, ly):
        return 0
    if lx + ly <= n:
        return q ** (n - lx - ly)
    overlap = lx + ly - n
    tail_of_x = x.val % q**overlap
    head_of_y = y.val // q ** (ly - overlap)
    return int(tail_of_x == head_of_y)


def is_free(c: LevelSet, mode: str = "fix") -> bool:
    """True iff no word of c is a prefix (suffix, either) of another word of c."""
    try:
        kind = _FREE_MODES[mode]
    except KeyError:
        raise OutOfRange(f"unknown freeness mode {mode!r}") from None
    q = c.q
    items = c.level_items()
    pre = suf = 0
    prev_level = None
    for l, bits in items:
        if prev_level is not None:
            cells, copies = q**prev_level, q ** (l - prev_level)
            if kind != SUFFIX:
                pre = spread_prefix(pre, cells, copies)
            if kind != PREFIX:
                suf = spread_suffix(suf, cells, copies)
        if (pre | suf) & bits:
            return False
        if kind != SUFFIX:
            pre |= bits
        if kind != PREFIX:
            suf |= bits
        prev_level = l
    return True


def fits(c: LevelSet, p: Profile) -> bool:
    return c.q == p.q and c.counts() == p.counts


def greedy_fill(code: LevelSet, target: Profile, start: int, cap: int | None = None) -> LevelSet:
    """Top up every level from `start` to target's counts with the num-least free words.

    Running short means a builder that promised room was applied outside
    its hypotheses, so that is reported as an internal error.
    """
    from .errors import InternalShadowOverflow

    levels = dict(code.level_items())
    current = code
    for l in range(start, target.max_level + 1):
        need = target.alpha(l) - current.count(l)
        if need < 0:
            raise OutOfRange(f"code already has more than {target.alpha(l)} words at level {l}")
        if need == 0:
            continue
        free = free_bits(current, l, cap)
        if free.bit_count() < need:
            raise InternalShadowOverflow(
                f"level {l}: {need} words needed, {free.bit_count()} outside the bifix shadow"
            )
        levels[l] = current.bits(l) | take_lowest(free, need, check_level(code.q, l, cap))
        current = LevelSet(code.q, levels)
    return current
