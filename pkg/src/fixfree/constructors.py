"""Builders that turn a length profile into a fix-free code, one per
sufficient condition, and a dispatcher that tries them from cheapest to
most expensive before falling back to exhaustive search.

Every builder checks its output before returning it; a builder whose
hypotheses do not hold raises HypothesisNotMet (or KraftExceeded) rather
than attempting the construction.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import islice
from typing import Iterator

from . import pisystems
from .errors import (
    FixFreeError,
    HypothesisNotMet,
    InfiniteExpansion,
    InternalShadowOverflow,
    KraftExceeded,
    OutOfRange,
    Unsupported,
)
from .pisystems import PiSystem, gamma
from .words import (
    PREFIX,
    LevelSet,
    Profile,
    block_mask,
    check_level,
    fits,
    free_bits,
    greedy_fill,
    indices_to_bits,
    is_free,
    kraft_sum,
    shadow_bits,
    take_lowest,
)

HALF = Fraction(1, 2)
THREE_QUARTERS = Fraction(3, 4)
FIVE_EIGHTHS = Fraction(5, 8)
FOUR_NINTHS = Fraction(4, 9)

FOUND, NONEXISTENT, UNKNOWN = "Found", "Nonexistent", "Unknown"


@dataclass(frozen=True)
class BuildReport:
    """Outcome of `construct`: the verdict, the rule that produced it and the code."""

    verdict: str
    tag: str
    code: LevelSet | None = None
    notes: dict = field(default_factory=dict)

    def __bool__(self):
        return self.verdict == FOUND


def _checked(code: LevelSet, p: Profile, mode: str = "fix") -> LevelSet:
    assert is_free(code, mode), f"constructed code is not {mode}-free"
    assert fits(code, p), f"constructed code {code.counts()} does not fit {p.counts}"
    return code


def _require_kraft(p: Profile, bound: Fraction) -> None:
    if p.kraft() > bound:
        raise KraftExceeded(f"Kraft sum {p.kraft()} exceeds {bound}")


# ---------------------------------------------------------------- simple greedy builders


def build_prefix_free(p: Profile) -> LevelSet:
    """Prefix-free code fitting p, num-least words outside the prefix shadow."""
    _require_kraft(p, Fraction(1))
    levels: dict[int, int] = {}
    for l in p.levels():
        cells = check_level(p.q, l)
        taken = shadow_bits(LevelSet(p.q, levels), l, PREFIX)
        levels[l] = take_lowest(((1 << cells) - 1) & ~taken, p.alpha(l), cells)
    return _checked(LevelSet(p.q, levels), p, "prefix")


def build_half(p: Profile) -> LevelSet:
    """Kraft sum at most 1/2: any greedy choice leaves room."""
    _require_kraft(p, HALF)
    return _checked(greedy_fill(LevelSet(p.q), p, 1), p)


def _gap_condition(p: Profile) -> bool:
    levels = p.levels()
    return all(b >= 2 * a for a, b in zip(levels, levels[1:]))


def build_spaced(p: Profile) -> LevelSet:
    """Populated levels at least doubling: the shadow size no longer depends on the choice."""
    if not _gap_condition(p):
        raise HypothesisNotMet("two consecutive populated levels k < l with l < 2k")
    _require_kraft(p, THREE_QUARTERS)
    return _checked(greedy_fill(LevelSet(p.q), p, 1), p)


def build_two_level(p: Profile) -> LevelSet:
    """Two populated levels m < n: the num-least alpha_m words at level m, then greedy at n."""
    if len(p.levels()) != 2:
        raise HypothesisNotMet("profile must have exactly two populated levels")
    _require_kraft(p, THREE_QUARTERS)
    return _checked(greedy_fill(LevelSet(p.q), p, 1), p)


# ---------------------------------------------------------------- bounded levels


def bounded_level_caps(q: int, lmin: int, l: int) -> int:
    """q^(lmin-2) floor(q/2)^2 ceil(q/2)^(l-lmin)."""
    return q ** (lmin - 2) * (q // 2) ** 2 * ((q + 1) // 2) ** (l - lmin)


def _bounded_base(q: int, lmin: int, l: int) -> list[int]:
    """Words x1 y x2 w with x1, x2 in X = {0..q//2-1}, y in Y^(l-lmin), w in A^(lmin-2), ascending."""
    half = q // 2
    xs, ys = range(half), range(half, q)
    tail = q ** (lmin - 2)
    heads = []
    for x1 in xs:
        for y in itertools.product(ys, repeat=l - lmin):
            for x2 in xs:
                v = x1
                for a in y:
                    v = v * q + a
                heads.append(v * q + x2)
    heads.sort()
    return [h * tail + w for h in heads for w in range(tail)]


def build_bounded(p: Profile) -> LevelSet:
    """Counts below the top level bounded by the sizes of the base family B_l."""
    q = p.q
    levels = p.levels()
    if not levels:
        return LevelSet(q)
    lmin, lmax = levels[0], levels[-1]
    if lmin < 2:
        raise HypothesisNotMet("shortest codeword length must be at least 2")
    _require_kraft(p, THREE_QUARTERS)
    for l in range(lmin, lmax):
        if p.alpha(l) > bounded_level_caps(q, lmin, l):
            raise HypothesisNotMet(f"alpha_{l} = {p.alpha(l)} exceeds {bounded_level_caps(q, lmin, l)}")
    if lmax <= lmin + 1:
        return _checked(greedy_fill(LevelSet(q), p, 1), p)
    pivot = lmax - lmin + 2  # 1-indexed letter position that decides the deletion order
    chosen: dict[int, int] = {}
    for l in range(lmin, lmax):
        base = _bounded_base(q, lmin, l)
        drop = len(base) - p.alpha(l)
        if l >= pivot:
            shift = q ** (l - pivot)
            y_first = [v for v in base if (v // shift) % q >= q // 2]
            x_after = [v for v in base if (v // shift) % q < q // 2]
            order = y_first + x_after
        else:
            order = base
        bits = 0
        for v in order[drop:]:
            bits |= 1 << v
        chosen[l] = bits
    return _checked(greedy_fill(LevelSet(q, chosen), p, lmax), p)


# ---------------------------------------------------------------- pi-system routes


def build_first_two_levels(
    p: Profile, k: int, budget: int | None = None
) -> LevelSet | Unsupported:
    """Start from a pi-system on the first one or two populated levels, then extend greedily."""
    q = p.q
    if not 1 <= k < q:
        raise OutOfRange(f"need 1 <= k < q, got k={k}")
    levels = p.levels()
    if not levels:
        raise HypothesisNotMet("empty profile")
    limit = gamma(q, k)
    if p.kraft() > limit:
        raise HypothesisNotMet(f"Kraft sum {p.kraft()} exceeds gamma_{k} = {limit}")
    n = levels[0]
    an, an1 = p.alpha(n), p.alpha(n + 1)
    target = Fraction(k, q)
    if Fraction(an, q**n) >= target:
        system = pisystems.one_level_pi(q, n, k)
        return _checked(pisystems.pi_extend(system, p), p)
    if Fraction(an, q**n) + Fraction(an1, q ** (n + 1)) < target:
        raise HypothesisNotMet("first two populated levels carry less than k/q")
    if an % k:
        raise HypothesisNotMet(f"alpha_{n} = {an} is not a multiple of k = {k}")
    L = an // k
    kwargs = {} if budget is None else {"budget": budget}
    system = pisystems.two_level_pi(q, n + 1, k, L, **kwargs)
    if isinstance(system, Unsupported):
        return system
    if not isinstance(system, PiSystem):
        raise HypothesisNotMet(f"no {k}-regular subgraph with {L} vertices: {system.reason}")
    return _checked(pisystems.pi_extend(system, p), p)


# ---------------------------------------------------------------- block decompositions


def pad_to(p: Profile, total: Fraction, floor: int = 3) -> tuple[Profile, int, int]:
    """Raise the count at one deep level so the Kraft sum is exactly `total`.

    Returns the padded profile, the padded level and the number of words added.
    """
    deficit = total - p.kraft()
    if deficit < 0:
        raise KraftExceeded(f"Kraft sum {p.kraft()} exceeds {total}")
    level = max(p.max_level, floor)
    extra = deficit * p.q**level
    while extra.denominator != 1:
        level += 1
        extra = deficit * p.q**level
    if extra == 0:
        return p, level, 0
    return p.with_count(level, p.alpha(level) + int(extra)), level, int(extra)


def _trim(code: LevelSet, level: int, extra: int) -> LevelSet:
    """Drop the `extra` num-largest words of one level."""
    if not extra:
        return code
    bits = code.bits(level)
    for _ in range(extra):
        bits &= ~(1 << (bits.bit_length() - 1))
    levels = dict(code.level_items())
    levels[level] = bits
    return LevelSet(code.q, levels)


def _decompose(p: Profile, budgets: list[tuple[tuple[int, int], Fraction]]) -> dict:
    """Greedy level-by-level split of p into blocks with exact Kraft budgets, in list order."""
    q = p.q
    left = {ab: b for ab, b in budgets}
    out = {ab: [0] * p.max_level for ab, _ in budgets}
    for l in range(1, p.max_level + 1):
        need = p.alpha(l)
        for ab, _ in budgets:
            if not need:
                break
            room = left[ab] * q**l
            take = min(need, int(room))
            if take:
                out[ab][l - 1] = take
                left[ab] -= Fraction(take, q**l)
                need -= take
        if need:
            raise HypothesisNotMet(f"level {l} cannot be split within the block budgets")
    if any(left.values()):
        raise HypothesisNotMet("block budgets not exhausted; Kraft sum is not the required total")
    return {ab: Profile(q, tuple(c)) for ab, c in out.items()}


BINARY_BLOCKS = [((0, 0), Fraction(1, 4)), ((0, 1), Fraction(1, 8)), ((1, 0), Fraction(1, 8)), ((1, 1), Fraction(1, 8))]


def ternary_blocks() -> list[tuple[tuple[int, int], Fraction]]:
    """Budgets (3-a)/27 on the diagonal, 1/27 elsewhere, lexicographic order."""
    return [((a, b), Fraction(3 - a, 27) if a == b else Fraction(1, 27)) for a in range(3) for b in range(3)]


def beta_decompose(p: Profile) -> tuple[Profile, Profile, Profile, Profile]:
    """Split a binary profile of Kraft sum 5/8 into blocks 00, 01, 10, 11."""
    if p.q != 2:
        raise HypothesisNotMet("binary profiles only")
    if p.alpha(1) != 0 or p.alpha(2) >= 2:
        raise HypothesisNotMet("needs alpha_1 = 0 and alpha_2 < 2")
    if p.kraft() != FIVE_EIGHTHS:
        raise HypothesisNotMet(f"Kraft sum {p.kraft()} is not 5/8; pad first")
    parts = _decompose(p, BINARY_BLOCKS)
    return tuple(parts[ab] for ab, _ in BINARY_BLOCKS)


def ternary_decompose(p: Profile) -> dict:
    if p.q != 3 or p.alpha(1) != 0 or p.alpha(2) > 1:
        raise HypothesisNotMet("needs q = 3, alpha_1 = 0 and alpha_2 <= 1")
    if p.kraft() != FOUR_NINTHS:
        raise HypothesisNotMet(f"Kraft sum {p.kraft()} is not 4/9; pad first")
    return _decompose(p, ternary_blocks())


def _place_blocks(q: int, parts: dict, max_level: int) -> LevelSet:
    """Level by level, put each block's words into a A^(l-2) b outside the bifix shadow."""
    levels: dict[int, int] = {}
    for l in range(2, max_level + 1):
        wanted = [(ab, prof.alpha(l)) for ab, prof in parts.items() if prof.alpha(l)]
        if not wanted:
            continue
        free = free_bits(LevelSet(q, levels), l)
        cells = q**l
        bits = 0
        for (a, b), count in wanted:
            room = free & block_mask(q, l, a, b)
            if room.bit_count() < count:
                raise InternalShadowOverflow(f"block {a}{b} at level {l}: {count} needed")
            bits |= take_lowest(room, count, cells)
        levels[l] = bits
    return LevelSet(q, levels)


def build_58_binary(p: Profile, budget: int | None = None) -> LevelSet:
    """Binary profiles with Kraft sum at most 5/8."""
    if p.q != 2:
        raise HypothesisNotMet("binary profiles only")
    _require_kraft(p, FIVE_EIGHTHS)
    if p.alpha(1) == 1 or p.alpha(2) == 2:
        code = build_first_two_levels(p, 1, budget)
        if isinstance(code, Unsupported):
            raise AssertionError("binary cycles of every length exist; subgraph search cannot fail")
        return code
    padded, level, extra = pad_to(p, FIVE_EIGHTHS)
    parts = dict(zip([ab for ab, _ in BINARY_BLOCKS], beta_decompose(padded)))
    code = _place_blocks(2, parts, padded.max_level)
    return _checked(_trim(code, level, extra), p)


def build_ternary_blocks(p: Profile) -> LevelSet:
    """Ternary profiles with alpha_1 = 0, alpha_2 <= 1 and Kraft sum at most 4/9."""
    if p.q != 3:
        raise HypothesisNotMet("ternary profiles only")
    if p.alpha(1) != 0 or p.alpha(2) > 1:
        raise HypothesisNotMet("needs alpha_1 = 0 and alpha_2 <= 1")
    padded, level, extra = pad_to(p, FOUR_NINTHS)
    parts = ternary_decompose(padded)
    code = _place_blocks(3, parts, padded.max_level)
    return _checked(_trim(code, level, extra), p)


# ---------------------------------------------------------------- quaternary lift


def quaternary_to_binary(code: LevelSet) -> LevelSet:
    """Replace each letter 0,1,2,3 by 00,01,10,11; the num is unchanged."""
    if code.q != 4:
        raise OutOfRange("source code must be quaternary")
    return LevelSet(2, {2 * l: bits for l, bits in code.level_items()})


def _chain_level(beta: Profile, start: int, full, least, lowest: int) -> int | None:
    """Top level n of a chain system: beta_l = full(l) for start <= l < n and beta_n >= least(n)."""
    if any(beta.alpha(l) for l in range(1, start)):
        return None
    n = start
    while n <= beta.max_level and beta.alpha(n) == full(n):
        n += 1
    if n < lowest or n > beta.max_level or beta.alpha(n) < least(n):
        return None
    return n


def lift_from_quaternary(p: Profile) -> LevelSet:
    """Binary profile on even levels only, built over {0,1,2,3} and mapped letterwise."""
    if p.q != 2:
        raise HypothesisNotMet("binary profiles only")
    if any(p.alpha(l) for l in range(1, p.max_level + 1, 2)):
        raise HypothesisNotMet("odd levels must be empty")
    _require_kraft(p, THREE_QUARTERS)
    beta = Profile(4, tuple(p.alpha(2 * l) for l in range(1, p.max_level // 2 + 1)))
    code = _quaternary_code(beta)
    return _checked(quaternary_to_binary(code), p)


def _quaternary_code(beta: Profile) -> LevelSet:
    n = _chain_level(beta, 2, lambda l: 2**l, lambda l: 2 ** (l + 1), 2)
    if n is not None:
        return pisystems.pi_extend(pisystems.chain_pi(4, n, 2, 2), beta)
    if beta.alpha(2) == 0:
        n = _chain_level(beta, 3, lambda l: 2 ** (l + 1), lambda l: 2 ** (l + 2), 3)
        if n is not None:
            return pisystems.pi_extend(pisystems.double_chain_pi(4, n, 2, 2), beta)
    try:
        code = build_first_two_levels(beta, 2)
        if not isinstance(code, Unsupported):
            return code
    except HypothesisNotMet:
        pass
    try:
        return build_bounded(beta)
    except HypothesisNotMet as exc:
        raise HypothesisNotMet(f"no quaternary route applies: {exc}") from None


# ---------------------------------------------------------------- exact Kraft sums


def _base_digits(gamma_value: Fraction, q: int) -> list[int]:
    den = rest = gamma_value.denominator
    while (g := math.gcd(rest, q)) > 1:
        rest //= g
    if rest != 1:
        raise InfiniteExpansion(f"{gamma_value} has no finite base-{q} expansion")
    L = 0
    while q**L % den:
        L += 1
    scaled = gamma_value.numerator * (q**L // den)
    return [scaled // q ** (L - 1 - l) % q for l in range(L)]


def _sandwich_words(q: int, outer: list[int], inner: list[int], length: int) -> Iterator[int]:
    """Words d c^(length-2) d' with d, d' in `outer` and c in `inner`, ascending."""
    for letters in itertools.product(outer, *([inner] * (length - 2)), outer):
        v = 0
        for a in letters:
            v = v * q + a
        yield v


def build_exact_kraftsum(q: int, gamma_value: Fraction | int | str, with_case: bool = False):
    """Fix-free code with Kraft sum exactly gamma, for gamma = a / q^L in (0, 1]."""
    g = Fraction(gamma_value)
    if not 0 < g <= 1:
        raise OutOfRange(f"gamma = {g} outside (0, 1]")
    if g == 1:
        code = LevelSet(q, {1: (1 << q) - 1})
        return (code, "full") if with_case else code
    digits = _base_digits(g, q)
    b1 = digits[0]
    b2 = digits[1] if len(digits) > 1 else 0
    if b1 and b2 <= (q - b1) ** 2:
        case = "case1"
    elif b1 >= 2:
        case = "case2"
    else:
        case = "case3"
    inner = list(range(b1)) if b1 else [0]
    outer = [a for a in range(q) if a not in inner]
    levels: dict[int, int] = {}
    if b1:
        levels[1] = (1 << b1) - 1
    owed = 0
    l = 1
    limit = len(digits) + 64 * q
    while True:
        l += 1
        owed = owed * q + (digits[l - 1] if l <= len(digits) else 0)
        if l > len(digits) and owed == 0:
            break
        if l > limit:
            raise AssertionError("exact Kraft cascade failed to terminate")
        if owed == 0:
            continue
        picked = list(islice(_sandwich_words(q, outer, inner, l), owed))
        levels[l] = indices_to_bits(picked, check_level(q, l))
        owed -= len(picked)
    code = LevelSet(q, levels)
    assert kraft_sum(code) == g and is_free(code, "fix"), "exact Kraft construction failed"
    return (code, case) if with_case else code


# ---------------------------------------------------------------- dispatcher


def construct(p: Profile, budget: int | None = None, search: bool = True) -> BuildReport:
    """Try every applicable builder in a fixed order, then exhaustive search."""
    from . import verifier

    q = p.q
    kraft = p.kraft()
    notes = {"kraft": kraft}
    if kraft > 1:
        return BuildReport(NONEXISTENT, "kraft", None, {**notes, "reason": "Kraft sum exceeds 1"})
    if not p.levels():
        return BuildReport(FOUND, "empty", LevelSet(q), notes)

    attempts = [
        ("half", lambda: build_half(p)),
        ("two_level", lambda: build_two_level(p)),
        ("spaced", lambda: build_spaced(p)),
        ("bounded", lambda: build_bounded(p)),
    ]
    for k in range((q + 1) // 2, 0, -1):
        attempts.append(("first_two_levels", lambda k=k: build_first_two_levels(p, k, budget)))
    if q == 2:
        attempts.append(("58_binary", lambda: build_58_binary(p, budget)))
        attempts.append(("quaternary", lambda: lift_from_quaternary(p)))

    skipped = []
    for tag, attempt in attempts:
        try:
            code = attempt()
        except (HypothesisNotMet, KraftExceeded) as exc:
            skipped.append(f"{tag}: {exc}")
            continue
        except FixFreeError as exc:
            skipped.append(f"{tag}: {type(exc).__name__}: {exc}")
            continue
        if isinstance(code, Unsupported):
            skipped.append(f"{tag}: {code.reason}")
            continue
        return BuildReport(FOUND, tag, code, notes)

    if not search:
        return BuildReport(UNKNOWN, "none", None, {**notes, "skipped": skipped})
    result = verifier.search(p, budget=budget)
    notes["nodes"] = result.nodes
    if result.verdict == FOUND:
        return BuildReport(FOUND, "search", result.witness, notes)
    return BuildReport(result.verdict, "search", None, notes)
