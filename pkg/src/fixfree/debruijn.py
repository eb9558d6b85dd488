"""De Bruijn digraphs B_q(n) with edges labelled by words of length n+1.

An edge a·u·b (u of length n-1) is stored as the num of the word, so its
initial vertex is ``e // q`` and its terminal vertex is ``e % q**n``.
Every choice the constructions leave open is resolved by ascending num,
which makes all outputs reproducible.
"""

from __future__ import annotations

import enum
import itertools
import math
from collections import Counter, deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from .errors import (
    Disconnected,
    Impossible,
    MatchingFailed,
    NotClosedPath,
    NotEulerian,
    NotKRegular,
    NotOneRegular,
    OutOfRange,
    ParseError,
    Unsupported,
)
from .words import _parse_fields, word_str

SEARCH_VERTEX_LIMIT = 4096
DEFAULT_SUBGRAPH_BUDGET = 200_000


# ---------------------------------------------------------------- types


@dataclass(frozen=True)
class EdgeSet:
    """Subgraph of B_q(n) given by its edges, words of length n+1."""

    q: int
    n: int
    edges: frozenset

    def __post_init__(self):
        object.__setattr__(self, "edges", frozenset(self.edges))
        top = self.q ** (self.n + 1)
        if any(not 0 <= e < top for e in self.edges):
            raise OutOfRange(f"edge outside A^{self.n + 1}")

    @classmethod
    def parse(cls, text: str) -> "EdgeSet":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ParseError("empty edge listing")
        head = dict(_parse_fields(lines[0], required=("q", "n")))
        q, n = int(head["q"]), int(head["n"])
        edges = set()
        for ln in lines[1:]:
            if len(ln) != n + 1:
                raise ParseError(f"edge {ln!r} is not a word of length {n + 1}")
            edges.add(int(ln, q) if q <= 10 else int(ln, 36))
        return cls(q, n, frozenset(edges))

    def to_text(self) -> str:
        rows = [word_str(e, self.n + 1, self.q) for e in sorted(self.edges)]
        return "\n".join([f"q={self.q} n={self.n}", *rows]) + "\n"

    def initial(self, e: int) -> int:
        return e // self.q

    def terminal(self, e: int) -> int:
        return e % self.q**self.n

    def vertices(self) -> set[int]:
        return {self.initial(e) for e in self.edges} | {self.terminal(e) for e in self.edges}

    def out_degrees(self) -> Counter:
        return Counter(self.initial(e) for e in self.edges)

    def in_degrees(self) -> Counter:
        return Counter(self.terminal(e) for e in self.edges)

    def __len__(self):
        return len(self.edges)


@dataclass(frozen=True)
class CyclicSeq:
    """A cyclic sequence [w_0 ... w_{L-1}] over {0..q-1}."""

    q: int
    letters: tuple

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(int(a) for a in self.letters))
        if any(not 0 <= a < self.q for a in self.letters):
            raise OutOfRange("letter outside the alphabet")

    @classmethod
    def parse(cls, text: str, q: int) -> "CyclicSeq":
        text = text.strip()
        try:
            letters = tuple(int(ch, 36) for ch in text)
        except ValueError as exc:
            raise ParseError(f"not a digit string: {text!r}") from exc
        return cls(q, letters)

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return "".join("0123456789abcdefghijklmnopqrstuvwxyz"[a] for a in self.letters)

    def subwords(self, n: int) -> list[int]:
        """Nums of the |w| cyclic length-n windows, with multiplicity."""
        L, q, w = len(self.letters), self.q, self.letters
        out = []
        for i in range(L):
            v = 0
            for j in range(n):
                v = v * q + w[(i + j) % L]
            out.append(v)
        return out

    def shift(self, t: int) -> "CyclicSeq":
        """The t-shift [w]_t, starting at w_t."""
        L = len(self.letters)
        t %= L or 1
        return CyclicSeq(self.q, self.letters[t:] + self.letters[:t])

    def same_cycle(self, other: "CyclicSeq") -> bool:
        """Equality of cyclic sequences, i.e. up to rotation."""
        if self.q != other.q or len(self) != len(other):
            return False
        doubled = self.letters + self.letters
        m = len(other)
        return m == 0 or any(doubled[i : i + m] == other.letters for i in range(m))


@dataclass(frozen=True)
class SuccessorMap:
    """F: A^n -> A; the 1-factor it encodes has edges v·F(v)."""

    q: int
    n: int
    table: tuple

    def __call__(self, v: int) -> int:
        return self.table[v]

    def edges(self) -> EdgeSet:
        return EdgeSet(self.q, self.n, frozenset(v * self.q + b for v, b in enumerate(self.table)))

    def is_valid(self) -> bool:
        """Each section a -> F(a u) is a permutation of A."""
        q, n = self.q, self.n
        if n == 0:
            return len(self.table) == 1
        span = q ** (n - 1)
        return all(
            len({self.table[a * span + u] for a in range(q)}) == q for u in range(span)
        )


class CycleKind(enum.Enum):
    CYCLE = "cycle"
    CLOSED_PATH = "closed_path"
    NEITHER = "neither"


# ---------------------------------------------------------------- sequences


def sub_words(w: CyclicSeq, n: int) -> set[int]:
    return set(w.subwords(n))


def cycle_check(w: CyclicSeq, n: int) -> CycleKind:
    """Classify [w] as a cycle or closed path of B_q(n), or neither."""
    if not w.letters:
        return CycleKind.NEITHER
    if len(sub_words(w, n)) == len(w):
        return CycleKind.CYCLE
    if len(sub_words(w, n + 1)) == len(w):
        return CycleKind.CLOSED_PATH
    return CycleKind.NEITHER


def regular_sequence_check(w: CyclicSeq, k: int, L: int, n: int) -> bool:
    """True iff [w] is a (k, L, n)-regular sequence."""
    counts = Counter(w.subwords(n))
    return (
        len(counts) == L
        and all(c == k for c in counts.values())
        and len(set(w.subwords(n + 1))) == len(w) == k * L
    )


def sequence_edges(w: CyclicSeq, n: int) -> EdgeSet:
    """Edges of B_q(n) traversed by the closed path [w]."""
    return EdgeSet(w.q, n, frozenset(w.subwords(n + 1)))


def line_lift(w: CyclicSeq, from_n: int, m: int = 1) -> CyclicSeq:
    """Reinterpret a closed path of B_q(from_n) in B_q(from_n + m).

    The letters do not change; the lift is a statement about which graph
    the sequence lives in, so only the closed-path precondition is checked.
    """
    if m < 0:
        raise OutOfRange("lift count must be nonnegative")
    if cycle_check(w, from_n) is CycleKind.NEITHER:
        raise NotClosedPath(f"[{w}] is not a closed path of B_{w.q}({from_n})")
    return CyclicSeq(w.q, w.letters)


# ---------------------------------------------------------------- graph helpers


def _components(g: EdgeSet) -> list[set[int]]:
    parent: dict[int, int] = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in g.edges:
        a, b = find(g.initial(e)), find(g.terminal(e))
        if a != b:
            parent[max(a, b)] = min(a, b)
    groups: dict[int, set[int]] = {}
    for v in g.vertices():
        groups.setdefault(find(v), set()).add(v)
    return sorted(groups.values(), key=min)


def _regular_degree(g: EdgeSet) -> int | None:
    """Common in/out degree if g is regular on its vertex set, else None."""
    outs, ins = g.out_degrees(), g.in_degrees()
    degrees = {outs[v] for v in g.vertices()} | {ins[v] for v in g.vertices()}
    return degrees.pop() if len(degrees) == 1 else None


def line_graph(g: EdgeSet) -> EdgeSet:
    """L(g) realised inside B_q(n+1): words whose prefix and suffix are edges of g."""
    q, n = g.q, g.n
    edges = g.edges
    span = q ** (n + 1)
    lifted = frozenset(
        e * q + b for e in edges for b in range(q) if (e * q + b) % span in edges
    )
    return EdgeSet(q, n + 1, lifted)


def full_graph(q: int, n: int) -> EdgeSet:
    return EdgeSet(q, n, frozenset(range(q ** (n + 1))))


def full_cycle_count(q: int, n: int) -> int:
    """Number of Hamilton circuits of B_q(n): ((q-1)!)^(q^(n-1)) * q^(q^(n-1)-n)."""
    if n < 1:
        raise OutOfRange("order must be >= 1")
    return math.factorial(q - 1) ** (q ** (n - 1)) * q ** (q ** (n - 1) - n)


# ---------------------------------------------------------------- Euler circuits


def euler_circuit(g: EdgeSet) -> CyclicSeq:
    """Hierholzer circuit of a connected Euler subgraph, smallest edge first."""
    if not g.edges:
        raise NotEulerian("empty edge set")
    outs, ins = g.out_degrees(), g.in_degrees()
    if any(outs[v] != ins[v] for v in g.vertices()):
        raise NotEulerian("in-degree differs from out-degree somewhere")
    if len(_components(g)) > 1:
        raise Disconnected("edge set has more than one component")
    adj: dict[int, list[int]] = {}
    for e in sorted(g.edges):
        adj.setdefault(g.initial(e), []).append(e)
    ptr = dict.fromkeys(adj, 0)
    first = min(g.edges)
    stack: list[tuple[int, int | None]] = [(g.initial(first), None)]
    circuit: list[int] = []
    while stack:
        v, e = stack[-1]
        out = adj.get(v, ())
        if ptr.get(v, 0) < len(out):
            nxt = out[ptr[v]]
            ptr[v] += 1
            stack.append((g.terminal(nxt), nxt))
        else:
            stack.pop()
            if e is not None:
                circuit.append(e)
    circuit.reverse()
    lead = g.q**g.n
    return CyclicSeq(g.q, tuple(e // lead for e in circuit))


# ---------------------------------------------------------------- 1-factors


def extend_to_one_factor(c: EdgeSet) -> SuccessorMap:
    """Successor map of a 1-factor of B_q(n) containing the 1-regular graph c."""
    q, n = c.q, c.n
    outs, ins = c.out_degrees(), c.in_degrees()
    if any(d > 1 for d in outs.values()) or any(d > 1 for d in ins.values()):
        raise NotOneRegular("a vertex has two outgoing or two incoming edges")
    if set(outs) != set(ins):
        raise NotOneRegular("edges do not close up into cycles")
    if n == 0:
        return SuccessorMap(q, 0, (min(c.edges, default=0),))
    table = [-1] * q**n
    for e in c.edges:
        table[e // q] = e % q
    span = q ** (n - 1)
    for u in range(span):
        heads = [a * span + u for a in range(q)]
        free_heads = [v for v in heads if table[v] < 0]
        used = {table[v] for v in heads if table[v] >= 0}
        free_tails = [b for b in range(q) if b not in used]
        for v, b in zip(free_heads, free_tails):
            table[v] = b
    return SuccessorMap(q, n, tuple(table))


def _bipartite_matching(left: list[int], adj: dict[int, list[int]]) -> dict[int, int]:
    """Perfect matching left -> right by BFS augmenting paths in scan order."""
    match_of_right: dict[int, int] = {}
    match_of_left: dict[int, int] = {}
    for root in left:
        prev: dict[int, tuple[int, int | None]] = {}
        queue = deque([root])
        seen_left = {root}
        end = None
        while queue and end is None:
            u = queue.popleft()
            for r in adj.get(u, ()):
                if r in prev:
                    continue
                prev[r] = (u, None)
                if r not in match_of_right:
                    end = r
                    break
                nxt = match_of_right[r]
                if nxt not in seen_left:
                    seen_left.add(nxt)
                    queue.append(nxt)
        if end is None:
            raise MatchingFailed(f"no augmenting path from vertex {root}")
        r = end
        while True:
            u = prev[r][0]
            old = match_of_left.get(u)
            match_of_left[u] = r
            match_of_right[r] = u
            if u == root:
                break
            r = old
    return match_of_left


def one_factor_decomposition(g: EdgeSet, k: int) -> list[EdgeSet]:
    """Split a k-regular graph into k edge-disjoint spanning 1-regular graphs."""
    if k < 1 or _regular_degree(g) != k:
        raise NotKRegular(f"graph is not {k}-regular")
    q, n = g.q, g.n
    span = q**n
    remaining = set(g.edges)
    verts = sorted(g.vertices())
    factors = []
    for _ in range(k):
        adj: dict[int, list[int]] = {}
        by_pair: dict[tuple[int, int], int] = {}
        for e in sorted(remaining):
            u, v = e // q, e % span
            adj.setdefault(u, []).append(v)
            by_pair[(u, v)] = e
        matching = _bipartite_matching(verts, adj)
        factor = frozenset(by_pair[(u, v)] for u, v in matching.items())
        remaining -= factor
        factors.append(EdgeSet(q, n, factor))
    return factors


# ---------------------------------------------------------------- Lempel


def euler_subgraph(q: int, n: int, L: int) -> EdgeSet:
    """Connected Euler subgraph of B_q(n) with exactly L edges (Lempel's induction)."""
    if not 1 <= L <= q ** (n + 1):
        raise OutOfRange(f"L={L} outside 1..{q ** (n + 1)}")
    return _euler_subgraph(q, n, L)


@lru_cache(maxsize=1024)
def _euler_subgraph(q: int, n: int, L: int) -> EdgeSet:
    if n == 0:
        return EdgeSet(q, 0, frozenset(range(L)))
    span = q**n
    if L <= span:
        circuit = euler_circuit(_euler_subgraph(q, n - 1, L))
        return sequence_edges(circuit, n)
    m, k = divmod(L - 1, span)
    k += 1
    short = span - k
    cycle = (
        sequence_edges(euler_circuit(_euler_subgraph(q, n - 1, short)), n)
        if short
        else EdgeSet(q, n, frozenset())
    )
    gamma1 = extend_to_one_factor(cycle).edges()
    complement = EdgeSet(q, n, frozenset(range(q ** (n + 1))) - gamma1.edges)
    extra = one_factor_decomposition(complement, q - 1)[:m]
    gamma2 = set(gamma1.edges).union(*(f.edges for f in extra))
    return _merge_components(EdgeSet(q, n, frozenset(gamma2 - cycle.edges)))


def _merge_components(g: EdgeSet) -> EdgeSet:
    """Join components of a spanning Euler subgraph by the two-edge swap."""
    q, n = g.q, g.n
    span = q**n
    edges = set(g.edges)
    while True:
        comps = _components(EdgeSet(q, n, frozenset(edges)))
        if len(comps) == 1:
            return EdgeSet(q, n, frozenset(edges))
        where = {v: i for i, comp in enumerate(comps) for v in comp}
        bridge = next(
            e for e in range(q ** (n + 1)) if where[e // q] != where[e % span]
        )
        head, tail = bridge // q, bridge % span
        # w1..wn b leaves the initial vertex; a w2..w(n+1) enters the terminal one.
        b = next(x for x in range(q) if head * q + x in edges)
        a = next(x for x in range(q) if x * span + tail in edges)
        middle = tail // q
        edges -= {head * q + b, a * span + tail}
        edges |= {bridge, (a * q ** (n - 1) + middle) * q + b}


def lempel_cycle(q: int, n: int, L: int) -> CyclicSeq:
    """A cycle of length L in B_q(n), for any 1 <= L <= q**n."""
    if not 1 <= L <= q**n:
        raise OutOfRange(f"L={L} outside 1..{q ** n}")
    if n == 0:
        return CyclicSeq(q, (0,))
    return euler_circuit(_euler_subgraph(q, n - 1, L))


# ---------------------------------------------------------------- linear cycles


def linear_cycle(coeffs: tuple[int, ...], start: tuple[int, ...], q: int = 2) -> CyclicSeq:
    """Cyclic sequence generated by the linear successor map and a start vertex."""
    n = len(coeffs)
    state = list(start)
    letters = []
    seen_start = tuple(start)
    while True:
        letters.append(state[0])
        nxt = sum(c * x for c, x in zip(coeffs, state)) % q
        state = state[1:] + [nxt]
        if tuple(state) == seen_start:
            return CyclicSeq(q, tuple(letters))
        if len(letters) > q**n:
            raise AssertionError("linear successor map is not a permutation")


@lru_cache(maxsize=None)
def maximal_linear_maps(n: int) -> tuple[tuple[int, ...], ...]:
    """All binary maximal linear maps of order n, ascending by coefficient num."""
    if n < 1:
        raise OutOfRange("order must be >= 1")
    start = (1,) + (0,) * (n - 1)
    found = []
    for tail in itertools.product((0, 1), repeat=n - 1):
        coeffs = (1,) + tail
        if len(linear_cycle(coeffs, start)) == 2**n - 1:
            found.append(coeffs)
    return tuple(found)


def maximal_linear_map(n: int) -> tuple[int, ...]:
    maps = maximal_linear_maps(n)
    assert maps, f"no maximal linear map of order {n}"
    return maps[0]


def golomb_split(n: int, L: int) -> tuple[CyclicSeq, CyclicSeq]:
    """Split the maximal linear cycle of B_2(n) into cycles of lengths L and 2^n-1-L."""
    period = 2**n - 1
    if not 2 <= L <= period - 1:
        raise OutOfRange(f"L={L} outside 2..{period - 1}")
    w = linear_cycle(maximal_linear_map(n), (1,) + (0,) * (n - 1)).letters
    diff = [(w[i] - w[(i + L) % period]) % 2 for i in range(period)]
    m = next(
        i
        for i in range(period)
        if all(diff[(i + j) % period] == 0 for j in range(n - 1)) and diff[(i + n - 1) % period]
    )
    first = tuple(w[(m + j) % period] for j in range(L))
    second = tuple(w[(m + L + j) % period] for j in range(period - L))
    return CyclicSeq(2, first), CyclicSeq(2, second)


# ---------------------------------------------------------------- regular subgraphs


def regular_subgraph_ruled_out(n: int, k: int, L: int) -> bool:
    """The counting obstruction: L < k^n or k^n < L < k^n + k^(n-1)."""
    if L < k**n:
        return True
    return n >= 1 and k**n < L < k**n + k ** (n - 1)


def normal_graph(q: int, n: int, k: int, p: int) -> EdgeSet:
    """N({0..k+p-1}, id, k) in B_q(1) lifted to B_q(n): k^n + p k^(n-1) vertices."""
    if not (1 <= k <= q and 0 <= p <= q - k and n >= 1):
        raise OutOfRange("need 1 <= k <= q, 0 <= p <= q-k, n >= 1")
    size = k + p
    g = EdgeSet(q, 1, frozenset(l * q + (l + i) % size for l in range(size) for i in range(k)))
    for _ in range(n - 1):
        g = line_graph(g)
    return g


def _flow_regular_subgraph(q: int, n: int, verts: tuple[int, ...], k: int) -> frozenset | None:
    """k-regular spanning subgraph of the graph induced on verts, via max-flow."""
    span = q**n
    inside = set(verts)
    cand = {u: [u * q + b for b in range(q) if (u * q + b) % span in inside] for u in verts}
    if any(len(c) < k for c in cand.values()):
        return None
    chosen: set[int] = set()
    out_deg = dict.fromkeys(verts, 0)
    in_deg = dict.fromkeys(verts, 0)
    # Augment one unit at a time: source -> u (cap k) -> edge -> v (cap k) -> sink.
    for _ in range(k * len(verts)):
        # BFS over left vertices with residual source capacity.
        prev: dict[tuple[str, int], tuple[str, int, int] | None] = {}
        queue = deque()
        for u in verts:
            if out_deg[u] < k:
                prev[("L", u)] = None
                queue.append(("L", u))
        end = None
        while queue and end is None:
            side, x = queue.popleft()
            if side == "L":
                for e in cand[x]:
                    v = e % span
                    if e not in chosen and ("R", v) not in prev:
                        prev[("R", v)] = ("L", x, e)
                        if in_deg[v] < k:
                            end = v
                            break
                        queue.append(("R", v))
            else:
                for e in sorted(chosen):
                    if e % span == x:
                        u = e // q
                        if ("L", u) not in prev:
                            prev[("L", u)] = ("R", x, e)
                            queue.append(("L", u))
        if end is None:
            return None
        node = ("R", end)
        in_deg[end] += 1
        while prev[node] is not None:
            side, x, e = prev[node]
            if side == "L":
                chosen.add(e)
            else:
                chosen.discard(e)
            node = (side, x)
        out_deg[node[1]] += 1
    return frozenset(chosen)


def k_regular_subgraph(
    q: int, n: int, k: int, L: int, budget: int = DEFAULT_SUBGRAPH_BUDGET
) -> EdgeSet | Impossible | Unsupported:
    """A k-regular subgraph of B_q(n) with exactly L vertices."""
    if not 1 <= k <= q or L < 1 or n < 0:
        raise OutOfRange("need 1 <= k <= q, L >= 1, n >= 0")
    if L > q**n:
        raise OutOfRange(f"B_{q}({n}) has only {q ** n} vertices")
    if regular_subgraph_ruled_out(n, k, L):
        return Impossible(f"no {k}-regular subgraph of B_{q}({n}) has {L} vertices")
    if n == 0:
        return EdgeSet(q, 0, frozenset(range(k)))
    if k == 1:
        return sequence_edges(lempel_cycle(q, n, L), n)
    p, rest = divmod(L - k**n, k ** (n - 1))
    if rest == 0 and p <= q - k:
        return normal_graph(q, n, k, p)
    if q**n > SEARCH_VERTEX_LIMIT:
        return Unsupported(f"B_{q}({n}) too large for the exhaustive fallback")
    tried = 0
    for verts in itertools.combinations(range(q**n), L):
        tried += 1
        if tried > budget:
            return Unsupported(f"subgraph search exceeded {budget} vertex subsets")
        found = _flow_regular_subgraph(q, n, verts, k)
        if found is not None:
            return EdgeSet(q, n, found)
    return Impossible(f"exhaustive search: no {k}-regular subgraph with {L} vertices")
