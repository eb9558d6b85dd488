from fractions import Fraction

from hypothesis import assume, given
from hypothesis import strategies as st

from fixfree import constructors as c
from fixfree import debruijn as db
from fixfree import pisystems as pi
from fixfree import verifier as v
from fixfree.words import LevelSet, Profile, Word, fits, free_bits, is_free, kraft_sum

import oracles


@st.composite
def word_sets(draw, q=2, max_len=5, max_size=6):
    words = draw(st.sets(st.text(alphabet="0123456789"[:q], min_size=1, max_size=max_len), max_size=max_size))
    return sorted(words)


@st.composite
def profiles(draw, q, top, bound):
    counts = []
    total = Fraction(0)
    for l in range(1, top + 1):
        room = int((bound - total) * q**l)
        x = draw(st.integers(0, max(0, min(room, q**l))))
        counts.append(x)
        total += Fraction(x, q**l)
    return Profile(q, tuple(counts))


@given(st.integers(2, 5), st.integers(1, 6), st.data())
def test_num_round_trip(q, n, data):
    val = data.draw(st.integers(0, q**n - 1))
    w = Word(q, n, val)
    assert Word.parse(str(w), q) == w


@given(word_sets())
def test_is_free_matches_string_check(words):
    assert is_free(LevelSet.from_words(2, words), "fix") == oracles.is_fix_free(words)


@given(word_sets(q=3, max_len=3), st.integers(1, 5))
def test_free_words_match_brute_force(words, n):
    code = LevelSet.from_words(3, words)
    got = set(LevelSet(3, {n: free_bits(code, n)}).strings())
    assert got == set(oracles.free_words(words, 3, n))


@given(st.sampled_from([2, 3, 4]), st.data())
def test_half_builder(q, data):
    p = data.draw(profiles(q, 5, Fraction(1, 2)))
    code = c.build_half(p)
    assert is_free(code, "fix") and fits(code, p)


@given(st.sampled_from([2, 3]), st.data())
def test_two_level_builder(q, data):
    m = data.draw(st.integers(1, 5))
    n = data.draw(st.integers(m + 1, 7 if q == 2 else 6))
    am = data.draw(st.integers(1, int(Fraction(3, 4) * q**m)))
    room = int((Fraction(3, 4) - Fraction(am, q**m)) * q**n)
    assume(room >= 1)
    an = data.draw(st.integers(1, room))
    p = Profile(q, tuple(am if l == m else an if l == n else 0 for l in range(1, n + 1)))
    code = c.build_two_level(p)
    assert is_free(code, "fix") and fits(code, p)


@given(st.data())
def test_one_level_extension_quaternary(data):
    n = data.draw(st.integers(1, 3))
    system = pi.one_level_pi(4, n, 2)
    base = Fraction(2, 4)
    counts = {n: system.code.count(n) + data.draw(st.integers(0, int(Fraction(1, 4) * 4**n)))}
    total = Fraction(counts[n], 4**n)
    for l in range(n + 1, 5):
        room = int((Fraction(3, 4) - total) * 4**l)
        counts[l] = data.draw(st.integers(0, max(0, room)))
        total += Fraction(counts[l], 4**l)
    assume(total <= Fraction(3, 4) and total >= base)
    p = Profile(4, tuple(counts.get(l, 0) for l in range(1, 5)))
    code = pi.pi_extend(system, p)
    assert is_free(code, "fix") and fits(code, p)


@given(st.sampled_from([(2, 2), (2, 3), (2, 4), (2, 5), (3, 2), (3, 3), (4, 2)]), st.data())
def test_lempel_cycles(qn, data):
    q, n = qn
    L = data.draw(st.integers(1, q**n))
    w = db.lempel_cycle(q, n, L)
    assert len(w) == L and oracles.is_cycle(w.letters, n)


@given(st.sampled_from([(2, 2, 1), (3, 2, 2), (3, 3, 2), (4, 2, 2), (4, 2, 3)]), st.data())
def test_regular_subgraphs_and_factors(qnk, data):
    q, n, k = qnk
    L = data.draw(st.integers(1, q**n))
    g = db.k_regular_subgraph(q, n, k, L)
    if not isinstance(g, db.EdgeSet):
        assert db.regular_subgraph_ruled_out(n, k, L) or isinstance(g, db.Unsupported)
        return
    assert len(g.vertices()) == L
    parts = db.one_factor_decomposition(g, k)
    assert frozenset().union(*(p.edges for p in parts)) == g.edges
    assert sum(len(p) for p in parts) == len(g)
    if len(db._components(g)) == 1:
        w = db.euler_circuit(g)
        assert db.regular_sequence_check(w, k, L, n)
        assert all(w.letters.count(a) >= k**n for a in set(w.letters))


@given(st.data())
def test_search_witness_and_budget_independence(data):
    p = data.draw(profiles(2, 5, Fraction(1)))
    assume(p.levels())
    r = v.search(p)
    if r.verdict == v.FOUND:
        assert is_free(r.witness, "fix") and fits(r.witness, p)
    assert v.search(p, budget=10 * r.budget).verdict == r.verdict


@given(st.lists(st.integers(1, 6), min_size=1, max_size=5))
def test_su_implies_found_and_ne_zero_implies_nonexistent(lengths):
    seq = v.LengthsSeq(tuple(sorted(lengths)))
    verdict = v.search(seq.profile()).verdict
    assert v.su(seq) <= v.ne(seq)
    if v.su(seq) > 0:
        assert verdict == v.FOUND
    if v.ne(seq) == 0:
        assert verdict == v.NONEXISTENT
    if v.madcor_check(seq):
        assert verdict == v.FOUND


@given(st.fractions(min_value=Fraction(1, 100), max_value=Fraction(1, 4)), st.sampled_from([2, 3]))
def test_counterexample_window(eps, q):
    p, cert = v.counterexample(q, eps)
    assert cert.holds and Fraction(3, 4) < p.kraft() <= Fraction(3, 4) + eps


@given(st.data())
def test_construct_never_contradicts_search(data):
    p = data.draw(profiles(2, 5, Fraction(1)))
    report = c.construct(p, search=False)
    if report.verdict == "Found":
        assert is_free(report.code, "fix") and fits(report.code, p)
        assert v.search(p).verdict == v.FOUND
