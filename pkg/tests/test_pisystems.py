from fractions import Fraction

import pytest

from fixfree import pisystems as pi
from fixfree.errors import Impossible, OutOfRange, PreconditionViolated
from fixfree.words import LevelSet, Profile, fits, is_free, kraft_sum

GAMMA_TABLE = {
    (2, 1): "3/4",
    (3, 1): "2/3",
    (3, 2): "7/9",
    (4, 1): "5/8",
    (4, 2): "3/4",
    (4, 3): "13/16",
    (5, 1): "3/5",
    (5, 2): "7/10",
    (5, 3): "19/25",
    (5, 4): "21/25",
    (6, 1): "7/12",
    (6, 2): "2/3",
    (6, 3): "3/4",
    (6, 4): "7/9",
    (6, 5): "31/36",
}


@pytest.mark.parametrize("q,k", sorted(GAMMA_TABLE))
def test_gamma_table(q, k):
    assert pi.gamma(q, k) == Fraction(GAMMA_TABLE[q, k])


def test_gamma_rejects_k_equal_q():
    with pytest.raises(OutOfRange):
        pi.gamma(3, 3)


def test_gamma_at_half_alphabet_reaches_three_quarters():
    for q in range(2, 12):
        assert pi.gamma(q, (q + 1) // 2) >= Fraction(3, 4)


def test_one_level_binary():
    p = pi.one_level_pi(2, 3, 1)
    assert p.code.strings() == ["000", "010", "101", "111"]
    assert pi.is_pi_system(p, debug=True)


def test_all_words_ending_in_zero_are_not_a_system():
    blocks = (LevelSet.from_words(2, ["000", "010", "100", "110"]),)
    assert not pi.is_pi_system(pi.PiSystem(2, 1, 3, blocks), debug=True)


def test_one_level_single_letters():
    p = pi.one_level_pi(3, 1, 2)
    assert [b.strings() for b in p.blocks] == [["0"], ["1"]]
    assert pi.is_pi_system(p, debug=True)


def test_one_level_diagonal():
    p = pi.one_level_pi(3, 2, 1)
    assert p.code.strings() == ["00", "11", "22"]
    assert pi.is_pi_system(p, debug=True)


def test_two_words_fail_shadow_condition():
    blocks = (LevelSet.from_words(2, ["00", "01"]),)
    assert not pi.is_pi_system(pi.PiSystem(2, 1, 2, blocks), debug=True)


def test_worked_ternary_system():
    p = pi.two_level_pi(3, 4, 2, 7)
    assert p.code.counts() == (0, 0, 14, 12)
    assert kraft_sum(p.code) == Fraction(2, 3)
    assert pi.is_pi_system(p, debug=True)


def test_worked_ternary_obstruction():
    assert isinstance(pi.two_level_pi(3, 4, 2, 5), Impossible)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_binary_two_level_counts(n):
    for L in range(1, 2 ** (n - 1) + 1):
        p = pi.two_level_pi(2, n + 1, 1, L)
        assert p.code.count(n) == L and p.code.count(n + 1) == 2**n - 2 * L
        assert pi.is_pi_system(p)


@pytest.mark.parametrize("q,n,k,d", [(4, 3, 2, 2), (5, 3, 2, 2), (4, 4, 1, 3), (3, 2, 1, 1)])
def test_chain_systems(q, n, k, d):
    p = pi.chain_pi(q, n, k, d)
    assert pi.is_pi_system(p, debug=True) and kraft_sum(p.code) == Fraction(k, q)


@pytest.mark.parametrize("q,n,k,d", [(4, 3, 2, 2), (4, 4, 2, 2), (5, 3, 2, 3)])
def test_double_chain_systems(q, n, k, d):
    p = pi.double_chain_pi(q, n, k, d)
    assert pi.is_pi_system(p, debug=True) and kraft_sum(p.code) == Fraction(k, q)


def test_text_round_trip():
    p = pi.two_level_pi(3, 4, 2, 7)
    assert pi.PiSystem.parse(p.to_text()) == p


def test_extend_to_own_profile_is_identity():
    p = pi.two_level_pi(2, 4, 1, 3)
    assert pi.pi_extend(p, p.profile()) == p.code


def test_extend_binary_target():
    p = pi.two_level_pi(2, 4, 1, 3)
    target = Profile(2, (0, 0, 3, 2, 3, 4))
    code = pi.pi_extend(p, target)
    assert is_free(code, "fix") and fits(code, target)


def test_extend_refuses_near_miss():
    p = pi.two_level_pi(2, 4, 1, 3)
    with pytest.raises(PreconditionViolated):
        pi.pi_extend(p, Profile(2, (0, 0, 3, 2, 0, 0, 0, 0, 0, 0, 0, 0, 2049)))


def test_extend_requires_matching_low_levels():
    p = pi.two_level_pi(2, 4, 1, 3)
    with pytest.raises(PreconditionViolated):
        pi.pi_extend(p, Profile(2, (0, 0, 2, 2)))
