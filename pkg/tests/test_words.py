import pytest
from hypothesis import given
from hypothesis import strategies as st

from lsc.certify import dt_check, revalidate
from lsc.errors import InputError
from lsc.schedules import Geometric
from lsc.setcalc import Empty, Full, Inter, Residue, Return, Thick, eventually_periodic_normalize, window
from lsc.words import (
    CyclicSystem,
    count_occurrences,
    cylinder_cover_check,
    dyn_thick_from_returns,
    joint_return,
    max_gap_of,
    return_set,
    uniform_recurrence_profile,
)
from lsc.wordspec import FIBONACCI, THUE_MORSE, Periodic, Sturmian, Substitution, expand, factor, occurrences

words = st.sampled_from([FIBONACCI, THUE_MORSE, Periodic("abc"), Sturmian((2, 1)), Sturmian((1, 3), cycled=False)])


def iterate(rules, seed, n):
    w = seed
    while len(w) < n:
        w = "".join(rules[c] for c in w)
    return w[:n]


# -- generation


def test_expand_examples():
    assert expand(FIBONACCI, 8) == "abaababa" == iterate({"a": "ab", "b": "a"}, "a", 8)
    assert expand(Periodic("ab"), 5) == "ababa"
    assert expand(THUE_MORSE, 8) == "01101001" == iterate({"0": "01", "1": "10"}, "0", 8)


def test_thue_morse_matches_bit_parity():
    prefix = expand(THUE_MORSE, 4096)
    assert prefix == "".join(str(bin(i).count("1") % 2) for i in range(4096))


def test_sturmian_golden_ratio_is_fibonacci():
    assert expand(Sturmian((1,)), 1000) == expand(FIBONACCI, 1000)


def test_sturmian_standard_words():
    # s_1 = a^2 b, s_2 = s_1 a, s_3 = s_2^2 s_1 with terms (2, 1) cycled
    s1 = "aab"
    s2 = s1 + "a"
    s3 = s2 * 2 + s1
    assert expand(Sturmian((2, 1)), len(s3)) == s3
    # cycled=False continues with ones
    assert Sturmian((3,), cycled=False).term(5) == 1 and Sturmian((3,)).term(5) == 3


def test_sturmian_factor_complexity():
    prefix = expand(Sturmian((2, 3, 1)), 5000)
    for n in range(1, 12):
        assert len({prefix[i : i + n] for i in range(len(prefix) - n)}) == n + 1


def test_word_spec_validation():
    with pytest.raises(InputError):
        Substitution((("a", "ba"), ("b", "a")), "a")
    with pytest.raises(InputError):
        Substitution((("a", "ac"),), "a")
    with pytest.raises(InputError):
        Sturmian((0, 1))
    with pytest.raises(InputError):
        Periodic("")
    with pytest.raises(InputError):
        expand(FIBONACCI, 0)


@given(words, st.integers(1, 500), st.integers(0, 500))
def test_expansion_is_stable(word, n, extra):
    assert expand(word, n + extra).startswith(expand(word, n))
    assert factor(word, n, 7) == expand(word, n + 7)[n:]


def test_occurrences_array():
    assert occurrences("abaab", "ab").tolist() == [True, False, False, True, False]
    assert not occurrences("ab", "abc").any()


# -- return sets


def test_return_set_examples():
    expr, win = return_set(FIBONACCI, "a", 13)
    assert max_gap_of(win) <= 2
    _, per = return_set(Periodic("ab"), "ab", 100)
    assert per == window(Residue(0, 2), 100)
    _, bb = return_set(FIBONACCI, "bb", 10**3)
    assert not bb.bits.any()


def test_return_set_errors():
    with pytest.raises(InputError):
        return_set(FIBONACCI, "ac", 100)
    with pytest.raises(InputError):
        return_set(FIBONACCI, "abaab", 3)


@given(words, st.sampled_from(["a", "b", "ab", "ba", "aab", "0", "01", "11"]), st.integers(0, 1))
def test_return_set_consistency(word, pattern, base):
    if set(pattern) - set(word.alphabet):
        return
    N = 400
    _, win = return_set(word, pattern, N, base)
    prefix = expand(word, N + len(pattern) + 1)
    for n in range(1, N - len(pattern) + 1):
        i = n - base
        assert (n in win) == (i >= 0 and prefix[i : i + len(pattern)] == pattern)


def test_fibonacci_gap_facts():
    prefix = expand(FIBONACCI, 10**4)
    assert "bb" not in prefix
    _, a = return_set(FIBONACCI, "a", 10**4)
    _, b = return_set(FIBONACCI, "b", 10**4)
    assert max_gap_of(a) <= 2 and max_gap_of(b) <= 3
    assert count_occurrences(FIBONACCI, "a", 10**4) == prefix.count("a")


# -- recurrence profile


def test_profile_examples():
    per = uniform_recurrence_profile(Periodic("ab"), 6, 200)
    assert per.own == tuple(n + 1 for n in range(1, 7))
    fib = uniform_recurrence_profile(FIBONACCI, 5, 10**4)
    assert fib.W(1) == 2 and fib.monotone and not fib.flagged
    marker = Substitution((("c", "ca"), ("a", "ab"), ("b", "a")), "c")
    assert "c" in uniform_recurrence_profile(marker, 3, 1000).flagged


def test_profile_brute_windows():
    prefix = expand(FIBONACCI, 400)
    prof = uniform_recurrence_profile(prefix, 4, 400)
    for n in range(1, 5):
        factors = {prefix[i : i + n] for i in range(400 - n + 1)}
        W = prof.every[n - 1]
        for start in range(0, 400 - W + 1):
            chunk = prefix[start : start + W]
            assert all(u in chunk for u in factors)
        assert W >= n


def test_profile_never_shrinks_with_longer_prefix():
    short = uniform_recurrence_profile(FIBONACCI, 6, 500)
    long = uniform_recurrence_profile(FIBONACCI, 6, 5000)
    assert all(a <= b for a, b in zip(short.every, long.every))


def test_profile_requires_long_prefix():
    with pytest.raises(InputError):
        uniform_recurrence_profile(FIBONACCI, 10, 100)


# -- cyclic systems


def test_joint_return_examples():
    jr = joint_return([CyclicSystem(2, 0, {1}), CyclicSystem(3, 0, {2})], 100)
    assert jr.gap == 6 and jr.coprime_law
    assert jr.window == window(Residue(5, 6), 100)
    single = joint_return([CyclicSystem(4, 0, {0, 2})], 100)
    assert single.gap == 2 and single.coprime_law is None
    clash = joint_return([CyclicSystem(2, 0, {1}), CyclicSystem(4, 0, {0})], 100)
    assert clash.empty and clash.gap is None


@given(
    st.lists(st.sampled_from([2, 3, 5, 7]), min_size=1, max_size=3, unique=True),
    st.randoms(),
)
def test_coprime_law(moduli, rnd):
    systems = [CyclicSystem(m, rnd.randrange(m), {rnd.randrange(m)}) for m in moduli]
    jr = joint_return(systems, 500)
    M = 1
    for m in moduli:
        M *= m
    assert jr.coprime_law and jr.gap == M
    brute = [n for n in range(1, 501) if all((s.start + n) % s.m in s.targets for s in systems)]
    assert jr.window.members().tolist() == brute
    r = brute[0] % M
    assert eventually_periodic_normalize(jr.expr) == eventually_periodic_normalize(Residue(r, M))


def test_cyclic_system_validation():
    with pytest.raises(InputError):
        CyclicSystem(3, 0, set())
    assert CyclicSystem(3, 7, {5}).start == 1 and CyclicSystem(3, 7, {5}).targets == {2}


# -- dynamically thick constructions


def test_dyn_thick_from_returns():
    rets = [CyclicSystem(p, 0, {1}).return_expr() for p in (2, 3)]
    built = dyn_thick_from_returns(rets, [Geometric(5, 1), Geometric(5, 2)])
    assert built.assumptions
    for probe in (Residue(0, 2), Residue(2, 3)):
        v = dt_check(built.expr, probe, 2000, 3, 10**5)
        assert v.certified and revalidate(probe, v, source=built.expr)
    assert dyn_thick_from_returns([Residue(1, 2)], [None]).expr == Residue(1, 2)
    assert dyn_thick_from_returns([], []).expr == Empty()
    with pytest.raises(InputError):
        dyn_thick_from_returns([Residue(1, 2)], [])
    solo = dyn_thick_from_returns([Full()], [Geometric(10)]).expr
    assert solo == Inter((Full(), Thick(Geometric(10))))


# -- cover check


def test_cover_examples():
    assert cylinder_cover_check(FIBONACCI, ["a", "b"], 1, 1000).covered
    rep = cylinder_cover_check(FIBONACCI, ["a"], 1, 1000)
    assert not rep.covered and rep.violating == "b"
    tm = cylinder_cover_check(THUE_MORSE, ["01", "10", "00"], 2, 1000)
    prefix = expand(THUE_MORSE, 1000)
    first_bad = next(prefix[i : i + 2] for i in range(999) if prefix[i : i + 2] not in ("01", "10", "00"))
    assert tm.violating == first_bad == "11"
    with pytest.raises(InputError):
        cylinder_cover_check(FIBONACCI, ["ab"], 1, 100)


def test_return_membership_via_expression():
    assert 3 in Return(FIBONACCI, "a") and 1 not in Return(FIBONACCI, "a")
