import math
from collections import Counter
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import commutator_core, reduced_words
from freescl.sampling import (ExhaustionError, ParityError, RandomWordSpec, RangeError, ScaleParameters,
                              bridging_count, commutator_fraction, inverse_subword_mass, occurrences,
                              random_commutator_word, random_reduced_word, subword_stats)
from freescl.words import Alphabet, Word, exponent_sums, invert

A2 = Alphabet(2)


def test_empty_and_long_words():
    assert len(random_reduced_word(RandomWordSpec(A2, 0, 1))) == 0
    w = random_reduced_word(RandomWordSpec(A2, 10**5, 3))
    assert len(w) == 10**5 and Word(w.letters) == w


def test_seeded_determinism():
    spec = RandomWordSpec(A2, 500, 42, True)
    assert random_commutator_word(spec) == random_commutator_word(spec)
    assert random_reduced_word(RandomWordSpec(A2, 50, 1)) != random_reduced_word(RandomWordSpec(A2, 50, 2))


def test_first_letter_uniform():
    hits = sum(random_reduced_word(RandomWordSpec(A2, 1, s)).letters[0] == 0 for s in range(10_000))
    sigma = math.sqrt(10_000 * 0.25 * 0.75)
    assert abs(hits - 2500) <= 4 * sigma


def test_commutator_words():
    for seed in range(20):
        w = random_commutator_word(RandomWordSpec(A2, 4, seed, True))
        assert len(w) == 4 and not any(exponent_sums(w.letters, 2))
    seen = {str(random_commutator_word(RandomWordSpec(A2, 4, s, True))) for s in range(300)}
    assert "abAB" in seen


@pytest.mark.parametrize("k, n", [(2, 4), (2, 6), (3, 4)])
def test_commutator_words_uniform(k, n):
    """Conditioned samples are uniform over the reduced words of length n in [F,F]."""
    support = [w for w in product(range(2 * k), repeat=n)
               if all(w[i] != w[i + 1] ^ 1 for i in range(n - 1)) and not any(exponent_sums(w, k))]
    trials = 60 * len(support)
    counts = Counter(random_commutator_word(RandomWordSpec(Alphabet(k), n, s, True)).letters
                     for s in range(trials))
    assert set(counts) == set(support)
    chi2 = sum((counts[w] - 60) ** 2 / 60 for w in support)
    dof = len(support) - 1
    assert chi2 < dof + 5 * math.sqrt(2 * dof)


def test_parity_and_exhaustion():
    with pytest.raises(ParityError):
        RandomWordSpec(A2, 5, 0, True)
    with pytest.raises(ParityError):
        random_commutator_word(RandomWordSpec(A2, 5, 0, False))
    with pytest.raises(ExhaustionError):
        random_commutator_word(RandomWordSpec(A2, 2, 0, True))
    with pytest.raises(ExhaustionError):
        random_commutator_word(RandomWordSpec(A2, 40, 0, True), retry_cap=1)


def test_scale_parameters():
    s = ScaleParameters(10_000, 2, 1.5)
    assert round(s.m, 6) == 8.383613
    assert s.block_length == math.ceil(1.5 * s.m)


def test_subword_examples():
    cm = subword_stats(Word.parse("abab"), 2, cyclic=True)
    assert cm.as_strings() == {"ab": 2, "ba": 2}
    assert cm.A() == 1
    cm = subword_stats(Word.parse("abAB"), 1, cyclic=True)
    assert all(cm.count(x) == 1 for x in "abAB")
    assert cm.A() == 0
    with pytest.raises(RangeError):
        subword_stats(Word.parse("ab"), 3)


def test_A1_vanishes_on_commutators():
    for seed in range(5):
        v = random_commutator_word(RandomWordSpec(A2, 200, seed, True))
        assert subword_stats(v, 1).A() == 0


@given(reduced_words(min_size=1, max_size=30), st.integers(1, 6))
def test_counting_properties(v, ell):
    v = Word(v)
    if ell > len(v):
        return
    cm = subword_stats(v, ell)
    assert cm.total == len(v) - ell + 1
    assert 0 <= cm.A() <= 1
    assert cm.A() == subword_stats(invert(v), ell).A()
    assert cm.H(lambda w: 1 if w[0] == 0 else 0) == -subword_stats(invert(v), ell).H(lambda w: 1 if w[0] == 0 else 0)


@given(reduced_words(min_size=2, max_size=40))
def test_no_overlap_with_inverse(v):
    """A copy of sigma never overlaps a copy of sigma^-1 in a reduced word."""
    for ell in range(1, 7):
        spots: dict[tuple, list[int]] = {}
        for i, s in occurrences(v, ell):
            spots.setdefault(s, []).append(i)
        for s, starts in spots.items():
            inv = tuple(c ^ 1 for c in reversed(s))
            for i in starts:
                for j in spots.get(inv, ()):
                    assert j + ell <= i or i + ell <= j


def test_inverse_mass_examples():
    r = inverse_subword_mass(Word.parse("abAB"), block_length=1)
    assert (r.card_S, r.inverse_mass) == (4, 4)
    r = inverse_subword_mass(Word.parse("abAB"), block_length=2)
    # the definition itself, by a double loop over cyclic positions
    v, vi = "abAB", "baBA"
    S = {(v + v)[i:i + 2] for i in range(4)}
    mass = sum(1 for s in S for j in range(4) if (vi + vi)[j:j + 2] == s)
    assert (r.card_S, r.inverse_mass) == (len(S), mass)
    assert r.check()
    with pytest.raises(RangeError):
        inverse_subword_mass(Word.parse("abAB"), block_length=5)


@pytest.mark.slow
def test_inverse_mass_at_scale():
    n = 10_000
    good = 0
    for seed in range(100):
        r = inverse_subword_mass(commutator_core(n, seed), L=1.5)
        good += r.card_S >= n - n ** 0.9
        assert r.check()
    assert good >= 95


def _exhaustive_bridge(a, b, m, k=2):
    count = 0
    for u in product(range(2 * k), repeat=m):
        w = (a,) + u + (b,)
        if all(w[i] != w[i + 1] ^ 1 for i in range(len(w) - 1)):
            count += 1
    return count


def test_bridging_examples():
    a, A, b = 0, 1, 2
    assert bridging_count(a, a, 1, A2) == 3
    assert bridging_count(a, b, 1, A2) == 2
    assert bridging_count("a", "b", 2, A2) == 7 == _exhaustive_bridge(a, b, 2)
    assert bridging_count("a", "A", 2, A2) == 6 == _exhaustive_bridge(a, A, 2)
    assert abs(Fraction(6, 7) - 1) <= Fraction(1, 4)


@pytest.mark.parametrize("m", range(0, 6))
def test_bridging_row_sums(m):
    for a in range(4):
        total = sum(bridging_count(a, b, m, A2) for b in range(4))
        # reduced words of length m+2 starting with a
        assert total == 3 ** (m + 1)
        for b in range(4):
            assert bridging_count(a, b, m, A2) == _exhaustive_bridge(a, b, m)


def test_commutator_fraction_small():
    assert commutator_fraction(A2, 7, 100)[0] == 0
    assert commutator_fraction(A2, 2, 1000)[0] == 0


@pytest.mark.slow
def test_commutator_fraction_scaling():
    _, c100 = commutator_fraction(A2, 100, 10**6, seed=1)
    _, c400 = commutator_fraction(A2, 400, 10**6, seed=2)
    assert abs(c100 - c400) / c400 < 0.25
