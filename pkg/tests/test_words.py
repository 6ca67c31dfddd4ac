from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import cyclic_words, letters, reduced_words
from freescl.words import (Alphabet, AlphabetError, Chain, ChainSyntaxError, CyclicWord, Word,
                           abelianization, chain, cyclic_reduce, invert, normalize_chain, parse_chain,
                           reduce)


def test_alphabet_rank():
    assert sorted(Alphabet(2).letters) == sorted("abAB")
    with pytest.raises(AlphabetError):
        Alphabet(1)
    with pytest.raises(AlphabetError):
        Alphabet(2).encode("abc")


@pytest.mark.parametrize("raw, out", [("abBA", ""), ("aabBA", "a"), ("abAB", "abAB")])
def test_reduce_examples(raw, out):
    assert str(reduce(raw)) == out


@pytest.mark.parametrize("w, out", [("abAB", "baBA"), ("", ""), ("aab", "BAA")])
def test_invert_examples(w, out):
    assert str(invert(Word.parse(w))) == out


@pytest.mark.parametrize("w, core, conj", [("Baab", "aa", "B"), ("abAB", "abAB", ""), ("aBA", "B", "a")])
def test_cyclic_reduce_examples(w, core, conj):
    c, g = cyclic_reduce(Word.parse(w))
    assert c == CyclicWord(core)
    assert str(g) == conj
    # w = g core g^-1
    assert reduce(g.letters + c.letters + invert(g).letters) == Word.parse(w)


def test_abelianization_examples():
    assert abelianization(chain("abAB")) == (0, 0)
    assert abelianization(chain("aab")) == (2, 1)
    assert abelianization(parse_chain("ab - ba")) == (0, 0)


def test_normalize_examples():
    assert normalize_chain(parse_chain("abAB + baBA")).is_zero()
    assert normalize_chain(parse_chain("-abAB")) == normalize_chain(chain("baBA"))
    ab2 = normalize_chain(chain("abab"))
    assert ab2.terms == ((Fraction(2), CyclicWord("ab")),)


def test_parse_chain_examples():
    c = parse_chain("1/2*abAB + 3*aabAAB")
    assert [t for t, _ in c.terms] == [Fraction(1, 2), Fraction(3)]
    assert normalize_chain(parse_chain("abAB - abAB")).is_zero()
    with pytest.raises(ChainSyntaxError) as e:
        parse_chain("ab + * ")
    assert e.value.position == 4
    with pytest.raises(AlphabetError):
        parse_chain("abcABC", 2)


def test_cyclic_word_rejects_unreduced():
    with pytest.raises(ValueError):
        CyclicWord("abA")


@given(st.lists(letters(), max_size=20))
def test_reduce_idempotent(raw):
    once = reduce(tuple(raw))
    assert reduce(once.letters) == once


@given(reduced_words(), reduced_words())
def test_reduce_length_parity(u, v):
    w = reduce(u + v)
    assert len(w) <= len(u) + len(v)
    assert (len(w) - len(u) - len(v)) % 2 == 0


@given(st.lists(letters(), max_size=20))
def test_invert_commutes_with_reduce(raw):
    flipped = tuple(c ^ 1 for c in reversed(raw))
    assert invert(reduce(tuple(raw))) == reduce(flipped)
    w = reduce(tuple(raw))
    assert invert(invert(w)) == w


@given(reduced_words(min_size=1), st.integers(0, 30))
def test_cyclic_core_rotation_invariant(w, r):
    core, _ = cyclic_reduce(Word(w))
    r %= len(w)
    rotated = reduce(w[r:] + w[:r])
    assert cyclic_reduce(rotated)[0] == core


@given(st.lists(st.tuples(st.integers(-3, 3).filter(bool), cyclic_words()), min_size=1, max_size=4))
def test_normalize_properties(terms):
    c = Chain(tuple((Fraction(t), w) for t, w in terms), 2)
    n = normalize_chain(c)
    assert abelianization(n) == abelianization(c)
    assert normalize_chain(n) == n
    assert all(t > 0 for t, _ in n.terms)
    assert len({w for _, w in n.terms}) == len(n.terms)
