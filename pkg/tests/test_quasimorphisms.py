import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import commutator_core, cyclic_words, reduced_words
from freescl.quasimorphisms import (CountingSet, DegenerateError, InvalidSetError, _packing, big_count,
                                    defect_probe,
                                    h_small, homogenized_qm, rigidity_certificate, small_count,
                                    verify_certificate)
from freescl.scl import scl
from freescl.words import Chain, CyclicWord, Word, invert


def test_small_count_examples():
    assert small_count(CountingSet.of(["ab"]), "abab") == (2, 2)
    assert small_count(CountingSet.of(["aa"]), "aaa")[0] == 1
    assert h_small(CountingSet.of(["ab"]), "BABA") == -2


def test_invalid_set():
    with pytest.raises(InvalidSetError):
        CountingSet(frozenset({()}))


def test_homogenized_examples():
    S = CountingSet.of(["ab"])
    assert homogenized_qm(S, CyclicWord("ab")) == 1
    assert homogenized_qm(S, CyclicWord("abab")) == 2
    assert homogenized_qm(CountingSet.of(["ab", "AB"]), CyclicWord("abAB")) == 2
    assert homogenized_qm(CountingSet.of(["aa"]), CyclicWord("a")) == Fraction(1, 2)


@given(st.lists(reduced_words(min_size=1, max_size=3), min_size=1, max_size=3), cyclic_words(max_size=6))
def test_homogenized_matches_limit(words, w):
    S = CountingSet(frozenset(words))
    dens = homogenized_qm(S, w)
    # c_S(w^N) - c_S-inverse(w^N) stays within a bounded error of N times the density
    for N in (5, 11, 23):
        c = _packing(S, w.letters * N) - _packing(S.inverse(), w.letters * N)
        assert abs(c - N * dens) <= 6


@given(st.lists(reduced_words(min_size=1, max_size=3), min_size=1, max_size=3), reduced_words(max_size=12))
def test_antisymmetry(words, w):
    S = CountingSet(frozenset(words))
    assert h_small(S, invert(Word(w))) == -h_small(S, w)


@given(st.lists(reduced_words(min_size=1, max_size=3), min_size=1, max_size=3), cyclic_words(max_size=10),
       st.integers(1, 5))
def test_homogeneity(words, w, n):
    S = CountingSet(frozenset(words))
    assert homogenized_qm(S, CyclicWord(w.letters * n)) == n * homogenized_qm(S, w)


def test_defect_examples():
    S = CountingSet.of(["ab"])
    assert defect_probe(S, trials=10_000, max_len=40, seed=0).max_defect <= 3
    assert h_small(S, "") == 0
    assert abs(h_small(S, "ab") - h_small(S, "a") - h_small(S, "b")) == 1


def test_big_count_is_overlapping():
    assert big_count(["aa"], "aaa") == 2


def test_certificate_abAB():
    cert = rigidity_certificate("abAB", epsilon=0.25)
    assert cert.block_length == 2
    assert sorted(cert.S) == sorted(["ab", "AB"])
    assert sorted(cert.S_prime) == sorted(["ab", "AB"])
    assert cert.value == 2
    assert cert.lower_bound == Fraction(1, 6)
    assert cert.lower_bound <= scl("abAB", mode="exact").value
    assert verify_certificate(cert.dumps()).ok


def test_certificate_degenerate():
    with pytest.raises(DegenerateError):
        rigidity_certificate((), epsilon=0.25, rank=2)


def test_certificate_tamper_detected():
    v = commutator_core(60, 5)
    data = json.loads(rigidity_certificate(v).dumps())
    data["value"] = str(Fraction(data["value"]) + 1)
    data["lower_bound"] = str(Fraction(data["value"]) / 12)
    chk = verify_certificate(data)
    assert not chk.ok and any("homogenized value" in f for f in chk.failures)
    data = json.loads(rigidity_certificate(v).dumps())
    data["blocks"][0][0] = (data["blocks"][0][0] + 1)
    assert not verify_certificate(data).ok


@pytest.mark.parametrize("n", [8, 12, 16, 20, 24])
def test_certificate_below_scl(n):
    for seed in range(3):
        v = commutator_core(n, seed)
        if len(v) < 4:
            continue
        cert = rigidity_certificate(v)
        assert verify_certificate(cert).ok
        exact = scl(Chain.from_words([v.word]), mode="exact").value
        assert cert.lower_bound <= exact
        assert rigidity_certificate(v, offset="best").lower_bound <= exact


@pytest.mark.slow
def test_certificate_at_scale():
    v = commutator_core(10_000, 7)
    cert = rigidity_certificate(v)
    assert cert.lower_bound >= 60
    assert verify_certificate(json.loads(cert.dumps())).ok
