import dataclasses
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import commutator_word
from freescl.scl import (NoWitness, NotABoundaryError, build_lp, enumerate_pieces, extract_fatgraph, scl,
                         scl_oracle_small, solve_exact, verify_fatgraph)
from freescl.scl.fatgraph import Fatgraph, fatgraph_from_weights
from freescl.words import Chain, CyclicWord, Word, chain, normalize_chain, parse_chain


def test_pieces_abAB():
    p = enumerate_pieces(normalize_chain(chain("abAB")))
    assert p.counts() == {"positions": 4, "gaps": 4, "squares": 2, "triangles": 24}
    assert p.squares == ((0, 2), (1, 3))


def test_pieces_zero_and_not_boundary():
    assert enumerate_pieces(normalize_chain(parse_chain("abAB + baBA"))).counts()["squares"] == 0
    with pytest.raises(NotABoundaryError):
        enumerate_pieces(normalize_chain(chain("ab")))
    with pytest.raises(NotABoundaryError):
        scl("ab")


@pytest.mark.parametrize("text, value", [
    ("abAB", Fraction(1, 2)),
    ("baBA", Fraction(1, 2)),
    ("abABabAB", Fraction(1)),
    ("abAB + baBA", Fraction(0)),
    ("1/2*abAB", Fraction(1, 4)),
])
def test_exact_values(text, value):
    r = scl(text, mode="exact")
    assert r.value == value
    assert isinstance(r.value, Fraction)
    assert r.strong_duality


def test_hand_certificate_abAB():
    glp = build_lp(enumerate_pieces(normalize_chain(chain("abAB")), distinct_triangles_only=True))
    x = [Fraction(0)] * glp.program.n_cols
    for j in range(glp.n_squares):
        x[j] = Fraction(1)
    for tri in [(1, 0, 3), (3, 2, 1)]:
        r = min(range(3), key=lambda i: tri[i:] + tri[:i])
        x[glp.n_squares + glp.triangles.index(tri[r:] + tri[:r])] = Fraction(1)
    assert glp.program.is_feasible_exact(x)
    assert glp.program.objective(x) == Fraction(1, 2)


def test_inexact_mode_residual():
    r = scl(chain("abAB"), mode="inexact")
    assert abs(r.value - 0.5) < 1e-9
    assert r.residual < 1e-9


def test_lp_text_export():
    r = scl("abAB", mode="exact")
    text = r.lp.program.to_text()
    assert "minimize" in text and "1/4" in text and "cov_0" in text


def test_extract_abAB():
    c = chain("abAB")
    y = extract_fatgraph(scl(c, mode="exact"))
    assert (y.n_vertices, y.n_edges, y.euler_characteristic, y.multiplicity) == (2, 3, -1, 1)
    assert sorted(y.edge_lengths()) == [0, 1, 1]
    rep = verify_fatgraph(y, c)
    assert rep.ok, rep.failures
    assert rep.stats["trivalent"]
    assert rep.stats["scl_bound"] == Fraction(1, 2)
    assert [CyclicWord(w) for w in y.boundary() if w] == [CyclicWord("abAB")]


def test_extract_zero_and_square():
    y = extract_fatgraph(scl(parse_chain("abAB + baBA"), mode="exact"))
    assert y.n_vertices == 0 and y.euler_characteristic == 0
    c = chain("abABabAB")
    y = extract_fatgraph(scl(c, mode="exact"))
    assert y.scl_bound() == 1
    assert verify_fatgraph(y, c).ok


def test_verify_negative_control():
    c = chain("abAB")
    y = extract_fatgraph(scl(c, mode="exact"))
    labels = list(y.labels)
    j = next(i for i, lab in enumerate(labels) if lab)
    labels[j] = tuple(x ^ 1 for x in labels[j])
    bad = Fatgraph(y.vertices, labels, y.multiplicity, y.rank, y.chi)
    rep = verify_fatgraph(bad, c)
    assert not rep.ok
    assert not rep.checks["boundary"] or not rep.checks["boundary_reduced"]


def test_fatgraph_json_roundtrip():
    y = extract_fatgraph(scl("abAB + 2*aabAAB", mode="exact"))
    z = Fatgraph.from_json(y.to_json())
    assert z.boundary() == y.boundary() and z.euler_characteristic == y.euler_characteristic


def test_disconnected_extremal_chain_boundary():
    # a + b + AB + abAB: an extremal surface exists and may be disconnected
    c = parse_chain("a + b + AB + abAB")
    r = scl(c, mode="exact")
    y = extract_fatgraph(r)
    rep = verify_fatgraph(y, c)
    assert rep.checks["boundary"], rep.failures
    assert rep.ok
    assert y.scl_bound() == r.value


def test_oracle_examples():
    assert scl_oracle_small(chain("abAB"), 2) == Fraction(1, 2)
    assert scl_oracle_small(parse_chain("abAB + baBA"), 2) == 0
    with pytest.raises(NoWitness):
        scl_oracle_small(chain("abAB"), 1)


def small_chains(max_terms=2, max_len=10):
    """Random homologically trivial chains from commutator words and torsion-free pairs."""
    @st.composite
    def build(draw):
        terms = draw(st.integers(1, max_terms))
        words, coefs, total = [], [], 0
        for _ in range(terms):
            n = draw(st.sampled_from([4, 6, 8]))
            if total + n > max_len:
                break
            words.append(commutator_word(n, draw(st.integers(0, 10**6))))
            coefs.append(Fraction(draw(st.integers(1, 3)), draw(st.integers(1, 2))))
            total += n
        return Chain.from_words(words, coefs)
    return build()


@given(small_chains())
def test_inversion_symmetry(c):
    assert scl(c, mode="exact").value == scl(c.inverted(), mode="exact").value


@given(small_chains(max_terms=1), st.sampled_from([Fraction(1, 2), Fraction(2), Fraction(3)]))
def test_homogeneity(c, q):
    assert scl(c.scale(q), mode="exact").value == q * scl(c, mode="exact").value


@given(small_chains(max_terms=1, max_len=8), small_chains(max_terms=1, max_len=8))
def test_triangle_inequality(c1, c2):
    v = scl(c1 + c2, mode="exact").value
    assert v <= scl(c1, mode="exact").value + scl(c2, mode="exact").value


@given(st.integers(0, 10**6), st.sampled_from([4, 6]))
def test_square_doubles(seed, n):
    w = commutator_word(n, seed)
    w2 = Word(w.letters + w.letters) if w.letters[0] != w.letters[-1] ^ 1 else None
    if w2 is None:
        return
    assert scl(Chain.from_words([w2]), mode="exact").value == 2 * scl(Chain.from_words([w]), mode="exact").value


@given(st.integers(0, 10**6))
def test_positive_on_nonzero(seed):
    c = Chain.from_words([commutator_word(random.Random(seed).choice([4, 6, 8, 10]), seed)])
    if normalize_chain(c).is_zero():
        return
    assert scl(c, mode="exact").value > 0


@pytest.mark.parametrize("seed", range(4))
def test_random_feasible_points_glue(seed):
    """Vertices of the gluing polytope under random costs still give valid surfaces."""
    c = Chain.from_words([commutator_word(8, seed)])
    glp = build_lp(enumerate_pieces(normalize_chain(c), distinct_triangles_only=True))
    rng = random.Random(seed)
    costs = [Fraction(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(glp.program.n_cols)]
    sol = solve_exact(dataclasses.replace(glp.program, c=costs))
    assert glp.program.is_feasible_exact(sol.x)
    y = fatgraph_from_weights(glp, sol.x)
    rep = verify_fatgraph(y, normalize_chain(c))
    assert rep.ok, rep.failures
    assert y.scl_bound() >= scl(c, mode="exact").value
