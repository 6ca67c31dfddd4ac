"""Squares, triangles and gaps for a normalized chain.

Positions are numbered globally across the words of the chain.  The gap
``g`` is the slot after position ``g`` (between ``g`` and ``next(g)``), so gaps
and positions share indices.

A square ``{p, q}`` pairs a letter with an inverse letter.  Walking
counterclockwise around it we meet letter ``p``, the side
``(p, prev q)``, letter ``q`` and the side ``(q, prev p)``.  A triangle
``(g1, g2, g3)`` has sides ``(g1, g2), (g2, g3), (g3, g1)``.  Two sides glue
when one is ``(g, h)`` and the other ``(h, g)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..words import Chain, normalize_chain


class NotABoundaryError(ValueError):
    """The chain does not vanish in rational homology."""


@dataclass(frozen=True)
class PieceSystem:
    chain: Chain
    letters: tuple[int, ...]          # letter code at each position
    word_of: tuple[int, ...]          # term index of each position
    nxt: tuple[int, ...]
    prv: tuple[int, ...]
    weights: tuple[Fraction, ...]     # chain coefficient of the word at each position
    squares: tuple[tuple[int, int], ...]
    triangles: tuple[tuple[int, int, int], ...]

    @property
    def n_positions(self) -> int:
        return len(self.letters)

    @property
    def n_gaps(self) -> int:
        return len(self.letters)

    def square_sides(self, s: tuple[int, int]) -> tuple[tuple[int, int], tuple[int, int]]:
        p, q = s
        return (p, self.prv[q]), (q, self.prv[p])

    @staticmethod
    def triangle_sides(t: tuple[int, int, int]) -> tuple[tuple[int, int], ...]:
        a, b, c = t
        return (a, b), (b, c), (c, a)

    def counts(self) -> dict[str, int]:
        return {
            "positions": self.n_positions,
            "gaps": self.n_gaps,
            "squares": len(self.squares),
            "triangles": len(self.triangles),
        }


def _canonical_triples(n: int):
    """All triples up to cyclic rotation, each in its least rotation."""
    for a in range(n):
        for b in range(a, n):
            for c in range(a, n):
                # (a, b, c) is least among its rotations
                if (b, c, a) < (a, b, c) or (c, a, b) < (a, b, c):
                    continue
                yield (a, b, c)


def positions_of(c: Chain):
    letters, word_of, nxt, prv, weights = [], [], [], [], []
    for j, (t, w) in enumerate(c.terms):
        base = len(letters)
        L = len(w)
        for i, code in enumerate(w.letters):
            letters.append(code)
            word_of.append(j)
            nxt.append(base + (i + 1) % L)
            prv.append(base + (i - 1) % L)
            weights.append(t)
    return tuple(letters), tuple(word_of), tuple(nxt), tuple(prv), tuple(weights)


def enumerate_pieces(c: Chain, distinct_triangles_only: bool = False) -> PieceSystem:
    """Finite piece alphabet of the chain.

    With ``distinct_triangles_only`` triangles touching a gap twice are left
    out; their net contribution to every balance equation is zero, so they
    never help an optimum.
    """
    c = normalize_chain(c)
    if not c.homologically_trivial:
        raise NotABoundaryError(f"chain {c} is not null-homologous")
    letters, word_of, nxt, prv, weights = positions_of(c)
    n = len(letters)
    squares = tuple(
        (p, q) for p in range(n) for q in range(p + 1, n) if letters[p] == letters[q] ^ 1
    )
    if distinct_triangles_only:
        triangles = tuple(t for t in _canonical_triples(n) if len(set(t)) == 3)
    else:
        triangles = tuple(_canonical_triples(n))
    return PieceSystem(c, letters, word_of, nxt, prv, weights, squares, triangles)
