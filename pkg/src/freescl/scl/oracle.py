"""Brute-force scl for tiny chains, independent of the LP solver.

Searches integer gluings directly: for each multiplicity N, every way of
covering the positions N times with squares, then the fewest triangles
that balance the remaining interfaces.  Only used to cross-check the LP.
"""
from __future__ import annotations

from fractions import Fraction

from ..words import Chain, normalize_chain
from .pieces import enumerate_pieces


class NoWitness(Exception):
    """No gluing found within the piece budget."""


ORACLE_MAX_LENGTH = 12


def _square_configs(pieces, demand: list[int]):
    """Yield square multiplicity dicts covering every position exactly ``demand`` times."""
    n = len(demand)
    partners = [[q for q in range(n) if pieces.letters[q] == pieces.letters[p] ^ 1] for p in range(n)]
    chosen: dict[tuple[int, int], int] = {}

    def rec():
        p = next((i for i in range(n) if demand[i]), None)
        if p is None:
            yield dict(chosen)
            return
        opts = [q for q in partners[p] if q > p and demand[q]]
        yield from split(p, opts, 0)

    def split(p, opts, i):
        if demand[p] == 0:
            yield from rec()
            return
        if i == len(opts):
            return
        q = opts[i]
        top = min(demand[p], demand[q])
        for k in range(top, -1, -1):
            if k:
                demand[p] -= k
                demand[q] -= k
                chosen[(p, q)] = k
            yield from split(p, opts, i + 1)
            if k:
                demand[p] += k
                demand[q] += k
                del chosen[(p, q)]

    yield from rec()


def _min_triangles(n: int, imbalance: dict[tuple[int, int], int], budget: int) -> int | None:
    """Fewest triangles (distinct gaps) cancelling ``imbalance``; None above budget.

    ``imbalance[(g, h)]`` with g < h is the net count of sides directed g -> h
    minus h -> g.  A side (g, h) is matched by a triangle side (h, g).
    """
    d = {k: v for k, v in imbalance.items() if v}
    best = [None]

    def rec(t):
        if best[0] is not None and t >= best[0]:
            return
        if not d:
            best[0] = t
            return
        total = sum(abs(v) for v in d.values())
        if t + -(-total // 3) > budget or (best[0] is not None and t + -(-total // 3) >= best[0]):
            return
        (g, h), v = min(d.items())
        # need a triangle side h -> g when v > 0, g -> h when v < 0
        a, b = (h, g) if v > 0 else (g, h)
        for c in range(n):
            if c == a or c == b:
                continue
            for x, y in ((a, b), (b, c), (c, a)):
                key, s = ((x, y), 1) if x < y else ((y, x), -1)
                d[key] = d.get(key, 0) + s
                if d[key] == 0:
                    del d[key]
            rec(t + 1)
            for x, y in ((a, b), (b, c), (c, a)):
                key, s = ((x, y), 1) if x < y else ((y, x), -1)
                d[key] = d.get(key, 0) - s
                if d[key] == 0:
                    del d[key]

    rec(0)
    return best[0]


def scl_oracle_small(c: Chain, piece_budget: int = 6) -> Fraction:
    """Best -chi/2N over gluings with N <= budget and at most ``budget`` triangles."""
    c = normalize_chain(c)
    if c.is_zero():
        return Fraction(0)
    if c.total_length > ORACLE_MAX_LENGTH:
        raise ValueError(f"oracle limited to total length {ORACLE_MAX_LENGTH}")
    pieces = enumerate_pieces(c, distinct_triangles_only=True)
    n = pieces.n_positions
    best: Fraction | None = None
    for N in range(1, piece_budget + 1):
        demand = [w * N for w in pieces.weights]
        if any(v.denominator != 1 for v in demand):
            continue
        for sq in _square_configs(pieces, [int(v) for v in demand]):
            imb: dict[tuple[int, int], int] = {}
            for s, k in sq.items():
                for g, h in pieces.square_sides(s):
                    if g == h:
                        continue
                    key, sign = ((g, h), 1) if g < h else ((h, g), -1)
                    imb[key] = imb.get(key, 0) + sign * k
            cap = piece_budget
            if best is not None:
                # only strictly better values matter: T < 4 N best
                cap = min(cap, int(4 * N * best - Fraction(1, 10**9)) if 4 * N * best > 0 else -1)
                if cap < 0:
                    continue
            t = _min_triangles(n, imb, cap)
            if t is None:
                continue
            val = Fraction(t, 4 * N)
            if best is None or val < best:
                best = val
    if best is None:
        raise NoWitness(f"no gluing with at most {piece_budget} pieces")
    return best
