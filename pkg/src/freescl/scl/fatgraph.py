"""Fatgraphs over F: construction from glued pieces, boundary reading, checks.

Half-edge ``h`` belongs to edge ``h >> 1``; even half-edges read the edge
label forwards, odd ones read its inverse.  Each vertex lists its half-edges
in counterclockwise order.  A boundary component is traced by reading the
label of ``h``, crossing to ``h ^ 1`` and continuing with the next half-edge
counterclockwise at that vertex.
"""
from __future__ import annotations

import json
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

from ..words import Chain, CyclicWord, Word, letter_to_char, normalize_chain


@dataclass
class Fatgraph:
    vertices: list[list[int]]
    labels: list[tuple[int, ...]]
    multiplicity: int = 1
    rank: int = 2
    chi: int | None = None

    FORMAT = "freescl-fatgraph/1"

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.labels)

    @property
    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges

    def valences(self) -> list[int]:
        return [len(v) for v in self.vertices]

    def label(self, h: int) -> tuple[int, ...]:
        lab = self.labels[h >> 1]
        if h & 1:
            return tuple(c ^ 1 for c in reversed(lab))
        return lab

    def edge_lengths(self) -> list[int]:
        return [len(lab) for lab in self.labels]

    @property
    def total_edge_length(self) -> int:
        return sum(self.edge_lengths())

    def boundary(self) -> list[tuple[int, ...]]:
        succ = {}
        for vs in self.vertices:
            for i, h in enumerate(vs):
                succ[h] = vs[(i + 1) % len(vs)]
        seen = set()
        comps = []
        for start in sorted(succ):
            if start in seen:
                continue
            word: list[int] = []
            h = start
            while h not in seen:
                seen.add(h)
                word.extend(self.label(h))
                h = succ[h ^ 1]
            comps.append(tuple(word))
        return comps

    def scl_bound(self) -> Fraction:
        return Fraction(-self.euler_characteristic, 2 * self.multiplicity)

    def to_json(self) -> dict:
        return {
            "format": self.FORMAT,
            "rank": self.rank,
            "multiplicity": self.multiplicity,
            "chi": self.euler_characteristic,
            "vertices": self.vertices,
            "edges": ["".join(letter_to_char(c) for c in lab) for lab in self.labels],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    @classmethod
    def from_json(cls, data: dict) -> "Fatgraph":
        labels = [Word.parse(s).letters for s in data["edges"]]
        return cls([list(v) for v in data["vertices"]], labels, data.get("multiplicity", 1),
                   data.get("rank", 2), data.get("chi"))


# ---------------------------------------------------------------- from pieces


def glue_pieces(pieces, square_counts: dict, triangle_counts: dict, multiplicity: int) -> Fatgraph:
    """Glue integral piece multiplicities into a fatgraph.

    Sides are paired in sorted order within each gap pair; any pairing gives
    the same Euler characteristic and a boundary covering the chain.
    """
    insts = []   # (kind, data)
    for s in sorted(square_counts):
        insts.extend([("S", s)] * int(square_counts[s]))
    n_sq = len(insts)
    for t in sorted(triangle_counts):
        insts.extend([("T", t)] * int(triangle_counts[t]))

    by_dir: dict[tuple[int, int], list[tuple[int, int]]] = defaultdict(list)
    for i, (kind, data) in enumerate(insts):
        sides = pieces.square_sides(data) if kind == "S" else pieces.triangle_sides(data)
        for k, gh in enumerate(sides):
            by_dir[gh].append((i, k))

    partner: dict[tuple[int, int], tuple[int, int]] = {}
    for (g, h), sides in by_dir.items():
        if g < h:
            other = by_dir.get((h, g), [])
            if len(other) != len(sides):
                raise ValueError(f"unbalanced gap pair ({g}, {h})")
            for a, b in zip(sorted(sides), sorted(other)):
                partner[a] = b
                partner[b] = a
        elif g == h:
            ss = sorted(sides)
            if len(ss) % 2:
                raise ValueError(f"odd number of sides on gap pair ({g}, {g})")
            for a, b in zip(ss[0::2], ss[1::2]):
                partner[a] = b
                partner[b] = a
        elif (h, g) not in by_dir:
            raise ValueError(f"unbalanced gap pair ({h}, {g})")

    letters = pieces.letters
    vertices: list[list[int]] = []
    halfedge_at: dict[tuple[int, int], int] = {}
    labels: list[tuple[int, ...]] = []
    used_sq = [False] * n_sq

    def walk(side):
        """Follow squares from ``side`` until a triangle side; return (label, end side)."""
        read: list[int] = []
        cur = side
        while cur[0] < n_sq:
            i, k = cur
            used_sq[i] = True
            p, q = insts[i][1]
            read.append(letters[q] if k == 0 else letters[p])
            cur = partner[(i, 1 - k)]
        return tuple(read), cur

    tri_ids = list(range(n_sq, len(insts)))
    vertex_of = {t: idx for idx, t in enumerate(tri_ids)}
    vertices = [[-1, -1, -1] for _ in tri_ids]
    for t in tri_ids:
        for k in range(3):
            if (t, k) in halfedge_at:
                continue
            lab, end = walk(partner[(t, k)])
            e = len(labels)
            labels.append(lab)
            halfedge_at[(t, k)] = 2 * e
            halfedge_at[end] = 2 * e + 1
            vertices[vertex_of[t]][k] = 2 * e
            vertices[vertex_of[end[0]]][end[1]] = 2 * e + 1
    for i in range(n_sq):
        if used_sq[i]:
            continue
        # closed strip of squares: an annulus, drawn as a loop at a bivalent vertex
        read: list[int] = []
        cur = (i, 0)
        while True:
            j, k = cur
            used_sq[j] = True
            p, q = insts[j][1]
            read.append(letters[q] if k == 0 else letters[p])
            cur = partner[(j, 1 - k)]
            if cur == (i, 0):
                break
        e = len(labels)
        labels.append(tuple(read))
        vertices.append([2 * e, 2 * e + 1])
    n_tri = len(tri_ids)
    chi = -n_tri // 2 if n_tri % 2 == 0 else None
    return Fatgraph(vertices, labels, multiplicity, pieces.chain.rank, chi)


def extract_fatgraph(result, c: Chain | None = None) -> Fatgraph:
    """Scale an exact LP solution to integers and glue it into a fatgraph."""
    glp = result.lp
    if glp is None:
        return Fatgraph([], [], 1, result.chain.rank, 0)
    if result.mode != "exact":
        raise ValueError("fatgraph extraction needs an exact solution")
    return fatgraph_from_weights(glp, result.primal)


def fatgraph_from_weights(glp, x) -> Fatgraph:
    sq_w, tri_w = glp.split([Fraction(v) for v in x])
    den = 1
    for v in sq_w + tri_w:
        den = den * v.denominator // math.gcd(den, v.denominator)
    # coverage N*coefficient must be integral as well
    for w in glp.pieces.weights:
        den = den * w.denominator // math.gcd(den, w.denominator)
    sq = {s: int(v * den) for s, v in zip(glp.pieces.squares, sq_w) if v}
    tri = {t: int(v * den) for t, v in zip(glp.triangles, tri_w) if v}
    loops = Counter()
    for t, k in tri.items():
        for g, h in glp.pieces.triangle_sides(t):
            if g == h:
                loops[g] += k
    if any(v % 2 for v in loops.values()):
        den *= 2
        sq = {s: 2 * v for s, v in sq.items()}
        tri = {t: 2 * v for t, v in tri.items()}
    return glue_pieces(glp.pieces, sq, tri, den)


# ---------------------------------------------------------------- checks


@dataclass
class VerificationReport:
    checks: dict[str, bool] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def fail(self, name: str, message: str):
        self.checks[name] = False
        self.failures.append(f"{name}: {message}")


def boundary_multiset(components) -> tuple[Counter, int]:
    """Primitive cyclic words with multiplicities; empty components counted apart."""
    out: Counter = Counter()
    empty = 0
    for comp in components:
        if not comp:
            empty += 1
            continue
        root, power = CyclicWord(comp).root()
        out[root] += power
    return out, empty


def verify_fatgraph(y: Fatgraph, c: Chain) -> VerificationReport:
    rep = VerificationReport()
    c = normalize_chain(c)
    N = y.multiplicity

    comps = y.boundary()
    reduced = True
    for comp in comps:
        n = len(comp)
        if n > 1 and any(comp[i] == comp[(i + 1) % n] ^ 1 for i in range(n)):
            reduced = False
    rep.checks["boundary_reduced"] = reduced
    if not reduced:
        rep.failures.append("boundary_reduced: a boundary component is not cyclically reduced")

    observed, empty = boundary_multiset(comps)
    expected: Counter = Counter()
    integral = True
    for t, w in c.terms:
        v = t * N
        if v.denominator != 1:
            integral = False
        expected[w] += int(v)
    rep.checks["boundary"] = integral and observed == expected
    if not rep.checks["boundary"]:
        rep.failures.append(
            "boundary: observed "
            + ", ".join(f"{k}x{w}" for w, k in sorted(observed.items(), key=lambda kv: kv[0].letters))
            + " expected "
            + ", ".join(f"{k}x{w}" for w, k in sorted(expected.items(), key=lambda kv: kv[0].letters)))
    rep.stats["empty_boundary_components"] = empty

    chi = y.euler_characteristic
    rep.checks["euler"] = y.chi is None or y.chi == chi
    if not rep.checks["euler"]:
        rep.failures.append(f"euler: recorded {y.chi}, V - E = {chi}")

    V, E = y.n_vertices, y.n_edges
    trivalent = V > 0 and all(v == 3 for v in y.valences())
    if trivalent:
        ok = 2 * E == 3 * V and 3 * (-chi) == E
        rep.checks["trivalent_accounting"] = ok
        if not ok:
            rep.failures.append(f"trivalent_accounting: V={V}, E={E}, chi={chi}")

    total_boundary = sum(len(comp) for comp in comps)
    ok = total_boundary == 2 * y.total_edge_length
    rep.checks["length"] = ok
    if not ok:
        rep.failures.append(f"length: boundary {total_boundary} vs 2 x edges {y.total_edge_length}")

    half_edges = sorted(h for vs in y.vertices for h in vs)
    ok = half_edges == list(range(2 * E))
    rep.checks["half_edges"] = ok
    if not ok:
        rep.failures.append("half_edges: every half-edge must sit at exactly one vertex")

    rep.stats.update({
        "V": V, "E": E, "chi": chi, "N": N,
        "scl_bound": Fraction(-chi, 2 * N) if N else None,
        "trivalent": trivalent,
    })
    if E:
        avg = Fraction(y.total_edge_length, E)
        rep.stats["average_edge_length"] = avg
        resolved = E + sum(v - 3 for v in y.valences())
        if resolved > 0:
            rep.stats["average_edge_length_alt"] = Fraction(y.total_edge_length, resolved)
        if len(c.terms) == 1 and avg > 0:
            n = len(c.terms[0][1])
            k = c.rank
            m = math.log(n) / math.log(2 * k - 1) if n > 1 else float("nan")
            ell = float(avg) / m if m == m and m > 0 else float("nan")
            rep.stats["ell"] = ell
            # n log(2k-1) / (12 ell log n) == n / (12 * average length)
            rep.stats["length_formula"] = n / (12 * float(avg))
    return rep
