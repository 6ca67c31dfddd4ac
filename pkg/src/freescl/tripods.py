"""Tripods, joints and an integral tripod-gluing upper bound for scl.

Conventions on a cyclic word v of length n (indices mod n, gap g sits after
letter g):

* a tripod copy is a triple of starts (s, u, t) of the segments xY, yZ, zX,
  each of length 2L; its centre is the triangle on the junction gaps
  (s+L-1, u+L-1, t+L-1).
* an arm joint is a pair (p, q): a copy of x at p and a copy of X at q.  The
  arm of the tripod (s, u, t) along x is (s, t+L); along y it is (u, s+L);
  along z it is (t, u+L).  Arms cannot be lengthened towards the centre, so
  each maximal joint contains exactly one arm joint at each of its two ends.
"""
from __future__ import annotations

import heapq
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .scl.fatgraph import Fatgraph, glue_pieces, verify_fatgraph
from .scl.pieces import PieceSystem, positions_of
from .words import Chain, CyclicWord, Word, exponent_sums, letter_to_char, normalize_chain


class RangeError(ValueError):
    pass


class AssemblyFailure(RuntimeError):
    """No integral assembly within the budget."""


def abstract_tripod_count(k: int, L: int) -> int:
    """Number of tripods of edge length L: (2k)(2k-1)(2k-2)(2k-1)^(3(L-1)) / 3."""
    return (2 * k) * (2 * k - 1) * (2 * k - 2) * (2 * k - 1) ** (3 * (L - 1)) // 3


def default_edge_length(n: int, k: int = 2, epsilon: float = 0.1) -> int:
    m = math.log(n) / math.log(2 * k - 1)
    return max(1, math.floor((0.5 - epsilon) * m))


def _codes(v) -> tuple[int, ...]:
    if isinstance(v, CyclicWord):
        return v.letters
    if isinstance(v, Word):
        return v.letters
    if isinstance(v, str):
        return CyclicWord(v).letters
    return tuple(v)


def _seg(codes, start, L):
    n = len(codes)
    return tuple(codes[(start + i) % n] for i in range(L))


def _inv(w):
    return tuple(c ^ 1 for c in reversed(w))


@dataclass(frozen=True)
class TripodCopy:
    x: tuple[int, ...]
    y: tuple[int, ...]
    z: tuple[int, ...]
    starts: tuple[int, int, int]     # starts of xY, yZ, zX
    L: int

    def intervals(self, n: int) -> list[tuple[int, int]]:
        return [(s, (s + 2 * self.L) % n) for s in self.starts]

    def centre(self, n: int) -> tuple[int, int, int]:
        s, u, t = self.starts
        L = self.L
        return ((s + L - 1) % n, (u + L - 1) % n, (t + L - 1) % n)

    def arms(self, n: int) -> list[tuple[int, int]]:
        s, u, t = self.starts
        L = self.L
        return [(s, (t + L) % n), (u, (s + L) % n), (t, (u + L) % n)]

    def labels(self) -> tuple[str, str, str]:
        f = lambda w: "".join(letter_to_char(c) for c in w)
        return f(self.x), f(self.y), f(self.z)


@dataclass(frozen=True)
class JointCopy:
    x: tuple[int, ...]
    first: int          # start of the copy of x
    second: int         # start of the copy of X
    L: int
    extension: int = 0  # extra letters in the maximal joint beyond L

    def swap(self) -> "JointCopy":
        return JointCopy(_inv(self.x), self.second, self.first, self.L, self.extension)


@dataclass
class TripodSet:
    copies: list[TripodCopy]
    abstract_count: int
    L: int
    n: int


def enumerate_tripods(v, L: int, k: int | None = None) -> TripodSet:
    """All copies of tripods of edge length L in the cyclic word v."""
    codes = _codes(v)
    n = len(codes)
    if k is None:
        k = max(2, max(codes) // 2 + 1) if codes else 2
    if L < 1 or 2 * L > n:
        raise RangeError(f"edge length {L} outside [1, {n // 2}]")
    by_first: dict[tuple, list[int]] = defaultdict(list)
    for s in range(n):
        by_first[_seg(codes, s, L)].append(s)
    copies = []
    for s in range(n):
        x = _seg(codes, s, L)
        y = _inv(_seg(codes, s + L, L))
        if x[-1] == y[-1]:
            continue
        for u in by_first.get(y, ()):
            z = _inv(_seg(codes, u + L, L))
            if z[-1] in (x[-1], y[-1]):
                continue
            for t in by_first.get(z, ()):
                if _seg(codes, t + L, L) != _inv(x):
                    continue
                # keep one rotation of (s, u, t) per copy
                if (u, t, s) < (s, u, t) or (t, s, u) < (s, u, t):
                    continue
                copies.append(TripodCopy(x, y, z, (s, u, t), L))
    return TripodSet(copies, abstract_tripod_count(k, L), L, n)


def brute_force_tripod_copies(v, L: int) -> int:
    """Reference count by scanning every triple of segment starts."""
    codes = _codes(v)
    n = len(codes)
    count = 0
    for s in range(n):
        for u in range(n):
            for t in range(n):
                if not (s, u, t) <= min((u, t, s), (t, s, u)):
                    continue
                x = _seg(codes, s, L)
                y = _seg(codes, u, L)
                z = _seg(codes, t, L)
                if len({x[-1], y[-1], z[-1]}) < 3:
                    continue
                if (_seg(codes, s + L, L) == _inv(y) and _seg(codes, u + L, L) == _inv(z)
                        and _seg(codes, t + L, L) == _inv(x)):
                    count += 1
    return count


def joint_extension(codes, p: int, q: int, L: int) -> int:
    """How far the joint (x at p, X at q) extends outward: x leftward, X rightward."""
    n = len(codes)
    e = 0
    while e + L < n // 2 and codes[(p - 1 - e) % n] == codes[(q + L + e) % n] ^ 1:
        e += 1
    return e


def partner_arm(codes, arm: tuple[int, int], L: int) -> tuple[int, int]:
    """Arm joint at the other end of the maximal joint through ``arm``."""
    n = len(codes)
    p, q = arm
    e = joint_extension(codes, p, q, L)
    return ((q + e) % n, (p - e) % n)


def joint_of(codes, arm: tuple[int, int], L: int) -> JointCopy:
    p, q = arm
    return JointCopy(_seg(codes, p, L), p, q, L, joint_extension(codes, p, q, L))


# ---------------------------------------------------------------- imbalance


@dataclass
class ImbalanceReport:
    imbalance: int        # |d mu - iota d mu|, summed over oriented maximal joints
    mass: int             # |mu|, number of tripod copies
    boundary_mass: int    # |d mu| = 3 |mu|
    empty: bool = False
    L: int = 0

    @property
    def ratio(self) -> float:
        return self.imbalance / self.mass if self.mass else 0.0

    @property
    def relative(self) -> float:
        """Total variation distance between d mu and iota d mu, normalized to probability."""
        return self.imbalance / (2 * self.boundary_mass) if self.boundary_mass else 0.0


def _imbalance_from_copies(codes, ts: TripodSet) -> ImbalanceReport:
    L = ts.L
    load: Counter = Counter()
    for c in ts.copies:
        for arm in c.arms(len(codes)):
            load[arm] += 1
    imb = 0
    for arm, c in load.items():
        imb += abs(c - load.get(partner_arm(codes, arm, L), 0))
    for arm, c in list(load.items()):
        other = partner_arm(codes, arm, L)
        if other not in load:
            imb += c
    mass = len(ts.copies)
    return ImbalanceReport(imb, mass, 3 * mass, mass == 0, L)


def imbalance_statistic(v, L: int, k: int | None = None, method: str = "auto") -> ImbalanceReport:
    """Imbalance of the boundary of the uniform measure on tripod copies.

    ``method="count"`` never lists tripods: the number of tripods on an arm
    joint (x at p, X at q) is the number of copies of yZ in v, with y and z
    read off next to the two copies.
    """
    codes = _codes(v)
    n = len(codes)
    if k is None:
        k = max(2, max(codes) // 2 + 1) if codes else 2
    if L < 1 or 2 * L > n:
        raise RangeError(f"edge length {L} outside [1, {n // 2}]")
    if method == "auto":
        method = "count" if n > 200 else "enumerate"
    if method == "enumerate":
        return _imbalance_from_copies(codes, enumerate_tripods(codes, L, k))
    return _imbalance_by_counting(np.asarray(codes, dtype=np.int64), L, 2 * k)


def _block_codes(arr: np.ndarray, L: int, base: int) -> np.ndarray:
    """Integer code of the cyclic subword of length L starting at each position."""
    n = arr.size
    out = np.zeros(n, dtype=np.int64)
    for i in range(L):
        out = out * base + np.roll(arr, -i)
    return out


def _imbalance_by_counting(arr: np.ndarray, L: int, base: int) -> ImbalanceReport:
    n = arr.size
    inv_arr = arr ^ 1
    fwd = _block_codes(arr, L, base)                     # code of v[p:p+L]
    inv_block = _block_codes(inv_arr[::-1], L, base)     # code of inverse of each block, reversed indexing
    # inverse of v[p:p+L] is the block of reversed inverted word starting at n-p-L
    inv_of = inv_block[(n - np.arange(n) - L) % n]
    two = _block_codes(arr, 2 * L, base)
    counts = np.bincount(two, minlength=base ** (2 * L))
    shift = base ** L

    order = np.argsort(fwd, kind="stable")
    sorted_codes = fwd[order]
    arms_p, arms_q = [], []
    for code in np.unique(fwd):
        ps = order[np.searchsorted(sorted_codes, code, "left"):np.searchsorted(sorted_codes, code, "right")]
        target = inv_of[ps[0]]
        lo, hi = np.searchsorted(sorted_codes, target, "left"), np.searchsorted(sorted_codes, target, "right")
        if lo == hi:
            continue
        qs = order[lo:hi]
        P, Q = np.meshgrid(ps, qs, indexing="ij")
        arms_p.append(P.ravel())
        arms_q.append(Q.ravel())
    if not arms_p:
        return ImbalanceReport(0, 0, 0, True, L)
    p = np.concatenate(arms_p)
    q = np.concatenate(arms_q)
    # arm joints only: not extendable towards the centre
    keep = arr[(p + L) % n] != (arr[(q - 1) % n] ^ 1)
    p, q = p[keep], q[keep]
    # tripods on arm (p, q): copies of yZ, where yZ = (z Y)^-1, z = v[q-L:q], Y = v[p+L:p+2L]
    zY_inv = inv_of[(p + L) % n] * shift + inv_of[(q - L) % n]
    load = counts[zY_inv]
    # partner arm across the maximal joint
    e = np.zeros_like(p)
    active = np.ones(p.size, dtype=bool)
    while active.any():
        ok = active & (e + L < n // 2) & (arr[(p - 1 - e) % n] == (arr[(q + L + e) % n] ^ 1))
        e = e + ok
        active = ok
    pp, qq = (q + e) % n, (p - e) % n
    key = p * n + q
    pkey = pp * n + qq
    srt = np.argsort(key)
    pos = np.minimum(np.searchsorted(key[srt], pkey), key.size - 1)
    hit = key[srt][pos] == pkey
    other = np.where(hit, load[srt][pos], 0)
    imb = int(np.abs(load - other).sum())
    total = int(load.sum())
    mass = total // 3
    return ImbalanceReport(imb, mass, total, total == 0, L)


# ---------------------------------------------------------------- assembly


@dataclass
class Assembly:
    fatgraph: Fatgraph
    upper_bound: Fraction
    tripods: int
    matched_joints: int
    multiplicity: int
    filler_squares: int
    polygon_triangles: int
    report: object = None


def _single_word_pieces(codes) -> PieceSystem:
    c = Chain.from_words([Word(codes)], rank=max(2, max(codes) // 2 + 1))
    c = normalize_chain(c)
    letters, word_of, nxt, prv, weights = positions_of(c)
    return PieceSystem(c, letters, word_of, nxt, prv, weights, (), ())


def _close_polygons(pieces: PieceSystem, squares: Counter, triangles: Counter) -> int:
    """Add fan-triangulated polygons cancelling the net side imbalance; returns triangles added."""
    net: Counter = Counter()
    for s, k in squares.items():
        for g, h in pieces.square_sides(s):
            net[(g, h)] += k
            net[(h, g)] -= k
    for t, k in triangles.items():
        for g, h in pieces.triangle_sides(t):
            net[(g, h)] += k
            net[(h, g)] -= k
    # directed edges still lacking a partner: g -> h with multiplicity net > 0
    out: dict[int, list[int]] = defaultdict(list)
    for (g, h), k in sorted(net.items()):
        if k > 0:
            out[g].extend([h] * k)
    for g in out:
        out[g].reverse()
    # the needed edges form an Eulerian multigraph; split it into simple cycles
    added = 0
    for start in sorted(out):
        while out[start]:
            path = [start]
            index = {start: 0}
            while True:
                h = out[path[-1]].pop()
                if h not in index:
                    index[h] = len(path)
                    path.append(h)
                    continue
                i = index[h]
                added += _fan(path[i:], triangles)
                for w in path[i + 1:]:
                    del index[w]
                del path[i + 1:]
                if len(path) == 1:
                    break
    return added


def _fan(cycle: list[int], triangles: Counter) -> int:
    """Polygon glued to the needed sides g1->g2->...->gd->g1, split into d-2 triangles."""
    d = len(cycle)
    if d < 3:
        raise AssemblyFailure(f"degenerate polygon of {d} sides")
    a = [cycle[0]] + cycle[:0:-1]          # reversed orientation
    for i in range(1, d - 1):
        tri = (a[0], a[i], a[i + 1])
        r = min(range(3), key=lambda j: tri[j:] + tri[:j])
        triangles[tri[r:] + tri[:r]] += 1
    return d - 2


def _strip_run(codes, deficit, p: int, q: int) -> int:
    """Length of the longest strip pairing p, p-1, ... with q, q+1, ... inside the deficits."""
    n = len(codes)
    used: Counter = Counter()
    j = 0
    while j < n:
        a, b = (p - j) % n, (q + j) % n
        if codes[a] != codes[b] ^ 1 or used[a] >= deficit[a] or used[b] >= deficit[b]:
            break
        used[a] += 1
        used[b] += 1
        j += 1
    return j


def _filler_squares(codes, deficit: list[int]) -> Counter:
    """Pair letters with inverse letters to fill the coverage deficit, in long strips.

    A strip pairs p, p-1, p-2, ... with q, q+1, q+2, ...; consecutive squares
    of a strip glue to each other, so only the two ends stay open.  Strips
    are chosen greedily, longest first.
    """
    n = len(codes)
    deficit = list(deficit)
    out: Counter = Counter()
    by_letter: dict[int, list[int]] = defaultdict(list)
    for q in range(n):
        if deficit[q]:
            by_letter[codes[q]].append(q)
    # runs only shrink as deficits are used up, so stale heap entries are re-scored lazily
    heap = []
    for p in range(n):
        if deficit[p]:
            for q in by_letter[codes[p] ^ 1]:
                heap.append((-_strip_run(codes, deficit, p, q), p, q))
    heapq.heapify(heap)
    while heap:
        neg, p, q = heapq.heappop(heap)
        j = _strip_run(codes, deficit, p, q)
        if not j:
            continue
        if j < -neg:
            heapq.heappush(heap, (-j, p, q))
            continue
        for i in range(j):
            a, b = (p - i) % n, (q + i) % n
            out[(min(a, b), max(a, b))] += 1
            deficit[a] -= 1
            deficit[b] -= 1
        heapq.heappush(heap, (-j, p, q))
    if any(deficit):
        raise AssemblyFailure("letter deficits do not balance")
    return out


def assemble_upper_bound(v, L: int | None = None, rounding_budget: int = 200_000,
                         epsilon: float = 0.1) -> Assembly:
    """Glue tripods along maximal joints, fill the rest, and read off -chi / 2N."""
    codes = _codes(v)
    n = len(codes)
    if not Word(codes).is_cyclically_reduced():
        raise ValueError("word must be cyclically reduced")
    k = max(2, max(codes) // 2 + 1)
    if any(exponent_sums(codes, k)):
        raise ValueError("word is not in the commutator subgroup")
    codes = CyclicWord(codes).letters
    if L is None:
        L = default_edge_length(n, k, epsilon)
    ts = enumerate_tripods(codes, L, k)
    if len(ts.copies) > rounding_budget:
        raise AssemblyFailure(f"{len(ts.copies)} tripod copies exceed the budget {rounding_budget}")
    pieces = _single_word_pieces(codes)
    squares: Counter = Counter()
    triangles: Counter = Counter()

    # tripods and their arm loads
    load: Counter = Counter()
    for c in ts.copies:
        tri = c.centre(n)
        r = min(range(3), key=lambda j: tri[j:] + tri[:j])
        triangles[tri[r:] + tri[:r]] += 1
        for arm in c.arms(n):
            load[arm] += 1

    # glue tripods in pairs along maximal joints: one strip of squares per pair
    matched = 0
    done = set()
    for arm in sorted(load):
        if arm in done:
            continue
        other = partner_arm(codes, arm, L)
        done.add(arm)
        done.add(other)
        pairs = min(load[arm], load.get(other, 0))
        if not pairs:
            continue
        p, q = arm
        e = joint_extension(codes, p, q, L)
        for j in range(L + e):
            a, b = (p + L - 1 - j) % n, (q + j) % n
            squares[(min(a, b), max(a, b))] += pairs
        matched += pairs

    # fill coverage up to N' with letter/inverse squares
    cover = [0] * n
    for (a, b), kk in squares.items():
        cover[a] += kk
        cover[b] += kk
    N = max(max(cover), 1)
    fill = _filler_squares(codes, [N - x for x in cover])
    squares.update(fill)
    filler = sum(fill.values())

    added = _close_polygons(pieces, squares, triangles)
    fg = glue_pieces(pieces, dict(squares), dict(triangles), N)
    rep = verify_fatgraph(fg, pieces.chain)
    if not rep.ok:
        raise AssemblyFailure("assembled fatgraph failed verification: " + "; ".join(rep.failures))
    return Assembly(fg, fg.scl_bound(), len(ts.copies), matched, N, filler, added, rep)
