"""Counting quasimorphisms and Bavard-duality lower bounds for scl.

``c_S(w)`` is the largest number of pairwise disjoint copies of words of S
in w, and ``h_S = c_S - c_{S^-1}``.  On a cyclic word the homogenization is
the packing density of S in the periodic word w w w ...; taking copies with
the earliest right end first is optimal for disjoint packing, so the density
is read off the cycle of that greedy map on positions mod |w|.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .sampling import make_rng
from .words import CyclicWord, Word, exponent_sums, letter_to_char, reduce

DEFECT_BOUND = 6          # defect of any homogenized small counting quasimorphism
CERTIFICATE_FORMAT = "freescl-certificate/1"


class InvalidSetError(ValueError):
    """Counting set containing the empty word or an unreduced word."""


class DegenerateError(ValueError):
    """Word too short for the requested certificate."""


def _inv(sigma: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(c ^ 1 for c in reversed(sigma))


def _codes(w) -> tuple[int, ...]:
    if isinstance(w, (Word, CyclicWord)):
        return w.letters
    if isinstance(w, str):
        return Word.parse(w).letters
    return tuple(w)


def _to_str(codes) -> str:
    return "".join(letter_to_char(c) for c in codes)


@dataclass(frozen=True)
class CountingSet:
    words: frozenset

    def __post_init__(self):
        for w in self.words:
            if len(w) == 0:
                raise InvalidSetError("the empty word cannot be counted")
            if any(w[i] == w[i + 1] ^ 1 for i in range(len(w) - 1)):
                raise InvalidSetError(f"{_to_str(w)} is not reduced")

    @classmethod
    def of(cls, words: Iterable) -> "CountingSet":
        return cls(frozenset(_codes(w) for w in words))

    def inverse(self) -> "CountingSet":
        return CountingSet(frozenset(_inv(w) for w in self.words))

    def by_length(self) -> dict[int, set]:
        out: dict[int, set] = {}
        for w in self.words:
            out.setdefault(len(w), set()).add(w)
        return out

    def __len__(self):
        return len(self.words)

    def strings(self) -> list[str]:
        return sorted(_to_str(w) for w in self.words)


def _packing(S: CountingSet, codes: tuple[int, ...]) -> int:
    """Maximal number of disjoint copies of elements of S in the linear word."""
    groups = S.by_length()
    n = len(codes)
    best = [0] * (n + 1)
    for i in range(1, n + 1):
        b = best[i - 1]
        for L, words in groups.items():
            if L <= i and best[i - L] + 1 > b and codes[i - L:i] in words:
                b = best[i - L] + 1
        best[i] = b
    return best[n]


def small_count(S: CountingSet, w) -> tuple[int, int]:
    """(c_S(w), h_S(w)) for a reduced word w."""
    codes = _codes(w)
    c = _packing(S, codes)
    return c, c - _packing(S.inverse(), codes)


def h_small(S: CountingSet, w) -> int:
    return small_count(S, w)[1]


def packing_density(S: CountingSet, w) -> Fraction:
    """lim c_S(w^N) / N for a cyclically reduced word w."""
    codes = _codes(w)
    n = len(codes)
    if n == 0 or not S.words:
        return Fraction(0)
    longest = max(len(s) for s in S.words)
    reps = -(-(2 * n + longest) // n) + 1
    ext = codes * reps
    # shortest word of S starting at each position of the periodic word
    trie: dict = {}
    for s in S.words:
        node = trie
        for c in s:
            node = node.setdefault(c, {})
        node[None] = True
    shortest = [0] * n
    for i in range(n):
        node = trie
        j = i
        while True:
            node = node.get(ext[j])
            if node is None:
                break
            j += 1
            if None in node:
                shortest[i] = j - i
                break
    if not any(shortest):
        return Fraction(0)
    # earliest end of a copy starting at or after p, for p in [0, 2n)
    INF = 1 << 60
    end = [INF] * (2 * n + 1)
    for p in range(2 * n - 1, -1, -1):
        L = shortest[p % n]
        e = p + L if L else INF
        end[p] = min(e, end[p + 1])
    # greedy orbit from position 0; state = pointer mod n
    seen: dict[int, tuple[int, int]] = {}
    pos, copies = 0, 0
    while True:
        r = pos % n
        if r in seen:
            pos0, copies0 = seen[r]
            return Fraction((copies - copies0) * n, pos - pos0)
        seen[r] = (pos, copies)
        pos = pos - r + end[r]
        copies += 1


def homogenized_qm(S: CountingSet, w) -> Fraction:
    """h-bar_S on the cyclic word w, exactly."""
    codes = _codes(w)
    if codes and not Word(codes).is_cyclically_reduced():
        raise ValueError("homogenization is evaluated on cyclically reduced words")
    return packing_density(S, codes) - packing_density(S.inverse(), codes)


def big_count(sigmas: Iterable, w) -> int:
    """H_S(w): overlapping copies of S in w minus copies in w^-1 (a statistic only)."""
    codes = _codes(w)
    total = 0
    for s in {_codes(x) for x in sigmas}:
        L = len(s)
        inv = _inv(s)
        for i in range(len(codes) - L + 1):
            seg = codes[i:i + L]
            total += (seg == s) - (seg == inv)
    return total


# ---------------------------------------------------------------- defect


@dataclass
class DefectProbe:
    max_defect: int
    trials: int
    witness: tuple[str, str] | None = None


def _random_word(rng: np.random.Generator, k: int, max_len: int) -> tuple[int, ...]:
    n = int(rng.integers(0, max_len + 1))
    if n == 0:
        return ()
    first = int(rng.integers(0, 2 * k))
    steps = rng.integers(0, 2 * k - 1, size=n - 1).tolist()
    out = [first]
    for r in steps:
        out.append(r + (r >= (out[-1] ^ 1)))
    return tuple(out)


def defect_probe(S: CountingSet, trials: int = 10_000, max_len: int = 40, seed: int = 0,
                 rank: int = 2) -> DefectProbe:
    """Largest |h_S(gh) - h_S(g) - h_S(h)| over random pairs of reduced words."""
    rng = make_rng(seed)
    Sinv = S.inverse()

    def h(codes):
        return _packing(S, codes) - _packing(Sinv, codes)

    best, witness = 0, None
    for _ in range(trials):
        g = _random_word(rng, rank, max_len)
        k = _random_word(rng, rank, max_len)
        gk = reduce(g + k).letters
        d = abs(h(gk) - h(g) - h(k))
        if d > best:
            best, witness = d, (_to_str(g), _to_str(k))
    return DefectProbe(best, trials, witness)


# ---------------------------------------------------------------- certificates


def _cyclic_subwords(codes: tuple[int, ...], L: int) -> set:
    n = len(codes)
    ext = codes * (-(-(L + n) // n))
    return {ext[i:i + L] for i in range(n)}


@dataclass
class Certificate:
    word: str
    rank: int
    m: float
    L: float
    epsilon: float
    block_length: int
    offset: int
    blocks: list[tuple[int, str]]
    S: list[str]
    S_prime: list[str]
    value: Fraction
    defect_bound: int = DEFECT_BOUND
    lower_bound: Fraction = field(default=Fraction(0))

    def to_json(self) -> dict:
        return {
            "format": CERTIFICATE_FORMAT,
            "word": self.word,
            "rank": self.rank,
            "m": self.m,
            "L": self.L,
            "epsilon": self.epsilon,
            "block_length": self.block_length,
            "offset": self.offset,
            "blocks": [[i, s] for i, s in self.blocks],
            "S": self.S,
            "S_prime": self.S_prime,
            "value": str(self.value),
            "defect_bound": self.defect_bound,
            "lower_bound": str(self.lower_bound),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    @classmethod
    def from_json(cls, data: dict) -> "Certificate":
        return cls(data["word"], data["rank"], data["m"], data["L"], data["epsilon"],
                   data["block_length"], data["offset"], [(int(i), s) for i, s in data["blocks"]],
                   list(data["S"]), list(data["S_prime"]), Fraction(data["value"]),
                   int(data["defect_bound"]), Fraction(data["lower_bound"]))


def rigidity_certificate(v, epsilon: float = 0.25, rank: int | None = None,
                         offset: int | str = 0) -> Certificate:
    """Lower bound scl(v) >= h-bar_{S'}(v) / 12 from blocks of length ceil((1+eps) m).

    ``offset`` shifts where the tiling starts; ``"best"`` tries every shift.
    """
    codes = CyclicWord(_codes(v)).letters
    n = len(codes)
    if rank is None:
        rank = max(2, max(codes) // 2 + 1) if codes else 2
    if any(exponent_sums(codes, rank)):
        raise ValueError("word is not in the commutator subgroup")
    if n < 2:
        raise DegenerateError("word too short")
    m = math.log(n) / math.log(2 * rank - 1)
    L = 1 + epsilon
    b = math.ceil(L * m)
    if b > n:
        raise DegenerateError(f"block length {b} exceeds word length {n}")
    if offset == "best":
        cands = [_certificate_at(codes, rank, m, L, epsilon, b, o) for o in range(b)]
        return max(cands, key=lambda c: (c.value, -c.offset))
    return _certificate_at(codes, rank, m, L, epsilon, b, int(offset) % n)


def _certificate_at(codes, rank, m, L, epsilon, b, offset) -> Certificate:
    n = len(codes)
    ext = codes + codes
    blocks = [(offset + j * b, ext[offset + j * b: offset + (j + 1) * b]) for j in range(n // b)]
    blocks = [((i % n), w) for i, w in blocks]
    present = _cyclic_subwords(codes, b)
    S = {w for _, w in blocks}
    S_prime = {w for w in S if _inv(w) not in present}
    value = homogenized_qm(CountingSet(frozenset(S_prime)), codes)
    return Certificate(_to_str(codes), rank, m, L, epsilon, b, offset,
                       [(i, _to_str(w)) for i, w in blocks],
                       sorted(_to_str(w) for w in S), sorted(_to_str(w) for w in S_prime),
                       value, DEFECT_BOUND, value / (2 * DEFECT_BOUND))


@dataclass
class CertificateCheck:
    ok: bool
    failures: list[str]
    lower_bound: Fraction


def verify_certificate(cert: Certificate | dict | str) -> CertificateCheck:
    """Re-derive every claim of a certificate from its word and block data alone."""
    if isinstance(cert, str):
        cert = json.loads(cert)
    if isinstance(cert, dict):
        cert = Certificate.from_json(cert)
    bad: list[str] = []
    codes = Word.parse(cert.word).letters
    n = len(codes)
    if not Word(codes).is_cyclically_reduced():
        bad.append("word is not cyclically reduced")
    if any(exponent_sums(codes, cert.rank)):
        bad.append("word is not in the commutator subgroup")
    ext = codes + codes
    used: set[int] = set()
    words = set()
    for start, s in cert.blocks:
        w = Word.parse(s).letters
        if len(w) != cert.block_length:
            bad.append(f"block at {start} has wrong length")
        if not 0 <= start < n or ext[start:start + len(w)] != w:
            bad.append(f"block {s} does not occur at position {start}")
        span = {(start + t) % n for t in range(len(w))}
        if span & used:
            bad.append(f"block at {start} overlaps another block")
        used |= span
        words.add(w)
    if {Word.parse(s).letters for s in cert.S} != words:
        bad.append("S is not the set of block words")
    present = _cyclic_subwords(codes, cert.block_length) if n else set()
    s_prime = set()
    for s in cert.S_prime:
        w = Word.parse(s).letters
        s_prime.add(w)
        if w not in words:
            bad.append(f"{s} in S' but not a block")
        if _inv(w) in present:
            bad.append(f"inverse of {s} is a subword of the cyclic word")
    value = homogenized_qm(CountingSet(frozenset(s_prime)), codes) if n else Fraction(0)
    if value != cert.value:
        bad.append(f"homogenized value is {value}, certificate claims {cert.value}")
    if cert.defect_bound != DEFECT_BOUND:
        bad.append("defect bound must be 6")
    if cert.lower_bound != value / (2 * DEFECT_BOUND):
        bad.append("lower bound is not value / 12")
    return CertificateCheck(not bad, bad, value / (2 * DEFECT_BOUND))
