"""Random reduced words and their subword statistics.

All randomness goes through numpy's PCG64 bit generator seeded with the
user's 64-bit seed, so a (rank, n, seed) triple always yields the same word.
A reduced word is drawn as a first letter uniform over the 2k letters and
then, at each step, one of the 2k-1 letters that do not cancel.
"""
from __future__ import annotations

import functools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numba
import numpy as np

from .words import Alphabet, CyclicWord, Word, letter_to_char

RETRY_CAP = 10**9
_BATCH_LETTERS = 1 << 24      # letters per rejection batch, packed several to a draw


class ParityError(ValueError):
    """Odd length requested for a word in the commutator subgroup."""


class ExhaustionError(RuntimeError):
    """Rejection sampling gave up."""


class RangeError(ValueError):
    """A length parameter outside its allowed range."""


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class RandomWordSpec:
    alphabet: Alphabet
    n: int
    seed: int = 0
    conditioned: bool = False

    def __post_init__(self):
        if self.n < 0:
            raise RangeError("word length must be nonnegative")
        if self.conditioned and self.n % 2:
            raise ParityError(f"no reduced word of odd length {self.n} lies in [F,F]")


@dataclass(frozen=True)
class ScaleParameters:
    """Length scale m = log n / log(2k-1) and the block length derived from L."""

    n: int
    k: int = 2
    L: float = 1.0
    epsilon: float = 0.0

    @property
    def m(self) -> float:
        return math.log(self.n) / math.log(2 * self.k - 1)

    @property
    def block_length(self) -> int:
        return math.ceil(self.L * self.m)


# ---------------------------------------------------------------- sampling


@numba.njit(cache=True)
def _walk(first, steps, out):
    """Turn raw draws into reduced words in place: step r skips the cancelling letter."""
    b, n = out.shape
    for i in range(b):
        prev = first[i]
        out[i, 0] = prev
        for j in range(1, n):
            r = steps[i, j - 1]
            prev = r + (1 if r >= (prev ^ 1) else 0)
            out[i, j] = prev


@numba.njit(cache=True)
def _zero_sum_rows(words, k):
    b, n = words.shape
    ok = np.ones(b, dtype=np.bool_)
    sums = np.zeros(k, dtype=np.int64)
    for i in range(b):
        sums[:] = 0
        for j in range(n):
            c = words[i, j]
            sums[c >> 1] += 1 - 2 * (c & 1)
        for g in range(k):
            if sums[g] != 0:
                ok[i] = False
                break
    return ok


def _reduced_batch(rng: np.random.Generator, k: int, n: int, batch: int) -> np.ndarray:
    """``batch`` independent uniform reduced words of length n >= 1, as rows."""
    first = rng.integers(0, 2 * k, size=batch, dtype=np.int8)
    steps = rng.integers(0, 2 * k - 1, size=(batch, max(n - 1, 0)), dtype=np.int8)
    out = np.empty((batch, n), dtype=np.int8)
    _walk(first, steps, out)
    return out


@functools.lru_cache(maxsize=None)
def _chunk_tables(k: int, c: int) -> tuple[np.ndarray, np.ndarray]:
    """Effect of c packed base-(2k-1) steps from each last letter: next letter and exponent-sum change."""
    q = 2 * k - 1
    V = q ** c
    prev = np.repeat(np.arange(2 * k, dtype=np.int64)[:, None], V, axis=1)
    delta = np.zeros((2 * k, V, k), dtype=np.int16)
    v = np.arange(V, dtype=np.int64)
    for _ in range(c):
        r = v % q
        v = v // q
        prev = r + (r >= (prev ^ 1))
        np.add.at(delta, (np.arange(2 * k)[:, None], np.arange(V)[None, :], prev >> 1), 1 - 2 * (prev & 1))
    return prev.astype(np.int8), delta


def _chunk_size(k: int) -> int:
    """Base-(2k-1) steps packed in one uint16 draw, keeping the tables near 2 MB."""
    q = 2 * k - 1
    c = 1
    while q ** (c + 1) <= 1 << 16 and 2 * k * q ** (c + 1) * (k + 1) <= 1 << 20:
        c += 1
    return c


@numba.njit(cache=True)
def _first_zero_sum(first, chunks, nxt, delta, q, c, n, k):
    """Index of the first packed word with all exponent sums zero, or -1."""
    full = (n - 1) // c
    rem = n - 1 - full * c
    sums = np.zeros(k, dtype=np.int64)
    for i in range(first.size):
        prev = np.int64(first[i])
        sums[:] = 0
        sums[prev >> 1] += 1 - 2 * (prev & 1)
        for t in range(full):
            v = np.int64(chunks[i, t])
            for g in range(k):
                sums[g] += delta[prev, v, g]
            prev = np.int64(nxt[prev, v])
        if rem:
            v = np.int64(chunks[i, full])
            for _ in range(rem):
                r = v % q
                v = v // q
                prev = r + (1 if r >= (prev ^ 1) else 0)
                sums[prev >> 1] += 1 - 2 * (prev & 1)
        ok = True
        for g in range(k):
            if sums[g] != 0:
                ok = False
                break
        if ok:
            return i
    return -1


@numba.njit(cache=True)
def _unpack(first, chunks, q, c, n, out):
    prev = np.int64(first)
    out[0] = prev
    j = 1
    for t in range(chunks.size):
        v = np.int64(chunks[t])
        for _ in range(c):
            if j >= n:
                return
            r = v % q
            v = v // q
            prev = r + (1 if r >= (prev ^ 1) else 0)
            out[j] = prev
            j += 1


def random_reduced_word(spec: RandomWordSpec) -> Word:
    k, n = spec.alphabet.rank, spec.n
    if n == 0:
        return Word(())
    row = _reduced_batch(make_rng(spec.seed), k, n, 1)[0]
    return Word(tuple(row.tolist()))


def random_commutator_word(spec: RandomWordSpec, retry_cap: int = RETRY_CAP) -> Word:
    """Uniform word in F_n intersected with [F,F], by rejection."""
    k, n = spec.alphabet.rank, spec.n
    if n % 2:
        raise ParityError(f"no reduced word of odd length {n} lies in [F,F]")
    if n == 0:
        return Word(())
    if n == 2:
        # xy with zero exponent sums forces y = x^-1, which is not reduced
        raise ExhaustionError("[F,F] has no reduced words of length 2")
    rng = make_rng(spec.seed)
    q = 2 * k - 1
    c = _chunk_size(k)
    nxt, delta = _chunk_tables(k, c)
    tried = 0
    cap = max(1, _BATCH_LETTERS // n)
    batch = min(64, cap)
    while tried < retry_cap:
        b = min(batch, retry_cap - tried)
        # each uint16 draw packs c steps; the tables give the effect of a whole chunk
        first = rng.integers(0, 2 * k, size=b, dtype=np.int64)
        chunks = rng.integers(0, q ** c, size=(b, -(-(n - 1) // c)), dtype=np.uint16)
        i = _first_zero_sum(first, chunks, nxt, delta, q, c, n, k)
        if i >= 0:
            out = np.empty(n, dtype=np.int8)
            _unpack(first[i], chunks[i], q, c, n, out)
            return Word(tuple(out.tolist()))
        tried += b
        batch = min(2 * batch, cap)
    raise ExhaustionError(f"no word in [F,F] after {retry_cap} candidates")


def sample(spec: RandomWordSpec) -> Word:
    return random_commutator_word(spec) if spec.conditioned else random_reduced_word(spec)


def commutator_fraction(alphabet: Alphabet, n: int, trials: int, seed: int = 0,
                        batch: int = 20_000) -> tuple[Fraction, float]:
    """Monte Carlo estimate of |F'_n| / |F_n| and the rescaled value fraction * n^(k/2)."""
    if trials < 1:
        raise RangeError("trials must be positive")
    k = alphabet.rank
    if n % 2 or n == 0:
        frac = Fraction(0) if n % 2 else Fraction(1)
        return frac, float(frac) * n ** (k / 2)
    rng = make_rng(seed)
    hits = 0
    left = trials
    while left:
        b = min(batch, left)
        hits += int(_zero_sum_rows(_reduced_batch(rng, k, n, b), k).sum())
        left -= b
    frac = Fraction(hits, trials)
    return frac, float(frac) * n ** (k / 2)


# ---------------------------------------------------------------- statistics


def _inv(sigma: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(c ^ 1 for c in reversed(sigma))


def occurrences(v: Word | tuple, ell: int, cyclic: bool = False):
    """Yield (start, subword) for every (cyclic) subword of length ``ell``, overlaps included."""
    codes = v.letters if isinstance(v, Word) else tuple(v)
    n = len(codes)
    if cyclic:
        ext = codes + codes[:ell - 1]
        for i in range(n):
            yield i, ext[i:i + ell]
    else:
        for i in range(n - ell + 1):
            yield i, codes[i:i + ell]


@dataclass
class CountingMeasure:
    """Counts of length-``ell`` subwords of a word ``v``."""

    ell: int
    counts: Counter
    n: int
    cyclic: bool = False

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def count(self, sigma: Word | str | tuple) -> int:
        if isinstance(sigma, str):
            sigma = Word.parse(sigma)
        key = sigma.letters if isinstance(sigma, Word) else tuple(sigma)
        return self.counts.get(key, 0)

    def inverse_count(self, sigma) -> int:
        """C_sigma(v^-1), which equals C_{sigma^-1}(v)."""
        if isinstance(sigma, str):
            sigma = Word.parse(sigma)
        key = sigma.letters if isinstance(sigma, Word) else tuple(sigma)
        return self.counts.get(_inv(key), 0)

    def A(self) -> Fraction:
        """(1/2n) * sum over w in F_ell of |C_w - C_{w^-1}|."""
        if self.n == 0:
            return Fraction(0)
        s = 0
        for w, cw in self.counts.items():
            ci = self.counts.get(_inv(w), 0)
            s += abs(cw - ci)
            if ci == 0:
                # the term for w^-1 itself, absent from the dict
                s += cw
        return Fraction(s, 2 * self.n)

    def H(self, f: Callable[[tuple[int, ...]], float]):
        """H_f(v) = C_f(v) - C_f(v^-1) for a function f on words of length ell."""
        return sum(f(w) * c for w, c in self.counts.items()) - sum(
            f(_inv(w)) * c for w, c in self.counts.items())

    def as_strings(self) -> dict[str, int]:
        return {"".join(letter_to_char(c) for c in w): k for w, k in sorted(self.counts.items())}


def subword_stats(v: Word, ell: int, cyclic: bool = False) -> CountingMeasure:
    n = len(v)
    if not 1 <= ell <= n:
        raise RangeError(f"subword length {ell} outside [1, {n}]")
    if cyclic and not v.is_cyclically_reduced():
        raise ValueError("cyclic counting needs a cyclically reduced word")
    counts = Counter(w for _, w in occurrences(v, ell, cyclic))
    return CountingMeasure(ell, counts, n, cyclic)


def phase_statistic(v: Word, ell: int, cyclic: bool = False) -> Fraction:
    return subword_stats(v, ell, cyclic).A()


@dataclass
class InverseMassReport:
    L: float
    block_length: int
    card_S: int
    inverse_mass: int
    card_S_prime: int
    n: int = 0
    S_prime: list = field(default_factory=list, repr=False)

    def check(self) -> bool:
        return (self.card_S_prime <= self.card_S <= self.n
                and self.inverse_mass >= self.card_S - self.card_S_prime)


def inverse_subword_mass(v: Word | CyclicWord, L: float = 1.5, block_length: int | None = None,
                         k: int | None = None) -> InverseMassReport:
    """Distinct cyclic subwords S of v of block length ceil(L m) and their copies in v^-1."""
    codes = v.letters
    n = len(codes)
    if n == 0:
        raise RangeError("empty word")
    if not Word(codes).is_cyclically_reduced():
        raise ValueError("word must be cyclically reduced")
    if k is None:
        k = max(2, max(codes) // 2 + 1)
    if block_length is None:
        if n < 2:
            raise RangeError("word too short to define a scale")
        block_length = ScaleParameters(n, k, L).block_length
    if block_length < 1 or block_length > n:
        raise RangeError(f"block length {block_length} outside [1, {n}]")
    here = Counter(w for _, w in occurrences(codes, block_length, True))
    S = set(here)
    inv_counts = Counter(w for _, w in occurrences(_inv(codes), block_length, True))
    mass = sum(inv_counts.get(s, 0) for s in S)
    s_prime = sorted(s for s in S if _inv(s) not in here)
    return InverseMassReport(L, block_length, len(S), mass, len(s_prime), n, s_prime)


def bridging_count(a: int | str, b: int | str, m: int, alphabet: Alphabet) -> int:
    """Number of reduced words u of length m with a u b reduced (u_m(a, b))."""
    if m < 0:
        raise RangeError("m must be nonnegative")
    if isinstance(a, str):
        a = alphabet.encode(a)[0]
    if isinstance(b, str):
        b = alphabet.encode(b)[0]
    size = alphabet.size
    vec = [0] * size
    vec[a] = 1
    for _ in range(m + 1):
        total = sum(vec)
        vec = [total - vec[y ^ 1] for y in range(size)]
    return vec[b]
