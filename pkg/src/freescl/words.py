"""Free group words, cyclic words and rational chains.

Letters are stored as small integers: generator ``i`` is ``2*i`` and its
inverse is ``2*i + 1``, so inversion of a letter is ``code ^ 1``.  As strings,
generators print as ``a, b, c, ...`` and inverses as ``A, B, C, ...``.
The code order (a < A < b < B < ...) is the order used for canonical
rotations.
"""
from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence


class AlphabetError(ValueError):
    """A letter outside the alphabet of the given rank."""


class ChainSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


def letter_to_char(code: int) -> str:
    gen, inv = divmod(code, 2)
    return chr((ord("A") if inv else ord("a")) + gen)


def char_to_letter(ch: str) -> int:
    if "a" <= ch <= "z":
        return 2 * (ord(ch) - ord("a"))
    if "A" <= ch <= "Z":
        return 2 * (ord(ch) - ord("A")) + 1
    raise AlphabetError(f"not a letter: {ch!r}")


@dataclass(frozen=True)
class Alphabet:
    rank: int

    def __post_init__(self):
        if not isinstance(self.rank, int) or self.rank < 2:
            raise AlphabetError(f"rank must be an integer >= 2, got {self.rank!r}")
        if self.rank > 26:
            raise AlphabetError("rank above 26 has no letter encoding")

    @property
    def size(self) -> int:
        return 2 * self.rank

    @property
    def letters(self) -> str:
        return "".join(letter_to_char(c) for c in range(self.size))

    def encode(self, text: str) -> tuple[int, ...]:
        codes = []
        for pos, ch in enumerate(text):
            try:
                c = char_to_letter(ch)
            except AlphabetError:
                raise AlphabetError(f"not a letter: {ch!r} at position {pos}") from None
            if c >= self.size:
                raise AlphabetError(f"letter {ch!r} at position {pos} exceeds rank {self.rank}")
            codes.append(c)
        return tuple(codes)


def _free_reduce(codes: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for c in codes:
        if out and out[-1] == c ^ 1:
            out.pop()
        else:
            out.append(c)
    return tuple(out)


def _is_reduced(codes: Sequence[int]) -> bool:
    return all(codes[i] != codes[i + 1] ^ 1 for i in range(len(codes) - 1))


@dataclass(frozen=True)
class Word:
    """A reduced word, stored as a tuple of letter codes."""

    letters: tuple[int, ...] = ()

    def __post_init__(self):
        if not _is_reduced(self.letters):
            raise ValueError(f"word {self.letters!r} is not reduced")

    @classmethod
    def parse(cls, text: str, alphabet: Alphabet | None = None) -> "Word":
        if alphabet is None:
            codes = tuple(char_to_letter(ch) for ch in text)
        else:
            codes = alphabet.encode(text)
        return cls(_free_reduce(codes))

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return "".join(letter_to_char(c) for c in self.letters)

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"

    def __mul__(self, other: "Word") -> "Word":
        return Word(_free_reduce(self.letters + other.letters))

    def rank_needed(self) -> int:
        return max((c // 2 for c in self.letters), default=-1) + 1

    def is_cyclically_reduced(self) -> bool:
        n = len(self.letters)
        return n <= 1 or self.letters[0] != self.letters[-1] ^ 1


def reduce(raw: str | Sequence[int], alphabet: Alphabet | None = None) -> Word:
    """Freely reduce a letter sequence (string or codes)."""
    if isinstance(raw, str):
        return Word.parse(raw, alphabet)
    codes = tuple(int(c) for c in raw)
    if alphabet is not None:
        bad = [c for c in codes if not 0 <= c < alphabet.size]
        if bad:
            raise AlphabetError(f"letter code {bad[0]} outside rank {alphabet.rank}")
    return Word(_free_reduce(codes))


def invert(w: Word) -> Word:
    return Word(tuple(c ^ 1 for c in reversed(w.letters)))


def least_rotation(seq: Sequence[int]) -> int:
    """Start index of the lexicographically least rotation (Booth's algorithm)."""
    n = len(seq)
    if n == 0:
        return 0
    s = list(seq) * 2
    f = [-1] * (2 * n)
    k = 0
    for j in range(1, 2 * n):
        sj = s[j]
        i = f[j - k - 1]
        while i != -1 and sj != s[k + i + 1]:
            if sj < s[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if sj != s[k + i + 1]:
            if sj < s[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return k


def primitive_period(seq: Sequence[int]) -> int:
    """Length of the primitive root of ``seq`` viewed as a cyclic word."""
    n = len(seq)
    if n == 0:
        return 0
    fail = [0] * n
    k = 0
    for i in range(1, n):
        while k and seq[i] != seq[k]:
            k = fail[k - 1]
        if seq[i] == seq[k]:
            k += 1
        fail[i] = k
    p = n - fail[-1]
    return p if n % p == 0 else n


@dataclass(frozen=True, init=False)
class CyclicWord:
    """A cyclically reduced word up to rotation (stored in least rotation)."""

    letters: tuple[int, ...]

    def __init__(self, word: Word | Sequence[int] | str):
        if isinstance(word, str):
            codes = Word.parse(word).letters
        elif isinstance(word, Word):
            codes = word.letters
        else:
            codes = tuple(word)
        if not _is_reduced(codes) or (len(codes) > 1 and codes[0] == codes[-1] ^ 1):
            raise ValueError(f"{codes!r} is not cyclically reduced")
        k = least_rotation(codes)
        object.__setattr__(self, "letters", tuple(codes[k:]) + tuple(codes[:k]))

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return "".join(letter_to_char(c) for c in self.letters)

    def __repr__(self) -> str:
        return f"CyclicWord({str(self)!r})"

    def __lt__(self, other: "CyclicWord") -> bool:
        return (len(self), self.letters) < (len(other), other.letters)

    @property
    def word(self) -> Word:
        return Word(self.letters)

    def inverse(self) -> "CyclicWord":
        return CyclicWord(tuple(c ^ 1 for c in reversed(self.letters)))

    def root(self) -> tuple["CyclicWord", int]:
        p = primitive_period(self.letters)
        if p == len(self.letters):
            return self, 1
        return CyclicWord(self.letters[:p]), len(self.letters) // p


def cyclic_reduce(w: Word) -> tuple[CyclicWord, Word]:
    """Split ``w = conjugator * core * conjugator^-1`` with ``core`` cyclically reduced.

    The returned core keeps the rotation it has inside ``w``; only its
    :class:`CyclicWord` wrapper canonicalizes.
    """
    codes = w.letters
    i, j = 0, len(codes) - 1
    while i < j and codes[i] == codes[j] ^ 1:
        i += 1
        j -= 1
    return CyclicWord(codes[i:j + 1]), Word(codes[:i])


def cyclic_core(w: Word) -> Word:
    """The cyclically reduced core of ``w`` as a plain word, in place."""
    codes = w.letters
    i, j = 0, len(codes) - 1
    while i < j and codes[i] == codes[j] ^ 1:
        i += 1
        j -= 1
    return Word(codes[i:j + 1])


def exponent_sums(codes: Sequence[int], rank: int) -> list[int]:
    sums = [0] * rank
    for c in codes:
        sums[c >> 1] += -1 if c & 1 else 1
    return sums


@dataclass(frozen=True)
class Chain:
    """A formal rational combination of cyclic words.

    ``terms`` are kept in the order given; :func:`normalize_chain` produces the
    canonical representative in B_1^H.
    """

    terms: tuple[tuple[Fraction, CyclicWord], ...] = ()
    rank: int = 2
    homologically_trivial: bool = field(default=False, compare=False)

    def __post_init__(self):
        for coef, _ in self.terms:
            if coef == 0:
                raise ValueError("chain coefficients must be nonzero")

    @classmethod
    def from_words(cls, words: Iterable[str | Word], coefficients=None, rank: int | None = None) -> "Chain":
        words = [w if isinstance(w, Word) else Word.parse(w) for w in words]
        if coefficients is None:
            coefficients = [1] * len(words)
        if rank is None:
            rank = max([2] + [w.rank_needed() for w in words])
        terms = []
        for t, w in zip(coefficients, words):
            t = Fraction(t)
            if t == 0 or len(w) == 0:
                continue
            # conjugation invariance: only the cyclic core matters
            core, _ = cyclic_reduce(w)
            if len(core) == 0:
                continue
            terms.append((t, core))
        chain = cls(tuple(terms), rank)
        return chain._with_flag()

    def _with_flag(self) -> "Chain":
        flag = all(x == 0 for x in abelianization(self))
        return Chain(self.terms, self.rank, flag)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for i, (t, w) in enumerate(self.terms):
            sign = "-" if t < 0 else "+"
            mag = abs(t)
            body = str(w) if mag == 1 else f"{mag}*{w}"
            if i == 0:
                parts.append(body if t > 0 else f"-{body}")
            else:
                parts.append(f"{sign} {body}")
        return " ".join(parts)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def total_length(self) -> int:
        return sum(len(w) for _, w in self.terms)

    def scale(self, q) -> "Chain":
        q = Fraction(q)
        if q == 0:
            return Chain((), self.rank, True)
        return Chain(tuple((q * t, w) for t, w in self.terms), self.rank, self.homologically_trivial)

    def __add__(self, other: "Chain") -> "Chain":
        return Chain(self.terms + other.terms, max(self.rank, other.rank))._with_flag()

    def __neg__(self) -> "Chain":
        return self.scale(-1)

    def inverted(self) -> "Chain":
        """The chain with every word replaced by its inverse (equal to ``-self`` in B_1^H)."""
        return Chain(tuple((t, w.inverse()) for t, w in self.terms), self.rank, self.homologically_trivial)


def abelianization(c: Chain) -> tuple[Fraction, ...]:
    total = [Fraction(0)] * c.rank
    for t, w in c.terms:
        for g, s in enumerate(exponent_sums(w.letters, c.rank)):
            if s:
                total[g] += t * s
    return tuple(total)


def normalize_chain(c: Chain) -> Chain:
    """Canonical form in B_1^H: positive coefficients, primitive words, merged terms."""
    acc: dict[CyclicWord, Fraction] = defaultdict(Fraction)
    for t, w in c.terms:
        root, power = w.root()
        t = t * power
        inv = root.inverse()
        # one representative per {u, u^-1} pair
        if (len(inv), inv.letters) < (len(root), root.letters):
            root, t = inv, -t
        acc[root] += t
    terms = []
    for key in sorted(acc):
        t = acc[key]
        if t > 0:
            terms.append((t, key))
        elif t < 0:
            terms.append((-t, key.inverse()))
    terms.sort(key=lambda tw: (len(tw[1]), tw[1].letters))
    return Chain(tuple(terms), c.rank)._with_flag()


_TERM_RE = re.compile(r"\s*(?:(\d+)(?:\s*/\s*(\d+))?\s*\*\s*)?([A-Za-z]+)\s*")


def parse_chain(text: str, alphabet: Alphabet | int = 2) -> Chain:
    """Parse ``"1/2*abAB + 3*aabAAB - ba"`` into an (unnormalized) chain."""
    if isinstance(alphabet, int):
        alphabet = Alphabet(alphabet)
    text = text.replace("\u2212", "-")
    pos, n = 0, len(text)
    words: list[Word] = []
    coefs: list[Fraction] = []
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos == n:
            break
        sign = 1
        if text[pos] in "+-":
            sign = -1 if text[pos] == "-" else 1
            pos += 1
        elif words:
            raise ChainSyntaxError("expected '+' or '-'", pos)
        m = _TERM_RE.match(text, pos)
        if not m:
            raise ChainSyntaxError("expected a term", pos)
        num, den, letters = m.group(1), m.group(2), m.group(3)
        if den is not None and int(den) == 0:
            raise ChainSyntaxError("zero denominator", pos)
        coef = Fraction(int(num), int(den) if den else 1) if num else Fraction(1)
        try:
            codes = alphabet.encode(letters)
        except AlphabetError as exc:
            raise AlphabetError(f"{exc} (term starting at position {m.start(3)})") from None
        words.append(Word(_free_reduce(codes)))
        coefs.append(sign * coef)
        pos = m.end()
    return Chain.from_words(words, coefs, rank=alphabet.rank)


def chain(text: str, rank: int = 2) -> Chain:
    """Parse and normalize in one step."""
    return normalize_chain(parse_chain(text, rank))
