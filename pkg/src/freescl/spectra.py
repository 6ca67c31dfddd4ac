"""Subword digraphs X_i, their Markov kernels, spectra and Cheeger constants.

X_i has the reduced words of length i as vertices and the reduced words of
length i+1 as edges: the edge g runs from its prefix of length i to its
suffix of length i.  Every vertex has 2k-1 outgoing and 2k-1 incoming edges,
and the kernel P_i puts mass 1/(2k-1) on each of them.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import flint
import numpy as np

from .sampling import make_rng
from .words import Alphabet, letter_to_char

SIZE_CAP = 200_000         # vertices allowed in build_digraph
DENSE_CAP = 2000           # vertices allowed in a dense eigensolve
EXHAUSTIVE_CAP = 20        # vertices allowed in the exhaustive Cheeger search
ZERO_TOL = 1e-9


class CapacityError(ValueError):
    """A graph too large for the requested computation."""


def reduced_words(k: int, i: int) -> list[tuple[int, ...]]:
    """All reduced words of length i over k generators, in code order."""
    out: list[tuple[int, ...]] = [()]
    for _ in range(i):
        out = [w + (c,) for w in out for c in range(2 * k) if not w or c != w[-1] ^ 1]
    return out


def n_reduced(k: int, i: int) -> int:
    return 1 if i == 0 else 2 * k * (2 * k - 1) ** (i - 1)


@dataclass
class SubwordDigraph:
    k: int
    level: int
    vertices: list[tuple[int, ...]]
    src: np.ndarray
    dst: np.ndarray

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return int(self.src.size)

    @property
    def degree(self) -> int:
        return 2 * self.k - 1

    def vertex_names(self) -> list[str]:
        return ["".join(letter_to_char(c) for c in w) for w in self.vertices]

    def adjacency(self) -> np.ndarray:
        A = np.zeros((self.n_vertices, self.n_vertices), dtype=np.int64)
        np.add.at(A, (self.src, self.dst), 1)
        return A

    def transition_matrix(self) -> np.ndarray:
        return self.adjacency() / self.degree

    def exact_row_sums(self) -> list[Fraction]:
        sums = [Fraction(0)] * self.n_vertices
        step = Fraction(1, self.degree)
        for s in self.src.tolist():
            sums[s] += step
        return sums

    def out_masks(self) -> list[int]:
        """Bitmask of out-neighbours of each vertex."""
        masks = [0] * self.n_vertices
        for s, d in zip(self.src.tolist(), self.dst.tolist()):
            masks[s] |= 1 << d
        return masks

    def out_boundary(self, U) -> set[int]:
        """Vertices outside U reached by an edge from U."""
        U = set(U)
        return {d for s, d in zip(self.src.tolist(), self.dst.tolist()) if s in U and d not in U}

    def to_triplets(self) -> str:
        """P_i as sparse text: a header line, then one 'row col p/q' line per nonzero."""
        lines = [f"# freescl-sparse/1 {self.n_vertices} {self.n_vertices} {self.n_edges}"]
        order = np.lexsort((self.dst, self.src))
        for e in order.tolist():
            lines.append(f"{self.src[e]} {self.dst[e]} 1/{self.degree}")
        return "\n".join(lines) + "\n"


def build_digraph(alphabet: Alphabet | int, i: int, size_cap: int = SIZE_CAP) -> SubwordDigraph:
    k = alphabet.rank if isinstance(alphabet, Alphabet) else int(alphabet)
    if i < 1:
        raise ValueError("level must be at least 1")
    if n_reduced(k, i) > size_cap:
        raise CapacityError(f"X_{i} has {n_reduced(k, i)} vertices, above the cap {size_cap}")
    verts = reduced_words(k, i)
    index = {w: j for j, w in enumerate(verts)}
    src, dst = [], []
    for w in verts:
        for c in range(2 * k):
            if c != w[-1] ^ 1:
                src.append(index[w])
                dst.append(index[w[1:] + (c,)])
    g = SubwordDigraph(k, i, verts, np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64))
    d = g.degree
    if not (np.all(np.bincount(g.src, minlength=len(verts)) == d)
            and np.all(np.bincount(g.dst, minlength=len(verts)) == d)):
        raise AssertionError("subword digraph is not regular")
    return g


# ---------------------------------------------------------------- spectra


@dataclass
class SpectralReport:
    k: int
    level: int
    eigenvalues: list[complex]
    lambda1: float
    traces: list[int]              # traces[j] = tr(A^j), j = 0..J
    laplacian_spectrum: list[float] = field(default_factory=list, repr=False)

    @property
    def chung_interval(self) -> tuple[float, float]:
        """min(1-|rho|) and min(1-Re rho) over the eigenvalues other than rho_0."""
        rest = self.eigenvalues[1:]
        return (min(1 - abs(r) for r in rest), min(1 - r.real for r in rest))

    def nonzero_eigenvalues(self, tol: float = 1e-7) -> list[complex]:
        return [r for r in self.eigenvalues if abs(r) > tol]

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "level": self.level,
            "eigenvalues": [[r.real, r.imag] for r in self.eigenvalues],
            "lambda1": self.lambda1,
            "traces": [str(t) for t in self.traces],
        }


def exact_traces(g: SubwordDigraph, J: int) -> list[int]:
    """tr(A^j) for j = 0..J as exact integers (periodic paths of period j)."""
    A = flint.fmpz_mat(g.n_vertices, g.n_vertices, g.adjacency().ravel().tolist())
    out = [g.n_vertices]
    M = A
    for _ in range(J):
        out.append(int(sum(M[r, r] for r in range(g.n_vertices))))
        M = M * A
    return out


def spectral_report(g: SubwordDigraph, J: int = 12) -> SpectralReport:
    if g.n_vertices > DENSE_CAP:
        raise CapacityError(f"dense eigensolve limited to {DENSE_CAP} vertices")
    P = g.transition_matrix()
    ev = np.linalg.eigvals(P)
    ev = sorted((complex(x) for x in ev), key=lambda r: (-round(abs(r), 12), -r.real, -r.imag))
    Lap = np.eye(g.n_vertices) - (P + P.T) / 2
    lam = sorted(float(x) for x in np.linalg.eigvalsh(Lap))
    lam1 = next(x for x in lam if x > ZERO_TOL)
    return SpectralReport(g.k, g.level, ev, lam1, exact_traces(g, J), lam)


# ---------------------------------------------------------------- Cheeger


@dataclass
class CheegerReport:
    h: Fraction
    witness: list[int]
    method: str                   # "exhaustive" or "sampled"
    names: list[str] = field(default_factory=list)
    boundary: list[int] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"h": str(self.h), "witness": self.names, "boundary_size": len(self.boundary),
                "method": self.method}


def _popcount(x: np.ndarray) -> np.ndarray:
    return np.bitwise_count(x).astype(np.int64)


def _exhaustive(g: SubwordDigraph) -> tuple[Fraction, list[int]]:
    V = g.n_vertices
    masks = np.arange(1, 1 << V, dtype=np.int64)
    size = _popcount(masks)
    masks, size = masks[size <= V // 2], size[size <= V // 2]
    nb = np.zeros_like(masks)
    for v, out in enumerate(g.out_masks()):
        nb |= np.where((masks >> v) & 1, out, 0)
    bd = _popcount(nb & ~masks)
    # exact minimum of bd/size: compare by cross multiplication
    best = Fraction(int(bd[0]), int(size[0]))
    for s in np.unique(size).tolist():
        b = int(bd[size == s].min())
        best = min(best, Fraction(b, s))
    tied = masks[bd * best.denominator == size * best.numerator]
    witness = min(sorted(v for v in range(V) if (int(m) >> v) & 1) for m in tied.tolist())
    return best, witness


def _lifted_candidates(g: SubwordDigraph) -> list[set[int]]:
    """Words whose first (or last) letter lies in a fixed set of letters."""
    out = []
    for bits in range(1, 1 << (2 * g.k)):
        pair = {c for c in range(2 * g.k) if bits >> c & 1}
        out.append({j for j, w in enumerate(g.vertices) if w[-1] in pair})
        out.append({j for j, w in enumerate(g.vertices) if w[0] in pair})
    return [U for U in out if 0 < len(U) <= g.n_vertices // 2]


def _sampled(g: SubwordDigraph, samples: int, seed: int) -> tuple[Fraction, list[int]]:
    V = g.n_vertices
    rng = make_rng(seed)
    best: tuple[Fraction, list[int]] | None = None

    def consider(U):
        nonlocal best
        if not 0 < len(U) <= V // 2:
            return
        val = Fraction(len(g.out_boundary(U)), len(U))
        key = (val, sorted(U))
        if best is None or key < best:
            best = key

    for U in _lifted_candidates(g):
        consider(U)
    for _ in range(samples):
        size = int(rng.integers(1, V // 2 + 1))
        consider(set(rng.choice(V, size=size, replace=False).tolist()))
    return best


def cheeger_constant(g: SubwordDigraph, samples: int = 2000, seed: int = 0,
                     method: str = "auto") -> CheegerReport:
    """min |dU|/|U| over |U| <= |X|/2, dU the out-boundary; exact up to 20 vertices."""
    if method == "auto":
        method = "exhaustive" if g.n_vertices <= EXHAUSTIVE_CAP else "sampled"
    if method == "exhaustive":
        if g.n_vertices > EXHAUSTIVE_CAP:
            raise CapacityError(f"exhaustive search limited to {EXHAUSTIVE_CAP} vertices")
        h, U = _exhaustive(g)
    else:
        h, U = _sampled(g, samples, seed)
    names = g.vertex_names()
    return CheegerReport(h, U, method, [names[j] for j in U], sorted(g.out_boundary(U)))


# ---------------------------------------------------------------- tail bounds


@dataclass(frozen=True)
class TailBoundQuery:
    """Either a Lezaud query (lambda1, n, gamma, Nq) or a Chernoff query (n, p, delta)."""

    kind: str
    n: int
    lambda1: float = 0.0
    gamma: float = 0.0
    Nq: float = 1.0
    p: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        if self.kind not in ("lezaud", "chernoff"):
            raise ValueError(f"unknown bound {self.kind!r}")
        if self.n <= 0:
            raise ValueError("n must be positive")
        if self.kind == "lezaud":
            if not (self.lambda1 > 0 and self.Nq > 0 and 0 < self.gamma <= 1):
                raise ValueError("Lezaud query needs lambda1 > 0, Nq > 0 and gamma in (0, 1]")
        elif not (0 < self.p <= 1 and 0 < self.delta <= 1):
            raise ValueError("Chernoff query needs p and delta in (0, 1]")


def lezaud_bound(lambda1: float, n: int, gamma: float, Nq: float) -> float:
    return Nq * math.exp(-lambda1 * n * gamma ** 2 / 8)


def chernoff_bound(n: int, p: float, delta: float) -> float:
    return math.exp(-delta ** 2 * n * p / 3)


def tail_bounds(q: TailBoundQuery) -> float:
    if q.kind == "lezaud":
        return lezaud_bound(q.lambda1, q.n, q.gamma, q.Nq)
    return chernoff_bound(q.n, q.p, q.delta)


def stationary_Nq(g: SubwordDigraph) -> float:
    """N_q for a walk started at a point mass: the bound min(pi)^(-1/2)."""
    return math.sqrt(g.n_vertices)


def edge_frequencies(codes, i: int, k: int) -> np.ndarray:
    """Visit counts of the vertices of X_i along the length-i windows of a word."""
    codes = np.asarray(codes, dtype=np.int64)
    n = codes.size - i + 1
    if n <= 0:
        raise ValueError("word shorter than the level")
    verts = reduced_words(k, i)
    index = {w: j for j, w in enumerate(verts)}
    keys = [tuple(codes[j:j + i].tolist()) for j in range(n)]
    return np.bincount([index[w] for w in keys], minlength=len(verts))


def report_json(g: SubwordDigraph, spec: SpectralReport | None, cheeger: CheegerReport | None) -> str:
    data = {"k": g.k, "level": g.level, "vertices": g.n_vertices, "edges": g.n_edges}
    if spec is not None:
        data["spectrum"] = spec.to_json()
    if cheeger is not None:
        data["cheeger"] = cheeger.to_json()
    return json.dumps(data, indent=1, sort_keys=True)
