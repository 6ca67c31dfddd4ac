"""The gluing linear program whose optimum is scl of a chain."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

from ..words import Chain, normalize_chain, parse_chain
from .pieces import NotABoundaryError, PieceSystem, enumerate_pieces
from .simplex import LinearProgram, LPError, LPSolution, dual_feasible, solve_exact, solve_float

log = logging.getLogger(__name__)

EXACT_LENGTH_LIMIT = 32
TRIANGLE_COST = Fraction(1, 4)


@dataclass
class GluingLP:
    pieces: PieceSystem
    program: LinearProgram
    triangles: tuple[tuple[int, int, int], ...]   # triangle for each triangle column

    @property
    def n_squares(self) -> int:
        return len(self.pieces.squares)

    def split(self, x):
        """Split a solution vector into square and triangle weights."""
        s = self.n_squares
        return list(x[:s]), list(x[s:])


def build_lp(pieces: PieceSystem, include_degenerate: bool = False) -> GluingLP:
    """Balance rows per unordered gap pair, coverage rows per position.

    Triangles that visit a gap twice are dropped unless ``include_degenerate``:
    they add equally to ``(g, h)`` and ``(h, g)`` and only cost.
    """
    n = pieces.n_positions
    if include_degenerate:
        triangles = pieces.triangles
    else:
        triangles = tuple(t for t in pieces.triangles if len(set(t)) == 3)
    pair_row: dict[tuple[int, int], int] = {}
    row_names: list[str] = []

    def side_entry(col: dict[int, int], g: int, h: int):
        if g == h:
            return
        key = (g, h) if g < h else (h, g)
        i = pair_row.get(key)
        if i is None:
            i = pair_row[key] = len(row_names)
            row_names.append(f"bal_{key[0]}_{key[1]}")
        col[i] = col.get(i, 0) + (1 if g < h else -1)
        if col[i] == 0:
            del col[i]

    cols: list[dict[int, int]] = []
    col_names: list[str] = []
    for s in pieces.squares:
        col: dict[int, int] = {}
        for g, h in pieces.square_sides(s):
            side_entry(col, g, h)
        cols.append(col)
        col_names.append(f"sq_{s[0]}_{s[1]}")
    for t in triangles:
        col = {}
        for g, h in pieces.triangle_sides(t):
            side_entry(col, g, h)
        cols.append(col)
        col_names.append(f"tri_{t[0]}_{t[1]}_{t[2]}")
    n_bal = len(row_names)
    for p in range(n):
        row_names.append(f"cov_{p}")
    for j, s in enumerate(pieces.squares):
        for p in s:
            cols[j][n_bal + p] = cols[j].get(n_bal + p, 0) + 1
    b = [Fraction(0)] * n_bal + [Fraction(w) for w in pieces.weights]
    c = [Fraction(0)] * len(pieces.squares) + [TRIANGLE_COST] * len(triangles)
    lp = LinearProgram(len(row_names), cols, b, c, row_names, col_names)
    return GluingLP(pieces, lp, triangles)


@dataclass
class SclResult:
    value: Fraction | float
    mode: str
    chain: Chain
    primal: list = field(default_factory=list)
    dual: list = field(default_factory=list)
    status: str = "optimal"
    dual_value: Fraction | float | None = None
    lp: GluingLP | None = None
    residual: float = 0.0

    @property
    def strong_duality(self) -> bool:
        if self.mode != "exact":
            return False
        return self.value == self.dual_value

    def __float__(self):
        return float(self.value)


def solve(glp: GluingLP, mode: str = "exact") -> SclResult:
    chain = glp.pieces.chain
    lp = glp.program
    if lp.n_cols == 0:
        zero = Fraction(0) if mode == "exact" else 0.0
        return SclResult(zero, mode, chain, [], [], "optimal", zero, glp)
    fsol = solve_float(lp)
    if fsol.status != "optimal":
        raise LPError(f"floating solver reported {fsol.status}")
    if mode == "inexact":
        res = lp.residual(fsol.x)
        if res >= 1e-9:
            log.warning("feasibility residual %.3g", res)
        return SclResult(fsol.objective, "inexact", chain, fsol.x, fsol.y, "optimal",
                         fsol.dual_objective, glp, res)
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    sol: LPSolution = solve_exact(lp, basis_hint=fsol.basis)
    if sol.status != "optimal":
        raise LPError(f"exact simplex reported {sol.status}")
    if not lp.is_feasible_exact(sol.x) or not dual_feasible(lp, sol.y):
        raise LPError("exact certificate failed verification")
    return SclResult(sol.objective, "exact", chain, sol.x, sol.y, "optimal", sol.dual_objective, glp)


def choose_mode(c: Chain, mode: str | None) -> str:
    if mode in (None, "auto"):
        return "exact" if c.total_length <= EXACT_LENGTH_LIMIT else "inexact"
    return mode


def scl(c: Chain | str, mode: str | None = None, rank: int = 2) -> SclResult:
    """scl of a chain (normalized internally)."""
    if isinstance(c, str):
        c = parse_chain(c, rank)
    c = normalize_chain(c)
    mode = choose_mode(c, mode)
    if c.is_zero():
        zero = Fraction(0) if mode == "exact" else 0.0
        return SclResult(zero, mode, c, [], [], "optimal", zero, None)
    if not c.homologically_trivial:
        raise NotABoundaryError(f"chain {c} is not null-homologous")
    glp = build_lp(enumerate_pieces(c, distinct_triangles_only=True))
    return solve(glp, mode)


def theory_value(n: int, k: int = 2) -> float:
    return n * math.log(2 * k - 1) / (6 * math.log(n))


def heuristic_value(n: int, k: int = 2) -> float:
    return n / 12 / (math.log(n) / (2 * math.log(2 * k - 1)) + 1 / (2 * k - 2))
