"""Linear programs in equality form and two solvers for them.

``solve_exact`` is a revised primal simplex over the rationals with Bland's
rule.  Basis solves go through FLINT's exact rational matrices.  It accepts
a starting basis (typically the optimal basis reported by the floating
point solver) and only falls back to a cold two-phase start when that basis
is not primal feasible in exact arithmetic.

``solve_float`` hands the same program to HiGHS' dual simplex.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import flint
import numpy as np

log = logging.getLogger(__name__)


class LPError(RuntimeError):
    """Infeasible or unbounded program where neither is expected."""


@dataclass
class LinearProgram:
    """minimize c.x subject to A x = b, x >= 0.

    ``cols[j]`` maps row index to the (integer) coefficient of column ``j``.
    """

    n_rows: int
    cols: list[dict[int, int]]
    b: list[Fraction]
    c: list[Fraction]
    row_names: list[str] = field(default_factory=list)
    col_names: list[str] = field(default_factory=list)

    @property
    def n_cols(self) -> int:
        return len(self.cols)

    def residual(self, x: Sequence) -> float:
        r = [-float(v) for v in self.b]
        for j, col in enumerate(self.cols):
            xj = float(x[j])
            if xj:
                for i, a in col.items():
                    r[i] += a * xj
        return max((abs(v) for v in r), default=0.0)

    def is_feasible_exact(self, x: Sequence[Fraction]) -> bool:
        if any(v < 0 for v in x):
            return False
        r = [-v for v in self.b]
        for j, col in enumerate(self.cols):
            if x[j]:
                for i, a in col.items():
                    r[i] += a * x[j]
        return all(v == 0 for v in r)

    def objective(self, x: Sequence):
        return sum((cj * xj for cj, xj in zip(self.c, x) if cj and xj), type(x[0])(0) if x else 0)

    def to_text(self) -> str:
        """Plain-text export: one line per variable, objective and constraint."""
        out = [f"# lp rows={self.n_rows} cols={self.n_cols}", "minimize"]
        names = self.col_names or [f"x{j}" for j in range(self.n_cols)]
        rnames = self.row_names or [f"r{i}" for i in range(self.n_rows)]
        out.append("  " + " ".join(f"{_q(cj)} {names[j]}" for j, cj in enumerate(self.c) if cj))
        rows: list[list[str]] = [[] for _ in range(self.n_rows)]
        for j, col in enumerate(self.cols):
            for i, a in sorted(col.items()):
                rows[i].append(f"{a} {names[j]}")
        out.append("subject to")
        for i in range(self.n_rows):
            out.append(f"  {rnames[i]}: " + " ".join(rows[i]) + f" = {_q(self.b[i])}")
        out.append("bounds")
        out.append("  all variables >= 0")
        out.append("end")
        return "\n".join(out) + "\n"


def _q(v) -> str:
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


@dataclass
class LPSolution:
    status: str
    objective: Fraction | float
    x: list
    y: list
    basis: list[int] = field(default_factory=list)
    iterations: int = 0
    exact: bool = True
    dual_objective: Fraction | float | None = None


# ---------------------------------------------------------------- float


def solve_float(lp: LinearProgram, time_limit: float | None = None) -> LPSolution:
    import highspy

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("solver", "simplex")
    h.setOptionValue("primal_feasibility_tolerance", 1e-10)
    h.setOptionValue("dual_feasibility_tolerance", 1e-10)
    if time_limit:
        h.setOptionValue("time_limit", float(time_limit))
    inf = highspy.kHighsInf
    model = highspy.HighsLp()
    model.num_col_ = lp.n_cols
    model.num_row_ = lp.n_rows
    model.col_cost_ = np.array([float(v) for v in lp.c])
    model.col_lower_ = np.zeros(lp.n_cols)
    model.col_upper_ = np.full(lp.n_cols, inf)
    bvals = np.array([float(v) for v in lp.b])
    model.row_lower_ = bvals
    model.row_upper_ = bvals
    starts, index, value = [0], [], []
    for col in lp.cols:
        for i, a in sorted(col.items()):
            index.append(i)
            value.append(float(a))
        starts.append(len(index))
    model.a_matrix_.format_ = highspy.MatrixFormat.kColwise
    model.a_matrix_.start_ = np.array(starts, dtype=np.int32)
    model.a_matrix_.index_ = np.array(index, dtype=np.int32)
    model.a_matrix_.value_ = np.array(value)
    h.passModel(model)
    h.run()
    status = h.getModelStatus()
    if status != highspy.HighsModelStatus.kOptimal:
        name = h.modelStatusToString(status)
        return LPSolution(name.lower(), float("nan"), [], [], exact=False)
    sol = h.getSolution()
    basis = h.getBasis()
    basic = highspy.HighsBasisStatus.kBasic
    cols = [j for j, s in enumerate(basis.col_status) if s == basic]
    rows = [lp.n_cols + i for i, s in enumerate(basis.row_status) if s == basic]
    x = list(sol.col_value)
    y = list(sol.row_dual)
    obj = h.getInfo().objective_function_value
    dual_obj = float(sum(bi * yi for bi, yi in zip(bvals, y)))
    return LPSolution("optimal", obj, x, y, cols + rows, h.getInfo().simplex_iteration_count,
                      exact=False, dual_objective=dual_obj)


# ---------------------------------------------------------------- exact


class _ExactState:
    """Basis bookkeeping for the revised simplex.  Column ids >= n are artificials."""

    def __init__(self, lp: LinearProgram):
        self.lp = lp
        self.m = lp.n_rows
        self.n = lp.n_cols
        # rows with negative right-hand side are negated so artificials start feasible
        self.flip = [v < 0 for v in lp.b]
        self.b = [(-v if f else v) for v, f in zip(lp.b, self.flip)]
        self.cols = []
        for col in lp.cols:
            self.cols.append({i: (-a if self.flip[i] else a) for i, a in col.items()})

    def column(self, j: int) -> dict[int, int]:
        if j >= self.n:
            return {j - self.n: 1}
        return self.cols[j]

    def basis_matrix(self, basis: list[int]) -> flint.fmpq_mat:
        B = flint.fmpq_mat(self.m, self.m)
        for k, j in enumerate(basis):
            for i, a in self.column(j).items():
                B[i, k] = a
        return B

    def rhs(self) -> flint.fmpq_mat:
        return flint.fmpq_mat(self.m, 1, [flint.fmpq(v.numerator, v.denominator) for v in self.b])


def _to_fraction(q: flint.fmpq) -> Fraction:
    return Fraction(int(q.p), int(q.q))


def _col_vec(m: int, entries: dict[int, int]) -> flint.fmpq_mat:
    v = flint.fmpq_mat(m, 1)
    for i, a in entries.items():
        v[i, 0] = a
    return v


def _simplex(st: _ExactState, basis: list[int], cost: list, allow_artificial: bool,
             max_iter: int) -> tuple[str, list[int], int]:
    """Primal simplex from a feasible basis, Bland's rule.  Returns (status, basis, iterations)."""
    m, n = st.m, st.n
    it = 0
    in_basis = set(basis)
    while True:
        B = st.basis_matrix(basis)
        xB = B.solve(st.rhs())
        cB = flint.fmpq_mat(m, 1, [cost[j] for j in basis])
        y = B.transpose().solve(cB)
        yv = [y[i, 0] for i in range(m)]
        enter = -1
        limit = n + m if allow_artificial else n
        for j in range(limit):
            if j in in_basis:
                continue
            d = cost[j]
            for i, a in st.column(j).items():
                if yv[i] != 0:
                    d -= a * yv[i]
            if d < 0:
                enter = j
                break
        if enter < 0:
            return "optimal", basis, it
        u = B.solve(_col_vec(m, st.column(enter)))
        best = None
        for k in range(m):
            uk = u[k, 0]
            xk = xB[k, 0]
            if uk > 0:
                theta = xk / uk
            elif uk < 0 and basis[k] >= n and not allow_artificial and xk == 0:
                theta = flint.fmpq(0)
            else:
                continue
            key = (theta, basis[k])
            if best is None or key < best[0]:
                best = (key, k)
        if best is None:
            return "unbounded", basis, it
        k = best[1]
        in_basis.discard(basis[k])
        basis[k] = enter
        in_basis.add(enter)
        it += 1
        if it >= max_iter:
            raise LPError(f"simplex did not finish within {max_iter} iterations")


def _primal_values(st: _ExactState, basis: list[int]):
    B = st.basis_matrix(basis)
    xB = B.solve(st.rhs())
    return [xB[k, 0] for k in range(st.m)]


def solve_exact(lp: LinearProgram, basis_hint: Sequence[int] | None = None,
                max_iter: int = 100000) -> LPSolution:
    st = _ExactState(lp)
    m, n = st.m, st.n
    zero = flint.fmpq(0)
    phase2_cost = [flint.fmpq(Fraction(v).numerator, Fraction(v).denominator) for v in lp.c] + [zero] * m
    iterations = 0

    basis = None
    if basis_hint is not None and len(basis_hint) == m:
        cand = list(basis_hint)
        try:
            vals = _primal_values(st, cand)
        except (ZeroDivisionError, ValueError):
            vals = None
        if vals is not None and all(v >= 0 for v in vals) and all(
                v == 0 for v, j in zip(vals, cand) if j >= n):
            basis = cand
        else:
            log.info("warm basis rejected in exact arithmetic; cold start")

    if basis is None:
        basis = list(range(n, n + m))
        phase1_cost = [zero] * n + [flint.fmpq(1)] * m
        status, basis, it = _simplex(st, basis, phase1_cost, True, max_iter)
        iterations += it
        vals = _primal_values(st, basis)
        if any(v != 0 for v, j in zip(vals, basis) if j >= n):
            return LPSolution("infeasible", Fraction(0), [], [], basis, iterations)

    status, basis, it = _simplex(st, basis, phase2_cost, False, max_iter)
    iterations += it
    if status != "optimal":
        return LPSolution(status, Fraction(0), [], [], basis, iterations)

    vals = _primal_values(st, basis)
    x = [Fraction(0)] * n
    for v, j in zip(vals, basis):
        if j < n:
            x[j] = _to_fraction(v)
    B = st.basis_matrix(basis)
    cB = flint.fmpq_mat(m, 1, [phase2_cost[j] for j in basis])
    yf = B.transpose().solve(cB)
    y = [_to_fraction(yf[i, 0]) * (-1 if st.flip[i] else 1) for i in range(m)]
    obj = sum((Fraction(lp.c[j]) * x[j] for j in range(n) if x[j]), Fraction(0))
    dual_obj = sum((Fraction(lp.b[i]) * y[i] for i in range(m)), Fraction(0))
    return LPSolution("optimal", obj, x, y, basis, iterations, True, dual_obj)


def dual_feasible(lp: LinearProgram, y: Sequence[Fraction]) -> bool:
    """Check c - A^T y >= 0 exactly."""
    for j, col in enumerate(lp.cols):
        d = Fraction(lp.c[j])
        for i, a in col.items():
            d -= a * y[i]
        if d < 0:
            return False
    return True
