"""
oracle.py
=========

Independent oracle for the coupling LPs, used to cross-check :mod:`cbdcheck.simplex`.

The oracle is independent of :func:`cbdcheck.simplex.simplex_solve`. It has its
own presolve and its own pivoting with a different entering rule. Only the
:class:`LpOutcome` type and the final substitution check are shared.

Two strategies, picked per program:

1. **Basic-solution enumeration**, the default. After an exact presolve
   (unknowns forced to zero by a zero-rhs row, rows reduced to an independent
   set), every column subset of size rank is tried: solve the square system,
   keep it if the solution is nonnegative and satisfies all original
   constraints. A feasible polytope of this kind always has such a vertex, and
   the optimum of a bounded LP is attained at one.
2. **Certified lexicographic simplex**, the fallback once ``C(free, rank)``
   exceeds ``enumeration_limit`` (20 000 by default); the coupling LP of a
   cyclic-4 system routinely does. Sparse rows, Dantzig's entering rule and
   the lexicographic ratio test for termination. Feasible answers are
   verified by substitution; infeasible answers come with a Farkas vector ``y``
   (``yᵀA ≤ 0``, ``yᵀb > 0``) that is verified by substitution too.

Pass ``enumeration_limit=0`` to force the fallback, or a large limit to force
enumeration on small programs.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import replace
from fractions import Fraction

from .errors import LpInconsistencyError, OracleScaleError
from .lp import LinearProgram
from .simplex import LpOutcome, LpStatus, finish

LOG = logging.getLogger(__name__)

ORACLE_MAX_UNKNOWNS = 2**12
ORACLE_MAX_CONSTRAINTS = 64
DEFAULT_ENUMERATION_LIMIT = 20_000

ZERO = Fraction(0)

SparseRow = dict[int, Fraction]


def _guard(lp: LinearProgram) -> None:
    if lp.num_unknowns > ORACLE_MAX_UNKNOWNS or len(lp.constraints) > ORACLE_MAX_CONSTRAINTS:
        raise OracleScaleError(
            f"oracle scale exceeded: {lp.num_unknowns} unknowns / {len(lp.constraints)} constraints "
            f"(limits {ORACLE_MAX_UNKNOWNS} / {ORACLE_MAX_CONSTRAINTS})",
        )


def brute_force_feasible(lp: LinearProgram, *, enumeration_limit: int = DEFAULT_ENUMERATION_LIMIT) -> LpOutcome:
    """
    Decide feasibility of ``lp`` independently of :func:`cbdcheck.simplex.simplex_solve`.

    The objective, if any, is ignored.

    Raises:
        OracleScaleError: More than 2^12 unknowns or 64 constraints.
    """
    _guard(lp)
    if lp.objective is not None:
        lp = replace(lp, objective=None)
    return _solve(lp, enumeration_limit)


def brute_force_optimize(lp: LinearProgram, *, enumeration_limit: int = DEFAULT_ENUMERATION_LIMIT) -> LpOutcome:
    """
    Maximize the objective of ``lp`` over its basic feasible solutions.

    Raises:
        OracleScaleError: More than 2^12 unknowns or 64 constraints.
        ValueError: ``lp`` has no objective.
    """
    _guard(lp)
    if lp.objective is None:
        raise ValueError("brute_force_optimize needs an objective")
    return _solve(lp, enumeration_limit)


def _solve(lp: LinearProgram, enumeration_limit: int) -> LpOutcome:
    n = lp.num_unknowns
    rows: list[SparseRow] = [{i: v for i, v in c.coefficients.items() if v} for c in lp.constraints]
    rhs = [c.rhs for c in lp.constraints]

    free = _presolve(rows, rhs, n)
    if free is None:
        LOG.debug("Oracle presolve: a zero-forced row has positive rhs, infeasible")
        return LpOutcome(LpStatus.infeasible)

    basis_rows, rank = _independent_rows(rows, rhs, free)
    if basis_rows is None:
        LOG.debug("Oracle presolve: inconsistent equalities, infeasible")
        return LpOutcome(LpStatus.infeasible)

    subsets = math.comb(len(free), rank)
    LOG.debug("Oracle: %d of %d unknowns free, rank %d, %d candidate bases", len(free), n, rank, subsets)
    if subsets <= enumeration_limit:
        return _enumerate(lp, [rows[i] for i in basis_rows], [rhs[i] for i in basis_rows], free, rank)
    LOG.debug("Oracle: %d candidate bases over limit %d, using lexicographic simplex", subsets, enumeration_limit)
    return _lexicographic(lp)


# ──────────────────────────────────────────────────────────────────────────────
# presolve
# ──────────────────────────────────────────────────────────────────────────────


def _presolve(rows: list[SparseRow], rhs: list[Fraction], n: int) -> list[int] | None:
    """
    Columns that may be nonzero, or None if some row is provably unsatisfiable.

    A row with rhs 0 whose remaining coefficients all share one sign forces
    every unknown in it to 0. Repeats until nothing changes.
    """
    zero: set[int] = set()
    changed = True
    while changed:
        changed = False
        for row, b in zip(rows, rhs, strict=True):
            live = [v for i, v in row.items() if i not in zero]
            if not live:
                if b != 0:
                    return None
                continue
            if b == 0 and (all(v > 0 for v in live) or all(v < 0 for v in live)):
                zero.update(i for i in row if i not in zero)
                changed = True
            elif b != 0 and all(v * b < 0 for v in live):
                return None
    return [i for i in range(n) if i not in zero]


def _independent_rows(
    rows: list[SparseRow],
    rhs: list[Fraction],
    free: list[int],
) -> tuple[list[int] | None, int]:
    """Indices of a maximal independent row set over the free columns (None if ``Ax = b`` is inconsistent)."""
    echelon: list[tuple[int, SparseRow, Fraction]] = []
    keep: list[int] = []
    allowed = set(free)
    for idx, (row, b) in enumerate(zip(rows, rhs, strict=True)):
        r = {i: v for i, v in row.items() if i in allowed}
        for pivot_col, prow, pb in echelon:
            f = r.get(pivot_col)
            if f:
                for k, v in prow.items():
                    nv = r.get(k, ZERO) - f * v
                    if nv:
                        r[k] = nv
                    else:
                        r.pop(k, None)
                b -= f * pb
        if not r:
            if b != 0:
                return None, 0
            continue
        col = min(r)
        piv = r[col]
        echelon.append((col, {k: v / piv for k, v in r.items()}, b / piv))
        keep.append(idx)
    return keep, len(keep)


# ──────────────────────────────────────────────────────────────────────────────
# strategy 1: enumerate basic solutions
# ──────────────────────────────────────────────────────────────────────────────


def _solve_square(matrix: list[list[Fraction]], b: list[Fraction]) -> list[Fraction] | None:
    """Gauss-Jordan on a copy; None if singular."""
    size = len(b)
    a = [[*row, bi] for row, bi in zip(matrix, b, strict=True)]
    for col in range(size):
        piv = next((r for r in range(col, size) if a[r][col] != 0), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [v / p for v in a[col]]
        for r in range(size):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col], strict=True)]
    return [row[size] for row in a]


def _enumerate(
    lp: LinearProgram,
    rows: list[SparseRow],
    rhs: list[Fraction],
    free: list[int],
    rank: int,
) -> LpOutcome:
    n = lp.num_unknowns
    best: list[Fraction] | None = None
    best_value: Fraction | None = None
    tried = 0
    for subset in itertools.combinations(free, rank):
        tried += 1
        matrix = [[row.get(j, ZERO) for j in subset] for row in rows]
        xb = _solve_square(matrix, rhs)
        if xb is None or any(v < 0 for v in xb):
            continue
        x = [ZERO] * n
        for j, v in zip(subset, xb, strict=True):
            x[j] = v
        if lp.violations(x):
            continue
        if lp.objective is None:
            LOG.debug("Oracle: feasible basis found after %d subsets", tried)
            return finish(lp, x, "oracle enumeration")
        value = lp.objective_value(x)
        if best_value is None or value > best_value:
            best, best_value = x, value
    LOG.debug("Oracle: %d subsets enumerated", tried)
    if best is None:
        return LpOutcome(LpStatus.infeasible)
    return finish(lp, best, "oracle enumeration")

# ──────────────────────────────────────────────────────────────────────────────
# strategy 2: certified lexicographic simplex
# ──────────────────────────────────────────────────────────────────────────────


def _lexicographic(lp: LinearProgram) -> LpOutcome:
    """
    Single-phase symbolic big-M simplex on sparse rows.

    Costs are pairs ``(M part, real part)`` compared lexicographically: the M
    part is the sum of artificials, the real part the negated objective. The
    artificial ``a_i`` is column ``n + i`` and stays in the rows, so its column
    reads off ``B⁻¹``; the ratio test compares ``(b_i, B⁻¹_i·) / a_ij``
    lexicographically, which rules out cycling. At the end the M-part
    multipliers are a Farkas vector whenever artificials remain positive.
    """
    n = lp.num_unknowns
    m = len(lp.constraints)

    signs: list[int] = []
    rows: list[SparseRow] = []
    rhs: list[Fraction] = []
    for i, c in enumerate(lp.constraints):
        s = -1 if c.rhs < 0 else 1
        signs.append(s)
        row = {k: s * v for k, v in c.coefficients.items() if v}
        row[n + i] = Fraction(1)
        rows.append(row)
        rhs.append(s * c.rhs)
    basis = [n + i for i in range(m)]

    big: SparseRow = {n + i: Fraction(1) for i in range(m)}
    real: SparseRow = {k: -v for k, v in (lp.objective or {}).items() if v}

    def reduced(cost: SparseRow) -> tuple[SparseRow, Fraction]:
        d: SparseRow = dict(cost)
        value = ZERO
        for row, b, j in zip(rows, rhs, basis, strict=True):
            cb = cost.get(j, ZERO)
            if cb:
                _axpy(d, -cb, row)
                value += cb * b
        return d, value

    d_big, v_big = reduced(big)
    d_real, v_real = reduced(real)

    def lex_key(i: int, j: int) -> tuple[Fraction, ...]:
        a = rows[i][j]
        return (rhs[i] / a, *(rows[i].get(n + k, ZERO) / a for k in range(m)))

    pivots = 0
    while True:
        candidates = [
            ((d_big.get(k, ZERO), d_real.get(k, ZERO)), k)
            for k in set(d_big) | set(d_real)
            if k < n and (d_big.get(k, ZERO), d_real.get(k, ZERO)) < (ZERO, ZERO)
        ]
        if not candidates:
            break
        _, j = min(candidates)
        rows_in = [i for i in range(m) if rows[i].get(j, ZERO) > 0]
        if not rows_in:
            raise LpInconsistencyError("oracle: objective is unbounded over the coupling polytope")
        r = min(rows_in, key=lambda i: lex_key(i, j))

        piv = rows[r][j]
        rows[r] = {k: v / piv for k, v in rows[r].items()}
        rhs[r] /= piv
        prow, pb = rows[r], rhs[r]
        for i in range(m):
            f = rows[i].get(j) if i != r else None
            if f:
                _axpy(rows[i], -f, prow)
                rhs[i] -= f * pb
        f_big, f_real = d_big.get(j, ZERO), d_real.get(j, ZERO)
        if f_big:
            _axpy(d_big, -f_big, prow)
            v_big += f_big * pb
        if f_real:
            _axpy(d_real, -f_real, prow)
            v_real += f_real * pb
        basis[r] = j
        pivots += 1

    LOG.debug("Oracle simplex: %d pivots, artificial mass %s", pivots, v_big)
    if v_big > 0:
        # y_i = 1 - (M part of the reduced cost of a_i), mapped back through the row signs
        y = tuple(signs[i] * (1 - d_big.get(n + i, ZERO)) for i in range(m))
        _verify_farkas(lp, y)
        return LpOutcome(LpStatus.infeasible, certificate=y)

    x = [ZERO] * n
    for b, j in zip(rhs, basis, strict=True):
        if j < n:
            x[j] = b
    return finish(lp, x, "oracle simplex")


def _axpy(target: SparseRow, f: Fraction, row: SparseRow) -> None:
    """``target += f * row`` on sparse rows, dropping exact zeros."""
    for k, v in row.items():
        nv = target.get(k, ZERO) + f * v
        if nv:
            target[k] = nv
        else:
            target.pop(k, None)


def _verify_farkas(lp: LinearProgram, y: tuple[Fraction, ...]) -> None:
    yb = sum((yi * c.rhs for yi, c in zip(y, lp.constraints, strict=True)), ZERO)
    if yb <= 0:
        raise LpInconsistencyError("oracle: Farkas certificate has yᵀb ≤ 0")
    column: dict[int, Fraction] = {}
    for yi, c in zip(y, lp.constraints, strict=True):
        if yi:
            for k, v in c.coefficients.items():
                column[k] = column.get(k, ZERO) + yi * v
    worst = [k for k, v in column.items() if v > 0]
    if worst:
        raise LpInconsistencyError(f"oracle: Farkas certificate fails on column x{worst[0]}")
